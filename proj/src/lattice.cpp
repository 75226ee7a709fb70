#include "slavespin/lattice.hpp"

#include <stdexcept>
#include <string>

namespace slavespin {

ClusterSpec::ClusterSpec(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("cluster dimensions must be >= 1, got " + std::to_string(nx) +
                                "x" + std::to_string(ny));
  }
  for (int i = 0; i < size(); ++i) {
    if (column(i) + 1 < nx_) bonds_.emplace_back(i, i + 1);
    if (row(i) + 1 < ny_) bonds_.emplace_back(i, i + nx_);
  }
}

Eigen::MatrixXd build_hopping(const ClusterSpec& cluster, double t_hop) {
  if (!(t_hop > 0.0)) {
    throw std::invalid_argument("hopping amplitude must be positive");
  }
  const int n = cluster.size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : cluster.bonds()) {
    t(i, j) = -t_hop;
    t(j, i) = -t_hop;
  }
  return t;
}

std::vector<int> external_neighbor_counts(const ClusterSpec& cluster) {
  std::vector<int> z(cluster.size(), 4);
  for (auto [i, j] : cluster.bonds()) {
    --z[i];
    --z[j];
  }
  return z;
}

}  // namespace slavespin
