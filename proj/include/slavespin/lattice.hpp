#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace slavespin {

/// Rectangular cluster of the square lattice, `nx` columns by `ny` rows.
/// Sites are numbered row-major: site i sits at column i % nx, row i / nx.
/// This order is shared by every matrix, state vector and bitstring.
class ClusterSpec {
 public:
  ClusterSpec(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }

  int column(int site) const { return site % nx_; }
  int row(int site) const { return site / nx_; }
  int site(int column, int row) const { return row * nx_ + column; }

  /// Nearest-neighbour pairs (i < j) inside the cluster, open boundaries.
  const std::vector<std::pair<int, int>>& bonds() const { return bonds_; }

 private:
  int nx_;
  int ny_;
  std::vector<std::pair<int, int>> bonds_;
};

/// N x N hopping matrix: -t_hop on every internal bond, zero elsewhere.
Eigen::MatrixXd build_hopping(const ClusterSpec& cluster, double t_hop);

/// Number of square-lattice neighbours of each site lying outside the cluster.
std::vector<int> external_neighbor_counts(const ClusterSpec& cluster);

}  // namespace slavespin
