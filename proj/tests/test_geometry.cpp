#include "slavespin/fermions.hpp"
#include "slavespin/geometry.hpp"
#include "slavespin/lattice.hpp"

#include <doctest.h>

#include <cmath>

using namespace slavespin;

namespace {

Eigen::MatrixXd pair_j(double j12) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(0, 1) = j(1, 0) = j12;
  return j;
}

Eigen::MatrixXd cluster_j(const ClusterSpec& c, double t_hop) {
  const Eigen::MatrixXd t = build_hopping(c, t_hop);
  return build_coupling(t, solve_density_matrix(t)).j;
}

}  // namespace

TEST_CASE("cost of simple configurations") {
  const double c6 = 1000.0;
  const double j = -0.8;
  const double r = std::pow(c6 / std::abs(4 * j), 1.0 / 6.0);
  CHECK(geometry_cost({{0, 0}, {r, 0}}, pair_j(j), c6) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(geometry_cost({{0, 0}, {2.0, 0}}, pair_j(0.0), c6) == doctest::Approx(c6 / 64.0));
  CHECK(std::isinf(geometry_cost({{1, 1}, {1, 1}}, pair_j(j), c6)));
}

TEST_CASE("plaquette cost cannot vanish") {
  const ClusterSpec c(2, 2);
  const Eigen::MatrixXd j = cluster_j(c, 1.0);
  const GeometryResult g = optimize_geometry(initial_guess(j, c, 1000.0), j);
  CHECK(g.final_cost > 1e-3);
}

TEST_CASE("initial guess spacing and layout") {
  const ClusterSpec c(3, 4);
  const Eigen::MatrixXd uniform = -0.5 * (build_hopping(c, 1.0).array() != 0.0).cast<double>().matrix();
  const AtomArray a = initial_guess(uniform, c, 200.0);
  const double spacing = std::pow(200.0 / 2.0, 1.0 / 6.0);
  CHECK(a.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(a.positions[i].x() == doctest::Approx(spacing * c.column(i)));
    CHECK(a.positions[i].y() == doctest::Approx(spacing * c.row(i)));
  }
  Eigen::MatrixXd mixed = uniform;
  mixed(0, 1) = mixed(1, 0) = -0.01;
  CHECK((initial_guess(mixed, c, 200.0).positions[1] - initial_guess(mixed, c, 200.0).positions[0]).norm() ==
        doctest::Approx(std::pow(200.0 / 0.04, 1.0 / 6.0)));
  CHECK_THROWS_AS(initial_guess(Eigen::MatrixXd::Zero(12, 12), c, 200.0), std::invalid_argument);
}

TEST_CASE("two atoms reach the exact minimum from any start") {
  const double j = -1.3;
  for (double x : {0.5, 3.0, 9.0}) {
    AtomArray a;
    a.c6 = 5420158.53;
    a.positions = {{0, 0}, {x, 0.3 * x}};
    const GeometryResult g = optimize_geometry(a, pair_j(j));
    CHECK(g.final_cost < 1e-6 * std::abs(4 * j));
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  const ClusterSpec c(3, 2);
  const Eigen::MatrixXd j = cluster_j(c, 1.0);
  AtomArray a = initial_guess(j, c, 1000.0);
  a.positions[2] += Eigen::Vector2d(0.13, -0.07);
  a.positions[4] += Eigen::Vector2d(-0.05, 0.11);
  const Eigen::VectorXd g = geometry_cost_gradient(a.positions, j, a.c6);
  const double h = 1e-6;
  for (int k = 0; k < 2 * a.size(); ++k) {
    auto plus = a.positions;
    auto minus = a.positions;
    plus[k / 2](k % 2) += h;
    minus[k / 2](k % 2) -= h;
    const double fd = (geometry_cost(plus, j, a.c6) - geometry_cost(minus, j, a.c6)) / (2 * h);
    CHECK(g(k) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("cost is invariant under rigid motions") {
  const ClusterSpec c(3, 2);
  const Eigen::MatrixXd j = cluster_j(c, 1.0);
  AtomArray a = initial_guess(j, c, 1000.0);
  a.positions[1] += Eigen::Vector2d(0.2, 0.1);
  const double d0 = geometry_cost(a.positions, j, a.c6);
  const Eigen::Rotation2Dd rot(0.7);
  auto moved = a.positions;
  for (auto& p : moved) p = rot * p + Eigen::Vector2d(3.5, -1.25);
  CHECK(std::abs(geometry_cost(moved, j, a.c6) - d0) <= 1e-12 * std::max(1.0, d0));
}

TEST_CASE("12-atom optimisation reduces the cost monotonically") {
  const ClusterSpec c(3, 4);
  const Eigen::MatrixXd j = cluster_j(c, 1.5);
  const AtomArray start = initial_guess(j, c, kDefaultC6);
  const GeometryResult g = optimize_geometry(start, j);
  CHECK(g.final_cost < g.initial_cost);
  for (std::size_t k = 1; k < g.history.size(); ++k) CHECK(g.history[k] <= g.history[k - 1]);

  GeometryOptions multi;
  multi.starts = 3;
  CHECK(optimize_geometry(start, j, multi).final_cost <= g.final_cost + 1e-12);
}

TEST_CASE("scaling J and C6 together leaves the optimum in place") {
  const ClusterSpec c(2, 2);
  const Eigen::MatrixXd j = cluster_j(c, 1.0);
  const AtomArray a = initial_guess(j, c, 1000.0);
  AtomArray b = a;
  b.c6 = 3.0 * a.c6;
  const GeometryResult ga = optimize_geometry(a, j);
  const GeometryResult gb = optimize_geometry(b, 3.0 * j);
  for (int i = 0; i < 4; ++i) CHECK((ga.array.positions[i] - gb.array.positions[i]).norm() < 1e-6);
}

TEST_CASE("minimum-distance penalty keeps atoms apart") {
  const ClusterSpec c(2, 2);
  const Eigen::MatrixXd j = cluster_j(c, 1.0);
  const AtomArray a = initial_guess(j, c, 1000.0);
  GeometryOptions opt;
  opt.min_distance = 1.2 * (a.positions[1] - a.positions[0]).norm();
  opt.min_distance_weight = 1e4;
  const GeometryResult g = optimize_geometry(a, j, opt);
  for (int p = 0; p < 4; ++p) {
    for (int q = p + 1; q < 4; ++q) CHECK((g.array.positions[p] - g.array.positions[q]).norm() > 1.1 * (a.positions[1] - a.positions[0]).norm());
  }
}
