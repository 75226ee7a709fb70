#include "constraint_oracle.hpp"

#include <doctest.h>

#include <numbers>

namespace {

std::vector<double> grid(double duration, int samples) {
  std::vector<double> tau;
  for (int k = 0; k <= samples; ++k) tau.push_back(duration * k / samples);
  return tau;
}

constexpr double kT = 2.0 * std::numbers::pi * 0.25;

}  // namespace

TEST_CASE("two-site slave-spin quench stays in the physical subspace") {
  for (double u : {2.0, 13.0, 25.0}) {
    CAPTURE(u);
    const oracle::ConstraintReport r = oracle::run_constraint_oracle(kT, u, grid(4.0, 80));
    CHECK(r.max_q < 1e-8);
    CHECK(r.max_q_product < 1e-8);
  }
}

TEST_CASE("slave-spin dynamics reproduce the physical Hubbard dimer") {
  const oracle::ConstraintReport r = oracle::run_constraint_oracle(kT, 13.0, grid(4.0, 80));
  CHECK(r.max_double_occupancy_diff < 1e-8);
}

TEST_CASE("the projector detects violations") {
  const oracle::ConstraintReport r = oracle::run_constraint_oracle(kT, 13.0, grid(4.0, 40));
  CHECK(r.unconstrained_start_q > 0.1);
  // a bare S^z field does not commute with Q_i
  CHECK(r.field_broken_q > 1e-3);
}
