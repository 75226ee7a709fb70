#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace slavespin {

struct LanczosOptions {
  int krylov_dimension = 80;
  int max_restarts = 50;
  /// Stop once ||A v - theta v|| <= tolerance.
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int matvecs = 0;
  bool converged = false;
};

using SymmetricOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Lowest eigenpair of a real symmetric operator by explicitly restarted Lanczos
/// with full reorthogonalisation. Vectors in `deflate` (orthonormal) are projected
/// out of the Krylov space, which yields the next eigenpair above them.
LanczosResult lanczos_lowest(const SymmetricOperator& apply, Eigen::Index dimension,
                             const LanczosOptions& options = {},
                             const std::vector<Eigen::VectorXd>& deflate = {});

}  // namespace slavespin
