#include "slavespin/spins.hpp"

#include "slavespin/lanczos.hpp"

#include <cmath>

namespace slavespin {

ZObservables z_observables(const Eigen::VectorXd& probabilities, int sites) {
  ZObservables out;
  out.magnetization = Eigen::VectorXd::Zero(sites);
  out.correlation = Eigen::MatrixXd::Zero(sites, sites);
  std::vector<double> s(sites);
  for (Eigen::Index a = 0; a < probabilities.size(); ++a) {
    const double p = probabilities(a);
    if (p == 0.0) continue;
    for (int i = 0; i < sites; ++i) s[i] = sz_value(a, i);
    for (int i = 0; i < sites; ++i) {
      out.magnetization(i) += p * s[i];
      for (int k = i + 1; k < sites; ++k) out.correlation(i, k) += p * s[i] * s[k];
    }
  }
  const double total = probabilities.sum();
  for (int i = 0; i < sites; ++i) {
    out.correlation(i, i) = total;
    for (int k = i + 1; k < sites; ++k) out.correlation(k, i) = out.correlation(i, k);
  }
  out.mean_magnetization = out.magnetization.mean();
  return out;
}

IsingHamiltonian build_cluster_hamiltonian(const Eigen::MatrixXd& j, double u,
                                           const Eigen::VectorXd& field, int max_sites) {
  const int n = static_cast<int>(j.rows());
  if (j.cols() != n || field.size() != n) {
    throw std::invalid_argument("coupling matrix and field sizes disagree");
  }
  check_site_count(n, max_sites);
  IsingHamiltonian h;
  h.sites = n;
  h.transverse = u / 4.0;
  const Eigen::Index dim = Eigen::Index{1} << n;
  h.diagonal = Eigen::VectorXd::Zero(dim);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (j(a, b) != 0.0) pairs.emplace_back(a, b);
    }
  }
  for (Eigen::Index basis = 0; basis < dim; ++basis) {
    double e = 0.0;
    for (auto [a, b] : pairs) e += j(a, b) * sz_value(basis, a) * sz_value(basis, b);
    for (int a = 0; a < n; ++a) e += field(a) * sz_value(basis, a);
    h.diagonal(basis) = e;
  }
  return h;
}

Eigen::VectorXd mean_field(const std::vector<int>& external_neighbors, double mean_bond,
                           double mean_magnetization) {
  Eigen::VectorXd h(external_neighbors.size());
  for (std::size_t i = 0; i < external_neighbors.size(); ++i) {
    h(i) = 2.0 * external_neighbors[i] * mean_bond * mean_magnetization;
  }
  return h;
}

namespace {

Eigen::VectorXd probabilities_of(const Eigen::VectorXd& psi) { return psi.array().square(); }

// Rotate inside a degenerate doublet towards the largest average magnetisation.
Eigen::VectorXd maximise_magnetization(const Eigen::VectorXd& v0, const Eigen::VectorXd& v1,
                                       int sites) {
  const Eigen::Index dim = v0.size();
  Eigen::VectorXd m_diag(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    double m = 0.0;
    for (int i = 0; i < sites; ++i) m += sz_value(a, i);
    m_diag(a) = m / sites;
  }
  Eigen::Matrix2d m;
  m(0, 0) = v0.dot(m_diag.cwiseProduct(v0));
  m(1, 1) = v1.dot(m_diag.cwiseProduct(v1));
  m(0, 1) = m(1, 0) = v0.dot(m_diag.cwiseProduct(v1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> small(m);
  const Eigen::Vector2d c = small.eigenvectors().col(1);
  return (c(0) * v0 + c(1) * v1).normalized();
}

}  // namespace

SpinSolution ground_state(const IsingHamiltonian& h, const GroundStateOptions& options) {
  const double scale = std::max(h.norm_bound(), 1e-300);
  const double tolerance = options.relative_residual * scale;
  const double degeneracy = 1e-10 * scale;
  const bool field_free = [&] {
    // A vanishing longitudinal field leaves the diagonal invariant under a global flip.
    const Eigen::Index dim = h.dimension();
    for (Eigen::Index a = 0; a < dim; ++a) {
      if (std::abs(h.diagonal(a) - h.diagonal(dim - 1 - a)) > 1e-14 * scale) return false;
    }
    return true;
  }();

  SpinSolution out;
  Eigen::VectorXd second;
  double second_energy = 0.0;
  bool have_second = false;

  if (h.sites <= options.dense_max_sites) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success) {
      throw GroundStateError("dense diagonalisation failed", -1.0);
    }
    out.state = solver.eigenvectors().col(0);
    out.energy = solver.eigenvalues()(0);
    if (h.dimension() > 1) {
      second = solver.eigenvectors().col(1);
      second_energy = solver.eigenvalues()(1);
      have_second = true;
    }
  } else {
    LanczosOptions lo;
    lo.tolerance = 0.5 * tolerance;
    auto apply = [&h](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.apply(x, y); };
    LanczosResult r = lanczos_lowest(apply, h.dimension(), lo);
    if (!r.converged) {
      throw GroundStateError("Lanczos did not converge, residual " + std::to_string(r.residual),
                             r.residual);
    }
    out.state = r.vector;
    out.energy = r.value;
    if (field_free) {
      LanczosResult r2 = lanczos_lowest(apply, h.dimension(), lo, {r.vector});
      if (r2.converged) {
        second = r2.vector;
        second_energy = r2.value;
        have_second = true;
      }
    }
  }

  if (field_free && have_second && second_energy - out.energy < degeneracy) {
    out.state = maximise_magnetization(out.state, second, h.sites);
    out.degenerate = true;
  }

  Eigen::VectorXd hpsi;
  h.apply(out.state, hpsi);
  out.energy = out.state.dot(hpsi);
  out.residual = (hpsi - out.energy * out.state).norm();
  if (out.residual > tolerance) {
    throw GroundStateError("ground state residual " + std::to_string(out.residual) +
                               " above tolerance",
                           out.residual);
  }
  out.observables = z_observables(probabilities_of(out.state), h.sites);
  return out;
}

}  // namespace slavespin
