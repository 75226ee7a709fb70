#include "slavespin/rydberg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace slavespin {

Eigen::MatrixXd interaction_matrix(const AtomArray& array) {
  const int n = array.size();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!array.positions[i].allFinite()) {
      throw std::invalid_argument("atom " + std::to_string(i) + " has a non-finite position");
    }
    for (int j = i + 1; j < n; ++j) {
      const double r2 = (array.positions[i] - array.positions[j]).squaredNorm();
      if (!(r2 > 0.0)) {
        throw std::invalid_argument("atoms " + std::to_string(i) + " and " + std::to_string(j) +
                                    " coincide");
      }
      v(i, j) = v(j, i) = array.c6 / (r2 * r2 * r2);
    }
  }
  return v;
}

Waveform::Waveform(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size()) {
    throw std::invalid_argument("waveform needs matching, non-empty breakpoint lists");
  }
  if (times_.front() != 0.0) throw std::invalid_argument("waveform must start at tau = 0");
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw std::invalid_argument("waveform breakpoints must be sorted");
  }
}

Waveform Waveform::constant(double value, double duration) {
  return Waveform({0.0, duration}, {value, value});
}

Waveform Waveform::ramp(double from, double to, double duration) {
  return Waveform({0.0, duration}, {from, to});
}

double Waveform::operator()(double tau) const {
  if (tau <= times_.front()) return values_.front();
  if (tau >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin());
  const double t0 = times_[k - 1];
  const double t1 = times_[k];
  if (t1 == t0) return values_[k];
  const double w = (tau - t0) / (t1 - t0);
  return (1.0 - w) * values_[k - 1] + w * values_[k];
}

void DriveSchedule::validate(int sites) const {
  if (!(duration > 0.0)) throw std::invalid_argument("schedule duration must be positive");
  if (static_cast<int>(detuning.size()) != sites) {
    throw std::invalid_argument("schedule has " + std::to_string(detuning.size()) +
                                " detuning channels for " + std::to_string(sites) + " atoms");
  }
  auto check_domain = [&](const Waveform& w, const char* name) {
    if (std::abs(w.duration() - duration) > 1e-12 * std::max(1.0, duration)) {
      throw std::invalid_argument(std::string(name) + " waveform does not span the schedule");
    }
  };
  check_domain(rabi, "Rabi");
  for (const auto& d : detuning) check_domain(d, "detuning");
  for (double v : rabi.values()) {
    if (v < 0.0) throw std::invalid_argument("Rabi frequency must be non-negative");
  }
}

IsingHamiltonian build_rydberg_hamiltonian(const Eigen::MatrixXd& interactions, double rabi,
                                           const Eigen::VectorXd& detuning) {
  const int n = static_cast<int>(interactions.rows());
  if (interactions.cols() != n || detuning.size() != n) {
    throw std::invalid_argument("interaction matrix and detuning sizes disagree");
  }
  check_site_count(n);
  IsingHamiltonian h;
  h.sites = n;
  h.transverse = rabi / 2.0;
  const Eigen::Index dim = Eigen::Index{1} << n;
  h.diagonal.resize(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!occupation(a, i)) continue;
      e -= detuning(i);
      for (int j = i + 1; j < n; ++j) e += interactions(i, j) * occupation(a, j);
    }
    h.diagonal(a) = e;
  }
  return h;
}

IsingHamiltonian build_rydberg_hamiltonian(const AtomArray& array, double rabi,
                                           const Eigen::VectorXd& detuning) {
  return build_rydberg_hamiltonian(interaction_matrix(array), rabi, detuning);
}

Eigen::VectorXd compensating_detunings(const Eigen::MatrixXd& interactions,
                                       const std::vector<int>& external_neighbors,
                                       double mean_bond, double mean_magnetization) {
  const Eigen::Index n = interactions.rows();
  if (static_cast<Eigen::Index>(external_neighbors.size()) != n) {
    throw std::invalid_argument("neighbour counts and interaction matrix sizes disagree");
  }
  Eigen::VectorXd delta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    delta(i) = 0.5 * interactions.row(i).sum() +
               4.0 * mean_bond * mean_magnetization * external_neighbors[i];
  }
  return delta;
}

DriveSchedule make_anneal_schedule(double u, double mean_bond, double mean_magnetization,
                                   const std::vector<int>& external_neighbors,
                                   const Eigen::MatrixXd& interactions, double anneal_time,
                                   double delta_start) {
  if (!(anneal_time > 0.0)) throw std::invalid_argument("anneal time must be positive");
  const Eigen::VectorXd final_detuning =
      compensating_detunings(interactions, external_neighbors, mean_bond, mean_magnetization);
  DriveSchedule s;
  s.duration = anneal_time;
  s.rabi = Waveform::ramp(0.0, u / 2.0, anneal_time);
  for (Eigen::Index i = 0; i < final_detuning.size(); ++i) {
    s.detuning.push_back(Waveform::ramp(delta_start, final_detuning(i), anneal_time));
  }
  return s;
}

DriveSchedule make_quench_schedule(double u_final, double ramp, double duration,
                                   const Eigen::VectorXd& detuning) {
  if (!(ramp >= 0.0 && ramp < duration)) {
    throw std::invalid_argument("quench ramp must satisfy 0 <= ramp < duration");
  }
  DriveSchedule s;
  s.duration = duration;
  const double top = u_final / 2.0;
  if (ramp == 0.0) {
    s.rabi = Waveform::constant(top, duration);
  } else {
    s.rabi = Waveform({0.0, ramp, duration}, {0.0, top, top});
  }
  for (Eigen::Index i = 0; i < detuning.size(); ++i) {
    s.detuning.push_back(Waveform::constant(detuning(i), duration));
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

int sites_for_dimension(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("state dimension must be a power of two >= 2");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

}  // namespace

QuantumState::QuantumState(Eigen::VectorXcd psi)
    : data_(std::move(psi)), sites_(sites_for_dimension(vector().size())) {}

QuantumState::QuantumState(Eigen::MatrixXcd rho)
    : data_(std::move(rho)), sites_(sites_for_dimension(density().rows())) {
  if (density().rows() != density().cols()) {
    throw std::invalid_argument("density matrix must be square");
  }
}

Eigen::Index QuantumState::dimension() const {
  return is_pure() ? vector().size() : density().rows();
}

Eigen::VectorXd QuantumState::probabilities() const {
  if (is_pure()) return vector().cwiseAbs2();
  return density().diagonal().real().cwiseMax(0.0);
}

QuantumState QuantumState::to_density() const {
  if (!is_pure()) return *this;
  return QuantumState(Eigen::MatrixXcd(vector() * vector().adjoint()));
}

QuantumState::Diagnostics QuantumState::diagnostics() const {
  Diagnostics d;
  if (is_pure()) {
    d.trace_error = std::abs(vector().squaredNorm() - 1.0);
    return d;
  }
  const Eigen::MatrixXcd& rho = density();
  d.trace_error = std::abs(rho.trace() - 1.0);
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = eig.eigenvalues()(0);
  return d;
}

QuantumState prepare_initial_state(int sites, InitialKind kind,
                                   const std::vector<Eigen::Vector2cd>& amplitudes) {
  check_site_count(sites);
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  switch (kind) {
    case InitialKind::AllGround:
      psi(0) = 1.0;
      break;
    case InitialKind::AllExcited:
      psi(dim - 1) = 1.0;
      break;
    case InitialKind::CustomProduct: {
      if (amplitudes.size() != 1 && static_cast<int>(amplitudes.size()) != sites) {
        throw std::invalid_argument("custom product state needs 1 or N amplitude pairs");
      }
      std::vector<Eigen::Vector2cd> local;
      for (int i = 0; i < sites; ++i) {
        Eigen::Vector2cd a = amplitudes[amplitudes.size() == 1 ? 0 : i];
        if (a.norm() == 0.0) throw std::invalid_argument("zero amplitude pair");
        local.push_back(a.normalized());
      }
      for (Eigen::Index b = 0; b < dim; ++b) {
        std::complex<double> amp(1.0);
        for (int i = 0; i < sites; ++i) amp *= local[i]((b >> i) & 1);
        psi(b) = amp;
      }
      break;
    }
  }
  return QuantumState(std::move(psi));
}

HamiltonianPath rydberg_path(const DriveSchedule& schedule, const Eigen::MatrixXd& interactions) {
  const int n = static_cast<int>(interactions.rows());
  schedule.validate(n);
  // Interaction part of the diagonal is time independent.
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd fixed = build_rydberg_hamiltonian(interactions, 0.0, zero).diagonal;
  return [schedule, fixed, n](double tau, IsingHamiltonian& out) {
    out.sites = n;
    out.transverse = schedule.rabi(tau) / 2.0;
    out.diagonal = fixed;
    const Eigen::Index dim = fixed.size();
    for (int i = 0; i < n; ++i) {
      const double d = schedule.detuning[i](tau);
      if (d == 0.0) continue;
      const Eigen::Index bit = Eigen::Index{1} << i;
      for (Eigen::Index a = 0; a < dim; ++a) {
        if (a & bit) out.diagonal(a) -= d;
      }
    }
  };
}

HamiltonianPath constant_path(IsingHamiltonian h) {
  return [h = std::move(h)](double, IsingHamiltonian& out) {
    if (out.diagonal.size() != h.diagonal.size() || out.transverse != h.transverse) out = h;
  };
}

// ---------------------------------------------------------------------------

namespace {

const std::complex<double> kMinusI(0.0, -1.0);

struct PureRhs {
  const HamiltonianPath& path;
  mutable IsingHamiltonian h;
  void operator()(double tau, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    path(tau, h);
    h.apply(psi, out);
    out *= kMinusI;
  }
};

struct LindbladRhs {
  const HamiltonianPath& path;
  double gamma;
  Eigen::MatrixXd dephasing;  // (gamma/2) * popcount(a ^ b)
  mutable IsingHamiltonian h;
  mutable Eigen::MatrixXcd hrho;

  LindbladRhs(const HamiltonianPath& p, double g, Eigen::Index dim) : path(p), gamma(g) {
    dephasing.resize(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      for (Eigen::Index a = 0; a < dim; ++a) {
        dephasing(a, b) = 0.5 * g * std::popcount(static_cast<std::uint64_t>(a ^ b));
      }
    }
  }

  // L(rho) = -i[H, rho] + gamma sum_i (n_i rho n_i - {n_i, rho}/2). With n_i
  // diagonal projectors the dissipator damps rho_ab by the Hamming distance
  // of a and b.
  void operator()(double tau, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    path(tau, h);
    h.apply(rho, hrho);
    out = kMinusI * (hrho - hrho.adjoint());
    if (gamma != 0.0) out.array() -= dephasing.array() * rho.array();
  }
};

template <typename State, typename Rhs>
class Rk4 {
 public:
  explicit Rk4(const Rhs& rhs) : rhs_(rhs) {}

  void step(double tau, double h, State& y) {
    rhs_(tau, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    rhs_(tau + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    rhs_(tau + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    rhs_(tau + h, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  // Richardson estimate of the local error of one step of size h.
  double local_error(double tau, double h, const State& y) {
    State full = y;
    step(tau, h, full);
    State half = y;
    step(tau, 0.5 * h, half);
    step(tau + 0.5 * h, 0.5 * h, half);
    return (full - half).norm() * 16.0 / 15.0;
  }

 private:
  const Rhs& rhs_;
  State k1_, k2_, k3_, k4_, tmp_;
};

constexpr double kCheckInterval = 0.05;  // us between step-size re-checks

template <typename State, typename Rhs>
std::vector<State> integrate(State y, const Rhs& rhs, const std::vector<double>& sample_times,
                             const EvolveOptions& options,
                             const std::function<void(const State&, double)>& check) {
  Rk4<State, Rhs> rk(rhs);
  std::vector<State> out;
  out.reserve(sample_times.size());
  double tau = 0.0;
  double step = options.base_step;
  for (double target : sample_times) {
    while (tau < target) {
      // Remainders left by rounding are not worth a step.
      if (target - tau <= 1e-12 * std::max(1.0, target)) {
        tau = target;
        break;
      }
      const double chunk_end = std::min(target, tau + kCheckInterval);
      const double span = chunk_end - tau;
      double h = std::min({2.0 * step, options.base_step, span});
      const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * y.norm();
      while (rk.local_error(tau, h, y) > options.tolerance * h + roundoff) {
        h *= 0.5;
        if (h < options.min_step) {
          std::ostringstream msg;
          msg << "step size underflow at tau = " << tau << " us (h < " << options.min_step << ")";
          throw EvolutionError(msg.str());
        }
      }
      if (h < span) step = h;
      const int n = static_cast<int>(std::ceil(span / h - 1e-9));
      const double dt = span / n;
      for (int k = 0; k < n; ++k) rk.step(tau + k * dt, dt, y);
      tau = chunk_end;
    }
    check(y, tau);
    out.push_back(y);
  }
  return out;
}

}  // namespace

std::vector<QuantumState> evolve(const QuantumState& initial, const HamiltonianPath& path,
                                 double gamma, const std::vector<double>& sample_times,
                                 const EvolveOptions& options) {
  if (gamma < 0.0) throw std::invalid_argument("dephasing rate must be non-negative");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      (!sample_times.empty() && sample_times.front() < 0.0)) {
    throw std::invalid_argument("sample times must be sorted and non-negative");
  }
  std::vector<QuantumState> result;
  result.reserve(sample_times.size());

  if (initial.is_pure() && gamma == 0.0) {
    PureRhs rhs{path, {}};
    auto check = [&](const Eigen::VectorXcd& psi, double tau) {
      const double drift = std::abs(psi.squaredNorm() - 1.0);
      if (drift > options.trace_tolerance) {
        std::ostringstream msg;
        msg << "norm drift " << drift << " at tau = " << tau << " us";
        throw EvolutionError(msg.str());
      }
    };
    for (auto& psi : integrate<Eigen::VectorXcd>(initial.vector(), rhs, sample_times, options,
                                                 check)) {
      result.emplace_back(std::move(psi));
    }
    return result;
  }

  const QuantumState start = initial.to_density();
  LindbladRhs rhs(path, gamma, start.dimension());
  auto check = [&](const Eigen::MatrixXcd& rho, double tau) {
    const auto d = QuantumState(rho).diagnostics();
    if (d.trace_error > options.trace_tolerance || d.hermiticity > options.hermiticity_tolerance ||
        d.min_eigenvalue < -options.positivity_tolerance) {
      std::ostringstream msg;
      msg << "density matrix invariants violated at tau = " << tau << " us: trace error "
          << d.trace_error << ", hermiticity " << d.hermiticity << ", min eigenvalue "
          << d.min_eigenvalue;
      throw EvolutionError(msg.str());
    }
  };
  for (auto& rho :
       integrate<Eigen::MatrixXcd>(start.density(), rhs, sample_times, options, check)) {
    result.emplace_back(std::move(rho));
  }
  return result;
}

std::vector<QuantumState> evolve(const QuantumState& initial, const DriveSchedule& schedule,
                                 const AtomArray& array, double gamma,
                                 const std::vector<double>& sample_times,
                                 const EvolveOptions& options) {
  return evolve(initial, rydberg_path(schedule, interaction_matrix(array)), gamma, sample_times,
                options);
}

}  // namespace slavespin
