#pragma once

#include "slavespin/ising.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace slavespin {

// Units: hbar = 1, time in microseconds, every energy a rad/us coefficient.

/// Atoms in the plane (positions in um) with van der Waals coefficient C6
/// in rad/us * um^6.
struct AtomArray {
  std::vector<Eigen::Vector2d> positions;
  double c6 = 0.0;

  int size() const { return static_cast<int>(positions.size()); }
};

/// Default C6 (rad/us um^6), typical of n ~ 70 Rydberg states. Only ratios
/// C6 / r^6 enter the dynamics.
inline constexpr double kDefaultC6 = 5420158.53;

/// Pair interaction matrix V_ij = C6 / |r_i - r_j|^6, zero diagonal.
/// Throws std::invalid_argument for coincident or non-finite positions.
Eigen::MatrixXd interaction_matrix(const AtomArray& array);

/// Piecewise-linear waveform through sorted breakpoints.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> times, std::vector<double> values);

  static Waveform constant(double value, double duration);
  static Waveform ramp(double from, double to, double duration);

  double operator()(double tau) const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  double duration() const { return times_.empty() ? 0.0 : times_.back(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Global Rabi drive and per-site detunings over [0, duration].
struct DriveSchedule {
  double duration = 0.0;
  Waveform rabi;
  std::vector<Waveform> detuning;

  /// Throws std::invalid_argument on negative Rabi frequency, mismatched
  /// waveform domains, or a detuning count different from `sites`.
  void validate(int sites) const;
};

/// H = sum_{i<j} V_ij n_i n_j + (Omega/2) sum_i S^x_i - sum_i delta_i n_i.
IsingHamiltonian build_rydberg_hamiltonian(const Eigen::MatrixXd& interactions, double rabi,
                                           const Eigen::VectorXd& detuning);
IsingHamiltonian build_rydberg_hamiltonian(const AtomArray& array, double rabi,
                                           const Eigen::VectorXd& detuning);

/// Detunings that cancel the single-site shift of the interactions and add
/// the cluster mean field:  delta_i = (1/2) sum_j V_ij + 4 Jbar mbar z_i.
/// With V = -4 J the drive-free Hamiltonian is then -H_s + const in the
/// S^z basis.
Eigen::VectorXd compensating_detunings(const Eigen::MatrixXd& interactions,
                                       const std::vector<int>& external_neighbors,
                                       double mean_bond, double mean_magnetization);

/// Default annealing parameters.
inline constexpr double kDefaultAnnealTime = 4.0;                   // us
inline constexpr double kDefaultDeltaStart = 2.0 * 3.14159265358979323846 * 5.0;  // rad/us
inline constexpr double kDefaultQuenchRamp = 0.05;                  // us

/// Linear anneal: Omega 0 -> U/2, delta_i delta_start -> compensating value.
/// With delta_start > 0 the register's |g...g> is the top state of the
/// initial Hamiltonian and adiabatic following of the top state ends in the
/// ground state of H_s.
DriveSchedule make_anneal_schedule(double u, double mean_bond, double mean_magnetization,
                                   const std::vector<int>& external_neighbors,
                                   const Eigen::MatrixXd& interactions,
                                   double anneal_time = kDefaultAnnealTime,
                                   double delta_start = kDefaultDeltaStart);

/// Quench drive: Omega rises linearly 0 -> U_f/2 over `ramp`, then holds;
/// detunings are held at `detuning` throughout.
DriveSchedule make_quench_schedule(double u_final, double ramp, double duration,
                                   const Eigen::VectorXd& detuning);

/// Pure state vector or density matrix over 2^N basis states.
class QuantumState {
 public:
  explicit QuantumState(Eigen::VectorXcd psi);
  explicit QuantumState(Eigen::MatrixXcd rho);

  bool is_pure() const { return std::holds_alternative<Eigen::VectorXcd>(data_); }
  int sites() const { return sites_; }
  Eigen::Index dimension() const;

  const Eigen::VectorXcd& vector() const { return std::get<Eigen::VectorXcd>(data_); }
  const Eigen::MatrixXcd& density() const { return std::get<Eigen::MatrixXcd>(data_); }

  /// Born probabilities in the computational basis.
  Eigen::VectorXd probabilities() const;
  /// Promote a pure state to |psi><psi|; density matrices are returned as is.
  QuantumState to_density() const;

  /// Largest violation of the state invariants (norm/trace, Hermiticity,
  /// positivity); zero for a perfect state.
  struct Diagnostics {
    double trace_error = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
  };
  Diagnostics diagnostics() const;

 private:
  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
  int sites_ = 0;
};

enum class InitialKind { AllGround, AllExcited, CustomProduct };

/// Product state. For CustomProduct, `amplitudes` gives one (a_g, a_r) pair
/// per site (normalised internally); a single pair is broadcast to all sites.
QuantumState prepare_initial_state(int sites, InitialKind kind,
                                   const std::vector<Eigen::Vector2cd>& amplitudes = {});

/// Time-dependent Hamiltonian of Ising form; fills `out` with H(tau).
using HamiltonianPath = std::function<void(double tau, IsingHamiltonian& out)>;

HamiltonianPath rydberg_path(const DriveSchedule& schedule, const Eigen::MatrixXd& interactions);
HamiltonianPath constant_path(IsingHamiltonian h);

class EvolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvolveOptions {
  /// Starting RK4 step (us); halved until the local-error test passes.
  double base_step = 1e-3;
  /// Allowed local error per unit time.
  double tolerance = 1e-8;
  double min_step = 1e-9;
  /// Abort when norm/trace drift exceeds this.
  double trace_tolerance = 1e-8;
  double hermiticity_tolerance = 1e-10;
  double positivity_tolerance = 1e-8;
};

/// Integrate from tau = 0 and return the state at each (sorted, non-negative)
/// sample time. gamma = 0 with a pure initial state propagates the Schroedinger
/// equation; otherwise the Lindblad equation with jump operators n_i at rate
/// gamma acts on a density matrix.
std::vector<QuantumState> evolve(const QuantumState& initial, const HamiltonianPath& path,
                                 double gamma, const std::vector<double>& sample_times,
                                 const EvolveOptions& options = {});

/// Convenience overload driving a Rydberg register.
std::vector<QuantumState> evolve(const QuantumState& initial, const DriveSchedule& schedule,
                                 const AtomArray& array, double gamma,
                                 const std::vector<double>& sample_times,
                                 const EvolveOptions& options = {});

}  // namespace slavespin
