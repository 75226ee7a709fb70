#include "slavespin/backend.hpp"

#include <cmath>
#include <stdexcept>

namespace slavespin {

std::optional<BackendKind> parse_backend(const std::string& name) {
  if (name == "exact") return BackendKind::Exact;
  if (name == "anneal-noiseless" || name == "anneal_noiseless") return BackendKind::AnnealNoiseless;
  if (name == "anneal-noisy" || name == "anneal_noisy") return BackendKind::AnnealNoisy;
  return std::nullopt;
}

std::string backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Exact: return "exact";
    case BackendKind::AnnealNoiseless: return "anneal-noiseless";
    case BackendKind::AnnealNoisy: return "anneal-noisy";
  }
  return "exact";
}

std::string valid_backend_names() { return "exact, anneal-noiseless, anneal-noisy"; }

BackendConfig BackendConfig::preset(BackendKind kind, const NoiseParams& noise, double gamma) {
  BackendConfig c;
  switch (kind) {
    case BackendKind::Exact:
      break;
    case BackendKind::AnnealNoiseless:
      c.preparation = Preparation::Anneal;
      break;
    case BackendKind::AnnealNoisy:
      c.preparation = Preparation::Anneal;
      c.gamma = gamma;
      c.noise = noise;
      break;
  }
  return c;
}

void BackendConfig::validate() const {
  if (gamma < 0.0) throw std::invalid_argument("dephasing rate must be non-negative");
  if (noise.shots < 0) throw std::invalid_argument("shot count must be non-negative");
  if (noise.shots == 1) throw std::invalid_argument("at least 2 shots are needed for error bars");
  if (noise.shots > 0) noise.validate();
  if (anneal_time <= 0.0) throw std::invalid_argument("anneal time must be positive");
  if (c6 <= 0.0) throw std::invalid_argument("C6 must be positive");
}

Eigen::VectorXd complement_bits(const Eigen::VectorXd& probabilities) {
  const Eigen::Index dim = probabilities.size();
  Eigen::VectorXd out(dim);
  for (Eigen::Index b = 0; b < dim; ++b) out(dim - 1 - b) = probabilities(b);
  return out;
}

SpinBackend::SpinBackend(BackendConfig config, ClusterSpec cluster)
    : config_(std::move(config)), cluster_(cluster), z_(external_neighbor_counts(cluster_)) {
  config_.validate();
  check_site_count(cluster_.size(), config_.max_sites);
}

Embedding SpinBackend::embed(const Eigen::MatrixXd& j, double mean_bond) const {
  const int n = cluster_.size();
  if (j.rows() != n || j.cols() != n) throw std::invalid_argument("coupling matrix does not match the cluster");
  Embedding e;
  e.target = j;
  e.mean_bond = mean_bond;
  if (config_.geometry == GeometryMode::Ideal) {
    e.interactions = -4.0 * j;
    e.interactions.diagonal().setZero();
    e.effective = j;
    e.effective.diagonal().setZero();
    return e;
  }
  const AtomArray start = initial_guess(j, cluster_, config_.c6);
  GeometryResult g = optimize_geometry(start, j, config_.geometry_options);
  e.interactions = interaction_matrix(g.array);
  e.effective = -0.25 * e.interactions;
  e.geometry = std::move(g);
  return e;
}

SpinMeasurement SpinBackend::measure(const Eigen::VectorXd& probabilities,
                                     std::uint64_t stream) const {
  const int n = cluster_.size();
  SpinMeasurement m;
  if (config_.noise.shots == 0) {
    m.observables = z_observables(probabilities, n);
    m.magnetization_err = Eigen::VectorXd::Zero(n);
    return m;
  }
  const ShotRecord record = sample_bitstrings(probabilities, n, config_.noise, stream);
  const ShotEstimates est = estimate_observables(record);
  m.observables.magnetization = est.magnetization;
  m.observables.correlation = est.correlation;
  m.observables.mean_magnetization = est.mean_magnetization;
  m.magnetization_err = est.magnetization_err;
  m.mean_err = est.mean_err;
  return m;
}

SpinMeasurement SpinBackend::solve(const Embedding& embedding, double u, double mbar,
                                   std::uint64_t stream) const {
  const Eigen::VectorXd field = mean_field(z_, embedding.mean_bond, mbar);

  if (config_.preparation == Preparation::GroundState) {
    const IsingHamiltonian h =
        build_cluster_hamiltonian(embedding.effective, u, field, config_.max_sites);
    const SpinSolution sol = ground_state(h, config_.ground_state);
    SpinMeasurement m = measure(sol.state.cwiseAbs2(), stream);
    m.degenerate = sol.degenerate;
    return m;
  }

  // The register starts in |g...g>, i.e. S^z = -1 everywhere. If the target
  // field favours S^z = +1, anneal the mirrored problem and relabel.
  const bool mirror = config_.align_branch && field.sum() < 0.0;
  const double drive_mbar = mirror ? -mbar : mbar;
  const DriveSchedule schedule =
      make_anneal_schedule(u, embedding.mean_bond, drive_mbar, z_, embedding.interactions,
                           config_.anneal_time, config_.delta_start);
  const QuantumState start = prepare_initial_state(cluster_.size(), InitialKind::AllGround);
  const std::vector<QuantumState> out =
      evolve(start, rydberg_path(schedule, embedding.interactions), config_.gamma,
             {schedule.duration}, config_.evolve);
  Eigen::VectorXd p = out.back().probabilities();
  if (mirror) p = complement_bits(p);
  return measure(p, stream);
}

}  // namespace slavespin
