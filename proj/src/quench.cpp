#include "slavespin/quench.hpp"

#include "slavespin/fermions.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace slavespin {

namespace {
// The FFTW planner is not thread-safe.
std::mutex fftw_planner_mutex;
}  // namespace

std::vector<double> uniform_grid(double duration, int samples) {
  if (!(duration > 0.0) || samples < 1) throw std::invalid_argument("invalid time grid");
  std::vector<double> tau(samples + 1);
  for (int k = 0; k <= samples; ++k) tau[k] = duration * k / samples;
  return tau;
}

SpinCoupling frozen_coupling(const Eigen::MatrixXd& hopping) {
  return build_coupling(hopping, solve_density_matrix(hopping));
}

QuenchRun run_quench(const Eigen::MatrixXd& hopping, const SpinBackend& backend,
                     const QuenchSettings& settings) {
  if (settings.u_final < 0.0) throw std::invalid_argument("U_f must be non-negative");
  if (settings.tau_ramp < 0.0 || settings.tau_ramp >= settings.duration) {
    throw std::invalid_argument("tau_ramp must lie in [0, duration)");
  }
  const ClusterSpec& cluster = backend.cluster();
  const int n = cluster.size();
  const std::vector<int> z = external_neighbor_counts(cluster);
  const SpinCoupling coupling = frozen_coupling(hopping);

  QuenchRun run;
  run.u_final = settings.u_final;
  run.tau = uniform_grid(settings.duration, settings.samples);
  run.j = coupling.j;
  run.mean_bond = coupling.mean_bond;

  const BackendConfig& cfg = backend.config();
  std::vector<QuantumState> states;
  double sign = 1.0;
  if (settings.ideal_spin_dynamics) {
    // U = 0 ground state in the field of mbar = 1: all S^z = +1 when Jbar < 0.
    const Eigen::VectorXd field = mean_field(z, coupling.mean_bond, 1.0);
    const IsingHamiltonian h =
        build_cluster_hamiltonian(coupling.j, settings.u_final, field, cfg.max_sites);
    const InitialKind kind = field.sum() <= 0.0 ? InitialKind::AllExcited : InitialKind::AllGround;
    states = evolve(prepare_initial_state(n, kind), constant_path(h), cfg.gamma, run.tau,
                    cfg.evolve);
  } else {
    // The register starts in |g...g>; drive the mirrored problem, whose
    // polarised state is all-g, and flip the sign of the magnetisation back.
    const Embedding e = backend.embed(coupling.j, coupling.mean_bond);
    const bool mirror = coupling.mean_bond < 0.0;
    sign = mirror ? -1.0 : 1.0;
    const Eigen::VectorXd detuning =
        compensating_detunings(e.interactions, z, coupling.mean_bond, sign);
    const DriveSchedule schedule =
        make_quench_schedule(settings.u_final, settings.tau_ramp, settings.duration, detuning);
    const InitialKind kind = mirror ? InitialKind::AllGround : InitialKind::AllExcited;
    states = evolve(prepare_initial_state(n, kind), rydberg_path(schedule, e.interactions),
                    cfg.gamma, run.tau, cfg.evolve);
  }

  const std::size_t m = run.tau.size();
  run.mbar.resize(m);
  run.z.resize(m);
  run.z_err.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd p = states[k].probabilities();
    double mbar = 0.0;
    double err = 0.0;
    if (cfg.noise.shots == 0) {
      mbar = z_observables(p, n).mean_magnetization;
    } else {
      const ShotEstimates est =
          estimate_observables(sample_bitstrings(p, n, cfg.noise, static_cast<std::uint64_t>(k)));
      mbar = est.mean_magnetization;
      err = est.mean_err;
    }
    run.mbar(k) = sign * mbar;
    run.z(k) = mbar * mbar;
    run.z_err(k) = 2.0 * std::abs(mbar) * err;
  }
  return run;
}

Spectrum fourier_spectrum(const std::vector<double>& tau, const Eigen::VectorXd& signal,
                          WindowKind window) {
  const int n = static_cast<int>(tau.size());
  if (n < 64) throw std::invalid_argument("spectrum needs at least 64 samples");
  if (signal.size() != n) throw std::invalid_argument("signal and time grid differ in length");
  const double dt = (tau.back() - tau.front()) / (n - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("time grid must be increasing");
  for (int k = 1; k < n; ++k) {
    if (std::abs(tau[k] - tau[k - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw std::invalid_argument("time grid is not uniform");
    }
  }

  std::vector<double> in(n);
  const double mean = signal.mean();
  double wsum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = window == WindowKind::Hann
                         ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / (n - 1)))
                         : 1.0;
    wsum += w;
    in[k] = w * (signal(k) - mean);
  }
  const int bins = n / 2 + 1;
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);

  Spectrum s;
  s.freq.resize(bins);
  s.omega.resize(bins);
  s.amplitude.resize(bins);
  const double df = 1.0 / (n * dt);
  s.bin_omega = 2.0 * std::numbers::pi * df;
  for (int k = 0; k < bins; ++k) {
    s.freq(k) = k * df;
    s.omega(k) = k * s.bin_omega;
    s.amplitude(k) = 2.0 * std::hypot(out[k][0], out[k][1]) / wsum;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(out);

  double best = 0.0;
  for (int k = 1; k < bins; ++k) {
    if (s.amplitude(k) > best) {
      best = s.amplitude(k);
      s.peak = k;
    }
  }
  if (s.peak < 0 || best <= 1e-14 * std::max(1.0, signal.cwiseAbs().maxCoeff())) {
    s.peak = -1;
    return s;
  }
  s.peak_omega = s.omega(s.peak);
  const double half = 0.5 * best;
  auto crossing = [&](int dir) {
    int k = s.peak;
    while (k + dir >= 0 && k + dir < bins && s.amplitude(k + dir) > half) k += dir;
    if (k + dir < 0 || k + dir >= bins) return s.omega(k);
    const double a = s.amplitude(k);
    const double b = s.amplitude(k + dir);
    return s.omega(k) + dir * s.bin_omega * (a - half) / (a - b);
  };
  s.peak_width = crossing(1) - crossing(-1);
  return s;
}

std::vector<int> find_peaks(const Spectrum& spectrum, double rel_threshold) {
  std::vector<int> peaks;
  if (spectrum.peak < 0) return peaks;
  const Eigen::VectorXd& a = spectrum.amplitude;
  const double floor = rel_threshold * a(spectrum.peak);
  const Eigen::Index bins = a.size();
  for (Eigen::Index k = 1; k < bins; ++k) {
    const bool left = a(k) > a(k - 1);
    const bool right = k + 1 == bins || a(k) >= a(k + 1);
    if (left && right && a(k) >= floor) peaks.push_back(static_cast<int>(k));
  }
  return peaks;
}

PeakEstimate refine_peak(const Spectrum& spectrum, int bin) {
  const Eigen::VectorXd& a = spectrum.amplitude;
  if (bin < 0 || bin >= a.size()) throw std::out_of_range("peak bin out of range");
  PeakEstimate est{bin, spectrum.omega(bin), a(bin)};
  if (bin == 0 || bin + 1 >= a.size()) return est;
  const double tiny = 1e-300;
  const double l = std::log(std::max(a(bin - 1), tiny));
  const double c = std::log(std::max(a(bin), tiny));
  const double r = std::log(std::max(a(bin + 1), tiny));
  const double curv = l - 2.0 * c + r;
  if (!(curv < 0.0)) return est;
  const double offset = std::clamp(0.5 * (l - r) / curv, -0.5, 0.5);
  est.omega = spectrum.omega(bin) + offset * spectrum.bin_omega;
  est.amplitude = std::exp(c - 0.25 * (l - r) * offset);
  return est;
}

PeakEstimate dominant_peak(const Spectrum& spectrum, int min_bin) {
  PeakEstimate best;
  for (int k : find_peaks(spectrum, 0.0)) {
    if (k < std::max(1, min_bin)) continue;
    if (best.bin < 0 || spectrum.amplitude(k) > spectrum.amplitude(best.bin)) best.bin = k;
  }
  return best.bin < 0 ? best : refine_peak(spectrum, best.bin);
}

DampingFit fit_damping(const std::vector<double>& tau, const Eigen::VectorXd& signal,
                       double tau_min) {
  DampingFit fit;
  const int n = static_cast<int>(tau.size());
  if (signal.size() != n || n < 5) {
    fit.message = "too few samples";
    return fit;
  }
  int first = 0;
  while (first < n && tau[first] < tau_min) ++first;
  const Eigen::VectorXd tail = signal.tail(n - first);
  const Eigen::VectorXd dev = (tail.array() - tail.mean()).abs();
  const double scale = dev.maxCoeff();
  if (scale <= 1e-12) {
    fit.message = "no oscillation";
    return fit;
  }
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 1; k + 1 < dev.size(); ++k) {
    if (dev(k) > dev(k - 1) && dev(k) >= dev(k + 1) && dev(k) > 1e-9 * scale) {
      x.push_back(tau[first + k]);
      y.push_back(std::log(dev(k)));
    }
  }
  fit.peaks = static_cast<int>(x.size());
  if (fit.peaks < 3) {
    fit.message = "fewer than 3 envelope maxima";
    return fit;
  }
  const int m = fit.peaks;
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    rss += r * r;
  }
  fit.rate = -slope;
  fit.rate_err = m > 2 ? std::sqrt(rss / (m - 2) / sxx) : 0.0;
  fit.ok = true;
  return fit;
}

}  // namespace slavespin
