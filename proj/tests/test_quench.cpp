#include "quench_oracle.hpp"

#include "slavespin/quench.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace slavespin;

namespace {

constexpr double kT = 2.0 * std::numbers::pi * 0.25;

Eigen::VectorXd tone(const std::vector<double>& tau, double amp, double omega, double rate = 0.0) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(tau.size()));
  for (std::size_t k = 0; k < tau.size(); ++k) {
    x(static_cast<Eigen::Index>(k)) = amp * std::exp(-rate * tau[k]) * std::cos(omega * tau[k]);
  }
  return x;
}

QuenchRun exact_quench(int nx, int ny, double u_final) {
  const ClusterSpec c(nx, ny);
  const SpinBackend b(BackendConfig::preset(BackendKind::Exact), c);
  QuenchSettings s;
  s.u_final = u_final;
  return run_quench(build_hopping(c, kT), b, s);
}

oracle::Decomposition reference(int nx, int ny, double u_final) {
  const ClusterSpec c(nx, ny);
  const SpinCoupling sc = frozen_coupling(build_hopping(c, kT));
  const Eigen::VectorXd field = mean_field(external_neighbor_counts(c), sc.mean_bond, 1.0);
  const IsingHamiltonian h = build_cluster_hamiltonian(sc.j, u_final, field);
  const QuantumState start = prepare_initial_state(c.size(), InitialKind::AllExcited);
  return oracle::decompose(h, start.vector());
}

}  // namespace

TEST_CASE("time grid") {
  const std::vector<double> tau = uniform_grid(4.0, 400);
  CHECK(tau.size() == 401);
  CHECK(tau.front() == 0.0);
  CHECK(tau.back() == 4.0);
  CHECK(tau[200] == doctest::Approx(2.0));
  CHECK_THROWS(uniform_grid(0.0, 10));
  CHECK_THROWS(uniform_grid(1.0, 0));
}

TEST_CASE("frozen couplings are the U = 0 solution") {
  const ClusterSpec c(2, 3);
  const SpinCoupling sc = frozen_coupling(build_hopping(c, kT));
  CHECK(sc.mean_bond < 0.0);
  CHECK((sc.j - sc.j.transpose()).norm() < 1e-12);
}

TEST_CASE("no quench leaves Z at 1") {
  const QuenchRun run = exact_quench(2, 2, 0.0);
  // the polarised state is an eigenstate; only integrator error remains
  CHECK((run.z.array() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK(fourier_spectrum(run.tau, run.z).amplitude.maxCoeff() < 1e-8);
}

TEST_CASE("constant trace has no peak") {
  const std::vector<double> tau = uniform_grid(4.0, 400);
  const Spectrum s = fourier_spectrum(tau, Eigen::VectorXd::Constant(401, 0.7));
  CHECK(s.peak == -1);
  CHECK(find_peaks(s).empty());
  CHECK(dominant_peak(s).bin == -1);
}

TEST_CASE("invalid quench settings") {
  const ClusterSpec c(2, 2);
  const SpinBackend b(BackendConfig::preset(BackendKind::Exact), c);
  QuenchSettings s;
  s.u_final = -1.0;
  CHECK_THROWS(run_quench(build_hopping(c, kT), b, s));
  s.u_final = 5.0;
  s.tau_ramp = 4.0;
  CHECK_THROWS(run_quench(build_hopping(c, kT), b, s));
}

TEST_CASE("spectrum of synthetic tones") {
  const std::vector<double> tau = uniform_grid(4.0, 400);
  const double bin = 2.0 * std::numbers::pi / 4.0;

  SUBCASE("on-bin tone, rectangular window recovers the amplitude") {
    const Spectrum s = fourier_spectrum(tau, tone(tau, 0.3, 8.0 * bin), WindowKind::Rectangular);
    CHECK(s.peak == 8);
    CHECK(s.amplitude(8) == doctest::Approx(0.3).epsilon(0.02));
  }
  SUBCASE("off-bin tone, refined peak") {
    const double omega = 10.4;
    const Spectrum s = fourier_spectrum(tau, tone(tau, 0.3, omega));
    CHECK(std::abs(s.peak_omega - omega) <= s.bin_omega);
    const PeakEstimate p = dominant_peak(s);
    CHECK(std::abs(p.omega - omega) < 0.1 * s.bin_omega);
    CHECK(p.amplitude == doctest::Approx(0.3).epsilon(0.05));
    CHECK(s.peak_width > s.bin_omega);
  }
  SUBCASE("two tones are both detected") {
    const Eigen::VectorXd x = tone(tau, 0.3, 10.0) + tone(tau, 0.1, 30.0);
    const Spectrum s = fourier_spectrum(tau, x);
    const std::vector<int> peaks = find_peaks(s);
    REQUIRE(peaks.size() == 2);
    CHECK(std::abs(s.omega(peaks[0]) - 10.0) <= s.bin_omega);
    CHECK(std::abs(s.omega(peaks[1]) - 30.0) <= s.bin_omega);
  }
  SUBCASE("slow drift is kept out of the dominant peak") {
    Eigen::VectorXd x = tone(tau, 0.1, 20.0);
    for (std::size_t k = 0; k < tau.size(); ++k) x(static_cast<Eigen::Index>(k)) += 0.5 * tau[k];
    const Spectrum s = fourier_spectrum(tau, x);
    CHECK(s.peak == 1);
    CHECK(std::abs(dominant_peak(s).omega - 20.0) < s.bin_omega);
  }
}

TEST_CASE("spectrum input validation") {
  const std::vector<double> short_grid = uniform_grid(1.0, 40);
  CHECK_THROWS(fourier_spectrum(short_grid, Eigen::VectorXd::Zero(41)));
  std::vector<double> tau = uniform_grid(4.0, 100);
  CHECK_THROWS(fourier_spectrum(tau, Eigen::VectorXd::Zero(50)));
  tau[30] += 0.01;
  CHECK_THROWS(fourier_spectrum(tau, Eigen::VectorXd::Zero(101)));
}

TEST_CASE("damping fit on synthetic signals") {
  const std::vector<double> tau = uniform_grid(4.0, 400);
  const DampingFit damped = fit_damping(tau, tone(tau, 0.4, 12.0, 0.5));
  REQUIRE(damped.ok);
  CHECK(damped.rate == doctest::Approx(0.5).epsilon(0.05));
  const DampingFit steady = fit_damping(tau, tone(tau, 0.4, 12.0));
  REQUIRE(steady.ok);
  CHECK(std::abs(steady.rate) < 0.01);
  CHECK_FALSE(fit_damping(tau, tone(tau, 0.4, 2.0)).ok);
  CHECK_FALSE(fit_damping(tau, Eigen::VectorXd::Constant(401, 0.3)).ok);
}

TEST_CASE("propagated quench matches the spectral decomposition") {
  for (auto [nx, ny] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{2, 3}}) {
    for (double u : {5.0, 13.0, 25.0}) {
      CAPTURE(nx * ny);
      CAPTURE(u);
      const QuenchRun run = exact_quench(nx, ny, u);
      const Eigen::VectorXd m = oracle::mbar_trace(reference(nx, ny, u), run.tau);
      CHECK((run.mbar - m).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((run.z - m.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("spectral peaks sit on eigenenergy differences") {
  for (auto [nx, ny] : {std::pair{2, 2}, std::pair{2, 3}}) {
    for (double u : {5.0, 13.0, 25.0}) {
      CAPTURE(nx * ny);
      CAPTURE(u);
      const QuenchRun run = exact_quench(nx, ny, u);
      const oracle::Decomposition d = reference(nx, ny, u);
      const std::vector<double> all = oracle::eigen_differences(d.energies);
      const Spectrum z = fourier_spectrum(run.tau, run.z);
      for (int k : find_peaks(z)) CHECK(oracle::near_any(z.omega(k), all, z.bin_omega));
      // the magnetisation is linear in the state, so its peaks must sit on
      // transitions it actually populates
      const std::vector<double> populated = oracle::populated_transitions(d, 1e-3);
      const Spectrum m = fourier_spectrum(run.tau, run.mbar);
      for (int k : find_peaks(m)) CHECK(oracle::near_any(m.omega(k), populated, m.bin_omega));
    }
  }
}

TEST_CASE("slow switch-on shifts the frequency more than the default ramp") {
  const ClusterSpec c(2, 2);
  const SpinBackend b(BackendConfig::preset(BackendKind::AnnealNoiseless), c);
  const Eigen::MatrixXd t = build_hopping(c, kT);
  auto peak = [&](double ramp) {
    QuenchSettings s;
    s.u_final = 13.0;
    s.tau_ramp = ramp;
    s.ideal_spin_dynamics = false;
    const QuenchRun run = run_quench(t, b, s);
    return dominant_peak(fourier_spectrum(run.tau, run.z)).omega;
  };
  const double sudden = peak(0.0);
  const double fast = std::abs(peak(0.05) - sudden);
  const double slow = std::abs(peak(0.3) - sudden);
  CHECK(fast < 0.02 * sudden);
  CHECK(slow > fast);
}

TEST_CASE("register quench follows the ideal spin dynamics") {
  const ClusterSpec c(2, 2);
  const SpinBackend b(BackendConfig::preset(BackendKind::AnnealNoiseless), c);
  QuenchSettings s;
  s.u_final = 13.0;
  s.tau_ramp = 0.0;
  s.ideal_spin_dynamics = false;
  const QuenchRun reg = run_quench(build_hopping(c, kT), b, s);
  const QuenchRun ideal = exact_quench(2, 2, 13.0);
  CHECK((reg.z - ideal.z).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("noisy quench is reproducible per seed") {
  const ClusterSpec c(2, 2);
  auto run = [&](std::uint64_t seed) {
    const SpinBackend b(BackendConfig::preset(BackendKind::AnnealNoisy, {150, 0.03, 0.03, seed}, 0.02), c);
    QuenchSettings s;
    s.u_final = 13.0;
    s.samples = 100;
    s.ideal_spin_dynamics = false;
    return run_quench(build_hopping(c, kT), b, s);
  };
  const QuenchRun a = run(3);
  const QuenchRun b = run(3);
  const QuenchRun other = run(4);
  CHECK(a.z == b.z);
  CHECK(a.z != other.z);
  CHECK((a.z_err.array() >= 0.0).all());
  CHECK(a.z_err.maxCoeff() > 0.0);
}
