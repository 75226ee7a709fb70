#include "slavespin/fermions.hpp"
#include "slavespin/lattice.hpp"
#include "slavespin/rydberg.hpp"
#include "slavespin/spins.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace slavespin;

namespace {

constexpr double kPi = std::numbers::pi;

// diag(prod_i S^z_i): maps S^x -> -S^x and leaves z-diagonal terms alone.
Eigen::MatrixXd parity_gauge(int sites) {
  const int dim = 1 << sites;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double p = 1.0;
    for (int i = 0; i < sites; ++i) p *= sz_value(b, i);
    g(b, b) = p;
  }
  return g;
}

struct PlaquetteProblem {
  ClusterSpec cluster{2, 2};
  std::vector<int> z = external_neighbor_counts(cluster);
  Eigen::MatrixXd j;
  double mean_bond = 0.0;
  Eigen::MatrixXd v;
};

PlaquetteProblem plaquette(double t_hop) {
  PlaquetteProblem p;
  const Eigen::MatrixXd t = build_hopping(p.cluster, t_hop);
  const SpinCoupling c = build_coupling(t, solve_density_matrix(t));
  p.j = c.j;
  p.mean_bond = c.mean_bond;
  p.v = -4.0 * c.j;
  return p;
}

}  // namespace

TEST_CASE("single atom with detuning only") {
  const IsingHamiltonian h =
      build_rydberg_hamiltonian(Eigen::MatrixXd::Zero(1, 1), 0.0, Eigen::VectorXd::Constant(1, 2.5));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  expected(1, 1) = -2.5;
  CHECK(h.dense().isApprox(expected));
}

TEST_CASE("two atoms: blockade energy and full drive") {
  AtomArray a;
  a.c6 = 100.0;
  a.positions = {{0.0, 0.0}, {2.0, 0.0}};
  const double v = 100.0 / 64.0;
  const IsingHamiltonian bare = build_rydberg_hamiltonian(a, 0.0, Eigen::VectorXd::Zero(2));
  CHECK(bare.diagonal(3) == doctest::Approx(v));
  CHECK(bare.diagonal.head(3).isZero());

  const double omega = 1.3;
  Eigen::VectorXd delta(2);
  delta << 0.4, -0.7;
  const IsingHamiltonian h = build_rydberg_hamiltonian(a, omega, delta);
  // basis |g g>, |r g>, |g r>, |r r> (bit i = site i)
  Eigen::MatrixXd expected(4, 4);
  const double x = omega / 2;
  expected << 0, x, x, 0,
              x, -0.4, 0, x,
              x, 0, 0.7, x,
              0, x, x, v - 0.4 + 0.7;
  CHECK(h.dense().isApprox(expected, 1e-12));
}

TEST_CASE("interaction matrix rejects coincident atoms") {
  AtomArray a;
  a.c6 = 1.0;
  a.positions = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(interaction_matrix(a), std::invalid_argument);
  a.positions = {{0.0, 0.0}, {std::nan(""), 1.0}};
  CHECK_THROWS_AS(interaction_matrix(a), std::invalid_argument);
}

TEST_CASE("final anneal Hamiltonian equals -H_s up to a constant (fixes the detuning sign)") {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(0, 1) = j(1, 0) = -0.9;
  const std::vector<int> z = {3, 3};
  const double mean_bond = -0.9;
  const double mbar = 0.37;
  const double u = 2.2;
  const Eigen::MatrixXd v = -4.0 * j;
  const IsingHamiltonian hs = build_cluster_hamiltonian(j, u, mean_field(z, mean_bond, mbar));

  const DriveSchedule s = make_anneal_schedule(u, mean_bond, mbar, z, v, 4.0, kDefaultDeltaStart);
  Eigen::VectorXd delta(2);
  for (int i = 0; i < 2; ++i) delta(i) = s.detuning[i](s.duration);
  const IsingHamiltonian hr = build_rydberg_hamiltonian(v, s.rabi(s.duration), delta);

  const Eigen::MatrixXd g = parity_gauge(2);
  const Eigen::MatrixXd sum = g * hr.dense() * g + hs.dense();
  CHECK((sum - sum(0, 0) * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);

  const Eigen::VectorXd er = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hr.dense()).eigenvalues();
  const Eigen::VectorXd es = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hs.dense()).eigenvalues();
  for (int k = 0; k < 4; ++k) CHECK(er(k) + es(3 - k) == doctest::Approx(sum(0, 0)).epsilon(1e-9));

  // The opposite sign of the mean-field term does not give the mapping.
  Eigen::VectorXd wrong = delta;
  for (int i = 0; i < 2; ++i) wrong(i) -= 8.0 * mean_bond * mbar * z[i];
  const Eigen::MatrixXd bad =
      g * build_rydberg_hamiltonian(v, u / 2, wrong).dense() * g + hs.dense();
  CHECK((bad - bad(0, 0) * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("anneal schedule endpoints") {
  const PlaquetteProblem p = plaquette(1.0);
  const DriveSchedule s = make_anneal_schedule(6.0, p.mean_bond, 0.3, p.z, p.v, 4.0, 31.4);
  CHECK(s.rabi(0.0) == 0.0);
  CHECK(s.rabi(4.0) == doctest::Approx(3.0));
  CHECK(s.detuning[0](0.0) == doctest::Approx(31.4));
  const Eigen::VectorXd comp = compensating_detunings(p.v, p.z, p.mean_bond, 0.3);
  for (int i = 0; i < 4; ++i) CHECK(s.detuning[i](4.0) == doctest::Approx(comp(i)));
  CHECK_NOTHROW(s.validate(4));

  // isolated atom: no interactions, z = 4
  const DriveSchedule iso =
      make_anneal_schedule(1.0, -0.5, 0.2, {4}, Eigen::MatrixXd::Zero(1, 1), 4.0, 10.0);
  CHECK(iso.detuning[0](4.0) == doctest::Approx(4.0 * -0.5 * 0.2 * 4));
}

TEST_CASE("quench schedule") {
  const DriveSchedule step = make_quench_schedule(13.0, 0.0, 4.0, Eigen::VectorXd::Zero(3));
  CHECK(step.rabi(0.0) == doctest::Approx(6.5));
  const DriveSchedule ramp = make_quench_schedule(13.0, 0.05, 4.0, Eigen::VectorXd::Zero(3));
  CHECK(ramp.rabi(0.025) == doctest::Approx(13.0 / 4));
  CHECK(ramp.rabi(2.0) == doctest::Approx(6.5));
  CHECK_THROWS_AS(make_quench_schedule(13.0, 4.0, 4.0, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("waveform and schedule validation") {
  CHECK_THROWS_AS(Waveform({0.0, 2.0, 1.0}, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Waveform({0.5, 1.0}, {0, 0}), std::invalid_argument);
  DriveSchedule s = make_quench_schedule(1.0, 0.1, 1.0, Eigen::VectorXd::Zero(2));
  CHECK_THROWS_AS(s.validate(3), std::invalid_argument);
  s.rabi = Waveform({0.0, 1.0}, {0.0, -1.0});
  CHECK_THROWS_AS(s.validate(2), std::invalid_argument);
}

TEST_CASE("initial product states") {
  const QuantumState g = prepare_initial_state(2, InitialKind::AllGround);
  CHECK(std::abs(g.vector()(0) - 1.0) < 1e-15);
  const QuantumState r = prepare_initial_state(2, InitialKind::AllExcited);
  CHECK(std::abs(r.vector()(3) - 1.0) < 1e-15);
  const QuantumState c = prepare_initial_state(1, InitialKind::CustomProduct, {Eigen::Vector2cd(3.0, 4.0)});
  CHECK(std::abs(c.vector()(0) - 0.6) < 1e-15);
  CHECK(std::abs(c.vector()(1) - 0.8) < 1e-15);
}

TEST_CASE("Rabi oscillation of a single atom") {
  const double omega = 2.0 * kPi * 1.3;
  const IsingHamiltonian h = build_rydberg_hamiltonian(Eigen::MatrixXd::Zero(1, 1), omega, Eigen::VectorXd::Zero(1));
  const double period = 2.0 * kPi / omega;
  const std::vector<double> times = {0.1 * period, 0.25 * period, 0.5 * period, period, 2.5 * period};
  const auto states = evolve(prepare_initial_state(1, InitialKind::AllGround), constant_path(h), 0.0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = std::pow(std::sin(omega * times[k] / 2.0), 2);
    CHECK(std::abs(states[k].probabilities()(1) - expected) < 1e-6);
  }
  CHECK(states[3].probabilities()(1) < 1e-6);
}

TEST_CASE("pure dephasing of a coherence") {
  const double gamma = 0.7;
  const IsingHamiltonian h = build_rydberg_hamiltonian(Eigen::MatrixXd::Zero(1, 1), 0.0, Eigen::VectorXd::Zero(1));
  const QuantumState plus =
      prepare_initial_state(1, InitialKind::CustomProduct, {Eigen::Vector2cd(1.0, 1.0)});
  const std::vector<double> times = {0.5, 1.0, 3.0};
  const auto states = evolve(plus, constant_path(h), gamma, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(std::abs(states[k].density()(0, 1)) - 0.5 * std::exp(-gamma * times[k] / 2)) < 1e-6);
    CHECK(std::abs(states[k].density()(0, 0).real() - 0.5) < 1e-12);
  }
}

TEST_CASE("dark state under dephasing") {
  AtomArray a;
  a.c6 = 50.0;
  a.positions = {{0, 0}, {1.5, 0}, {0, 1.5}};
  DriveSchedule s = make_quench_schedule(0.0, 0.0, 2.0, Eigen::VectorXd::Zero(3));
  const auto out = evolve(prepare_initial_state(3, InitialKind::AllGround), s, a, 0.3, {0.5, 2.0});
  for (const auto& st : out) CHECK(std::abs(st.density()(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("density-matrix and pure propagation agree without dephasing") {
  const PlaquetteProblem p = plaquette(1.0);
  const DriveSchedule s = make_anneal_schedule(5.0, p.mean_bond, -0.4, p.z, p.v, 1.0, kDefaultDeltaStart);
  const HamiltonianPath path = rydberg_path(s, p.v);
  const QuantumState start = prepare_initial_state(4, InitialKind::AllGround);
  const auto pure = evolve(start, path, 0.0, {0.3, 1.0});
  const auto mixed = evolve(start.to_density(), path, 0.0, {0.3, 1.0});
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXcd& psi = pure[k].vector();
    const Eigen::MatrixXcd proj = psi * psi.adjoint();
    CHECK((proj - mixed[k].density()).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(std::abs(psi.squaredNorm() - 1.0) < 1e-8);
  }
}

TEST_CASE("energy is conserved for a static Hamiltonian") {
  const PlaquetteProblem p = plaquette(1.0);
  const IsingHamiltonian h = build_cluster_hamiltonian(p.j, 7.0, mean_field(p.z, p.mean_bond, 1.0));
  const QuantumState start = prepare_initial_state(4, InitialKind::AllExcited);
  const double e0 = h.expectation(start.vector());
  const auto out = evolve(start, constant_path(h), 0.0, {1.0, 2.0, 4.0});
  for (const auto& st : out) CHECK(std::abs(h.expectation(st.vector()) - e0) <= 1e-7 * h.norm_bound());
}

TEST_CASE("invariants hold along a dephased anneal") {
  const PlaquetteProblem p = plaquette(1.0);
  const DriveSchedule s = make_anneal_schedule(8.0, p.mean_bond, -0.4, p.z, p.v, 4.0, kDefaultDeltaStart);
  const auto out = evolve(prepare_initial_state(4, InitialKind::AllGround), rydberg_path(s, p.v), 0.1,
                          {0.5, 1.0, 2.0, 3.0, 4.0});
  for (const auto& st : out) {
    const auto d = st.diagnostics();
    CHECK(d.trace_error <= 1e-8);
    CHECK(d.hermiticity <= 1e-10);
    CHECK(d.min_eigenvalue >= -1e-8);
  }
}

TEST_CASE("evolution failures are reported") {
  const IsingHamiltonian h = build_rydberg_hamiltonian(Eigen::MatrixXd::Zero(1, 1), 3.0, Eigen::VectorXd::Zero(1));
  // A drive far too fast for the smallest allowed step.
  const IsingHamiltonian stiff =
      build_rydberg_hamiltonian(Eigen::MatrixXd::Zero(1, 1), 1e5, Eigen::VectorXd::Zero(1));
  EvolveOptions coarse;
  coarse.min_step = 1e-4;
  CHECK_THROWS_AS(evolve(prepare_initial_state(1, InitialKind::AllGround), constant_path(stiff), 0.0, {1.0}, coarse),
                  EvolutionError);
  EvolveOptions strict;
  strict.trace_tolerance = -1.0;
  CHECK_THROWS_AS(evolve(prepare_initial_state(1, InitialKind::AllGround), constant_path(h), 0.2, {0.1}, strict),
                  EvolutionError);
  CHECK_THROWS_AS(evolve(prepare_initial_state(1, InitialKind::AllGround), constant_path(h), -1.0, {0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(prepare_initial_state(1, InitialKind::AllGround), constant_path(h), 0.0, {0.2, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("anneal reaches the target state and its magnetisation") {
  const PlaquetteProblem p = plaquette(2.0 * kPi * 0.25);
  // mbar < 0 with Jbar < 0: the field favours S^z = -1, the branch of |g...g>.
  const double mbar = -0.5;
  for (double u : {2.0, 8.0, 16.0, 24.0}) {
    const DriveSchedule s = make_anneal_schedule(u, p.mean_bond, mbar, p.z, p.v);
    const auto out = evolve(prepare_initial_state(4, InitialKind::AllGround), rydberg_path(s, p.v), 0.0, {s.duration});
    const Eigen::VectorXcd& psi = out.back().vector();

    IsingHamiltonian final_h;
    rydberg_path(s, p.v)(s.duration, final_h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(final_h.dense());
    const Eigen::VectorXd top = es.eigenvectors().col(15);
    const double fidelity = std::norm(top.cast<std::complex<double>>().dot(psi));
    CHECK(fidelity >= 0.9);

    const SpinSolution gs = ground_state(build_cluster_hamiltonian(p.j, u, mean_field(p.z, p.mean_bond, mbar)));
    const double annealed = z_observables(out.back().probabilities(), 4).mean_magnetization;
    CHECK(std::abs(annealed - gs.observables.mean_magnetization) <= 0.05);
  }
}

TEST_CASE("anneal time plateau beyond 3 us") {
  const PlaquetteProblem p = plaquette(2.0 * kPi * 0.25);
  for (double u : {6.0, 14.0}) {
    double m[2];
    int k = 0;
    for (double tmax : {3.0, 4.0}) {
      const DriveSchedule s = make_anneal_schedule(u, p.mean_bond, -0.5, p.z, p.v, tmax);
      const auto out = evolve(prepare_initial_state(4, InitialKind::AllGround), rydberg_path(s, p.v), 0.0, {tmax});
      m[k++] = z_observables(out.back().probabilities(), 4).mean_magnetization;
    }
    CHECK(std::abs(m[0] - m[1]) <= 0.02);
  }
}
