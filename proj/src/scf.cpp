#include "slavespin/scf.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>

namespace slavespin {

void ScfConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("scf.eta must be positive");
  if (k < 1) throw std::invalid_argument("scf.k must be at least 1");
  if (!(m0 > 0.0 && m0 <= 1.0)) throw std::invalid_argument("scf.m0 must lie in (0, 1]");
  if (!(q_unit > 0.0)) throw std::invalid_argument("Q unit must be positive");
}

namespace {

// Streams are addressed by (sweep point, outer step, inner step).
std::uint64_t stream_id(std::uint64_t base, int outer, int inner) {
  return (base << 20) | (static_cast<std::uint64_t>(outer) << 10) | static_cast<std::uint64_t>(inner);
}

}  // namespace

InnerResult inner_loop(const SpinBackend& backend, const Embedding& embedding, double u,
                       double m_start, const ScfConfig& config, std::uint64_t stream_base) {
  InnerResult r;
  double mbar = m_start;
  for (int l = 0; l < config.k; ++l) {
    r.measurement = backend.solve(embedding, u, mbar, stream_base + static_cast<std::uint64_t>(l));
    const double next = r.measurement.observables.mean_magnetization;
    const double delta = std::abs(next - mbar);
    r.steps.push_back({next, delta});
    mbar = next;
    if (delta < config.eta) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ScfRecord outer_loop(const Eigen::MatrixXd& hopping, double u, const SpinBackend& backend,
                     const ScfConfig& config, std::uint64_t stream_base) {
  config.validate();
  ScfRecord rec;
  rec.u = u;
  rec.q = hopping;  // <S^z S^z> = 1 on every bond
  double m_start = config.m0;
  try {
    for (int l = 0; l < config.k; ++l) {
      rec.g = solve_density_matrix(rec.q);
      const SpinCoupling coupling = build_coupling(hopping, rec.g);
      rec.j = coupling.j;
      rec.mean_bond = config.mean_bond_override.value_or(coupling.mean_bond);
      const Embedding embedding = backend.embed(coupling.j, rec.mean_bond);

      const InnerResult inner =
          inner_loop(backend, embedding, u, m_start, config, stream_id(stream_base, l, 0));
      const SpinMeasurement& m = inner.measurement;

      const Eigen::MatrixXd q_next = hopping.cwiseProduct(m.observables.correlation);
      OuterStep step;
      step.q_delta = (q_next - rec.q).norm() / config.q_unit;
      step.mbar = m.observables.mean_magnetization;
      step.z = step.mbar * step.mbar;
      step.inner_converged = inner.converged;
      step.inner = inner.steps;
      rec.steps.push_back(step);
      rec.q = q_next;

      rec.outer_iterations = l + 1;
      rec.inner_iterations_total += static_cast<int>(inner.steps.size());
      rec.mbar = step.mbar;
      rec.mbar_err = m.mean_err;
      rec.magnetization = m.observables.magnetization;
      rec.magnetization_err = m.magnetization_err;
      rec.correlation = m.observables.correlation;
      rec.degenerate = rec.degenerate || m.degenerate;
      if (config.warm_start) m_start = step.mbar;

      if (step.q_delta < config.eta && inner.converged) {
        rec.converged = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.converged = false;
  }
  rec.z = rec.mbar * rec.mbar;
  rec.z_err = 2.0 * std::abs(rec.mbar) * rec.mbar_err;
  return rec;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ScfRecord> sweep_equilibrium(const Eigen::MatrixXd& hopping,
                                         const std::vector<double>& us,
                                         const SpinBackend& backend, const ScfConfig& config,
                                         int jobs) {
  if (us.empty()) throw std::invalid_argument("empty U list");
  config.validate();
  std::vector<ScfRecord> out(us.size());
  parallel_for(static_cast<int>(us.size()), jobs, [&](int i) {
    out[i] = outer_loop(hopping, us[i], backend, config, static_cast<std::uint64_t>(i));
  });
  return out;
}

}  // namespace slavespin
