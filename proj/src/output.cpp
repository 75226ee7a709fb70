#include "slavespin/output.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <fstream>
#include <stdexcept>

namespace slavespin {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::ofstream open_csv(const std::string& path, const RunConfig& config,
                       const std::string& workflow) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_config_echo(os, config, workflow);
  return os;
}

double spectral_axis(const RunConfig& config, const Spectrum& s, Eigen::Index k) {
  return config.angular ? s.omega(k) : s.freq(k);
}

}  // namespace

void write_config_echo(std::ostream& os, const RunConfig& config, const std::string& workflow) {
  os << "# workflow = " << workflow << '\n';
  for (const auto& [key, value] : config.echo()) os << "# " << key << " = " << value << '\n';
}

void write_z_vs_u(const std::string& path, const RunConfig& config,
                  const std::vector<ScfRecord>& records) {
  std::ofstream os = open_csv(path, config, "equilibrium");
  os << "U,Z,Z_std_err,m_bar,converged,outer_iters,inner_iters_total\n";
  for (const ScfRecord& r : records) {
    os << num(config.energy_to_config(r.u)) << ',' << num(r.z) << ',' << num(r.z_err) << ','
       << num(r.mbar) << ',' << (r.converged ? 1 : 0) << ',' << r.outer_iterations << ','
       << r.inner_iterations_total << '\n';
  }
}

void write_site_z(const std::string& path, const RunConfig& config,
                  const std::vector<ScfRecord>& records) {
  std::ofstream os = open_csv(path, config, "equilibrium");
  os << "U,site,m_i,Z_i,Z_i_err\n";
  for (const ScfRecord& r : records) {
    for (Eigen::Index i = 0; i < r.magnetization.size(); ++i) {
      const double m = r.magnetization(i);
      const double err = r.magnetization_err.size() ? r.magnetization_err(i) : 0.0;
      os << num(config.energy_to_config(r.u)) << ',' << i << ',' << num(m) << ',' << num(m * m)
         << ',' << num(2.0 * std::abs(m) * err) << '\n';
    }
  }
}

void write_scf_log(const std::string& path, const RunConfig& config, const ScfRecord& record) {
  std::ofstream os = open_csv(path, config, "equilibrium");
  os << "# U = " << num(config.energy_to_config(record.u)) << '\n';
  if (!record.error.empty()) os << "# error = " << record.error << '\n';
  os << "outer,inner,m_bar,delta_m,delta_q,Z\n";
  for (std::size_t l = 0; l < record.steps.size(); ++l) {
    const OuterStep& s = record.steps[l];
    for (std::size_t i = 0; i < s.inner.size(); ++i) {
      const double m = s.inner[i].mbar;
      const bool last = i + 1 == s.inner.size();
      os << l + 1 << ',' << i + 1 << ',' << num(m) << ',' << num(s.inner[i].delta_m) << ','
         << (last ? num(s.q_delta) : std::string()) << ',' << num(m * m)
         << '\n';
    }
  }
}

void write_trace(const std::string& path, const RunConfig& config, const QuenchRun& run) {
  std::ofstream os = open_csv(path, config, "quench");
  os << "# U_f = " << num(config.energy_to_config(run.u_final)) << '\n';
  os << "tau_us,Z,Z_std_err\n";
  for (std::size_t k = 0; k < run.tau.size(); ++k) {
    os << num(run.tau[k]) << ',' << num(run.z(k)) << ',' << num(run.z_err(k)) << '\n';
  }
}

void write_spectrum(const std::string& path, const RunConfig& config, const Spectrum& s) {
  std::ofstream os = open_csv(path, config, "quench");
  os << "freq,amplitude\n";
  for (Eigen::Index k = 0; k < s.amplitude.size(); ++k) {
    os << num(spectral_axis(config, s, k)) << ',' << num(s.amplitude(k)) << '\n';
  }
}

void write_spectrum_map(const std::string& path, const RunConfig& config,
                        const std::vector<QuenchRun>& runs, const std::vector<Spectrum>& spectra) {
  std::ofstream os = open_csv(path, config, "quench");
  os << "U_f,freq,amplitude\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Spectrum& s = spectra[r];
    for (Eigen::Index k = 0; k < s.amplitude.size(); ++k) {
      os << num(config.energy_to_config(runs[r].u_final)) << ',' << num(spectral_axis(config, s, k))
         << ',' << num(s.amplitude(k)) << '\n';
    }
  }
}

void write_quench_summary(const std::string& path, const RunConfig& config,
                          const std::vector<QuenchRun>& runs, const std::vector<Spectrum>& spectra,
                          const std::vector<DampingFit>& fits) {
  std::ofstream os = open_csv(path, config, "quench");
  const double scale = config.angular ? 1.0 : 1.0 / (2.0 * std::numbers::pi);
  os << "U_f,peak_freq,peak_width,dominant_freq,dominant_amplitude,damping_rate,damping_rate_err,"
        "fit_ok\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Spectrum& s = spectra[r];
    const PeakEstimate d = dominant_peak(s);
    os << num(config.energy_to_config(runs[r].u_final)) << ','
       << num(s.peak >= 0 ? spectral_axis(config, s, s.peak) : 0.0) << ','
       << num(s.peak_width * scale) << ',' << num(d.omega * scale) << ',' << num(d.amplitude)
       << ',' << num(fits[r].rate) << ',' << num(fits[r].rate_err)
       << ',' << (fits[r].ok ? 1 : 0) << '\n';
  }
}

void write_positions(const std::string& path, const RunConfig& config, const AtomArray& array) {
  std::ofstream os = open_csv(path, config, "geometry");
  os << "site_index,x_um,y_um\n";
  for (int i = 0; i < array.size(); ++i) {
    os << i << ',' << num(array.positions[i].x()) << ',' << num(array.positions[i].y()) << '\n';
  }
}

void write_geometry_summary(const std::string& path, const RunConfig& config,
                            const GeometryResult& result) {
  std::ofstream os = open_csv(path, config, "geometry");
  os << "D_before,D_after,iterations,converged,line_search_failed\n";
  os << num(config.energy_to_config(result.initial_cost)) << ','
     << num(config.energy_to_config(result.final_cost)) << ',' << result.iterations << ','
     << (result.converged ? 1 : 0) << ',' << (result.line_search_failed ? 1 : 0) << '\n';
}

void write_cost_history(const std::string& path, const RunConfig& config,
                        const GeometryResult& result) {
  std::ofstream os = open_csv(path, config, "geometry");
  os << "step,D\n";
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    os << i << ',' << num(config.energy_to_config(result.history[i])) << '\n';
  }
}

}  // namespace slavespin
