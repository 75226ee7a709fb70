#include "slavespin/backend.hpp"
#include "slavespin/config.hpp"
#include "slavespin/geometry.hpp"
#include "slavespin/lattice.hpp"
#include "slavespin/output.hpp"
#include "slavespin/quench.hpp"
#include "slavespin/scf.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace slavespin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnconverged = 2;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<int> jobs;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Config file (key = value)")->required();
  cmd->add_option("--out", f.out, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", f.seed, "RNG seed (overrides noise.seed)");
  cmd->add_option("--backend", f.backend, "exact | anneal-noiseless | anneal-noisy");
  cmd->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Flags& f, Workflow workflow) {
  KeyValueFile file = KeyValueFile::load(f.config);
  if (f.backend) {
    if (!parse_backend(*f.backend)) {
      throw ConfigError("unknown backend '" + *f.backend + "'; valid backends: " +
                        valid_backend_names());
    }
    file.set("backend", *f.backend);
  }
  if (f.seed) file.set("noise.seed", std::to_string(*f.seed));
  if (f.jobs) file.set("jobs", std::to_string(*f.jobs));
  if (f.out) file.set("output.dir", *f.out);
  return load_run_config(file, workflow);
}

fs::path prepare_dir(const RunConfig& c) {
  fs::path dir(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

std::string indexed(const std::string& stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu.csv", i);
  return stem + buf;
}

int cmd_equilibrium(const RunConfig& c) {
  const ClusterSpec cluster = c.cluster();
  const Eigen::MatrixXd t = build_hopping(cluster, c.hopping());
  const SpinBackend backend(c.backend_config(), cluster);
  std::vector<double> us;
  for (double u : c.u_mhz) us.push_back(c.energy(u));

  const std::vector<ScfRecord> records = sweep_equilibrium(t, us, backend, c.scf_config(), c.jobs);

  const fs::path dir = prepare_dir(c);
  write_z_vs_u((dir / "z_vs_u.csv").string(), c, records);
  write_site_z((dir / "site_z.csv").string(), c, records);
  fs::create_directories(dir / "records");
  int unconverged = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    write_scf_log((dir / "records" / indexed("scf", i)).string(), c, records[i]);
    const ScfRecord& r = records[i];
    if (!r.converged) ++unconverged;
    if (!r.error.empty()) std::cerr << "U = " << c.u_mhz[i] << ": " << r.error << '\n';
    std::printf("U = %-10g Z = %.6f +- %.6f  %s\n", c.u_mhz[i], r.z, r.z_err,
                r.converged ? "converged" : "UNCONVERGED");
  }
  std::printf("wrote %s\n", (dir / "z_vs_u.csv").c_str());
  if (unconverged > 0) {
    std::cerr << unconverged << " of " << records.size() << " points did not converge\n";
    return kExitUnconverged;
  }
  return kExitOk;
}

int cmd_quench(const RunConfig& c) {
  const ClusterSpec cluster = c.cluster();
  const Eigen::MatrixXd t = build_hopping(cluster, c.hopping());
  const SpinBackend backend(c.backend_config(), cluster);
  const std::size_t n = c.u_f_mhz.size();
  std::vector<QuenchRun> runs(n);
  std::vector<Spectrum> spectra(n);
  std::vector<DampingFit> fits(n);
  parallel_for(static_cast<int>(n), c.jobs, [&](int i) {
    QuenchSettings s;
    s.u_final = c.energy(c.u_f_mhz[i]);
    s.duration = c.duration_us;
    s.samples = c.samples;
    s.tau_ramp = c.tau_ramp_us;
    s.ideal_spin_dynamics = c.backend == BackendKind::Exact;
    runs[i] = run_quench(t, backend, s);
    spectra[i] = fourier_spectrum(runs[i].tau, runs[i].z, c.window);
    fits[i] = fit_damping(runs[i].tau, runs[i].z, s.ideal_spin_dynamics ? 0.0 : s.tau_ramp);
  });

  const fs::path dir = prepare_dir(c);
  for (std::size_t i = 0; i < n; ++i) {
    write_trace((dir / indexed("trace", i)).string(), c, runs[i]);
    write_spectrum((dir / indexed("spectrum", i)).string(), c, spectra[i]);
    const PeakEstimate d = dominant_peak(spectra[i]);
    const double freq = c.angular ? d.omega : d.omega / (2.0 * std::numbers::pi);
    std::printf("U_f = %-10g dominant freq = %-10g damping = %g +- %g%s\n", c.u_f_mhz[i], freq,
                fits[i].rate, fits[i].rate_err,
                fits[i].ok ? "" : (" (" + fits[i].message + ")").c_str());
  }
  write_spectrum_map((dir / "spectrum_map.csv").string(), c, runs, spectra);
  write_quench_summary((dir / "quench_summary.csv").string(), c, runs, spectra, fits);
  std::printf("wrote %s\n", (dir / "spectrum_map.csv").c_str());
  return kExitOk;
}

int cmd_geometry(const RunConfig& c) {
  const ClusterSpec cluster = c.cluster();
  const Eigen::MatrixXd t = build_hopping(cluster, c.hopping());
  const SpinBackend exact(BackendConfig::preset(BackendKind::Exact), cluster);
  const ScfRecord rec = outer_loop(t, c.energy(c.geometry_u_mhz), exact, c.scf_config());
  if (!rec.error.empty()) {
    std::cerr << "error: " << rec.error << '\n';
    return kExitUnconverged;
  }
  const Eigen::MatrixXd& j = rec.j;
  if (j.cwiseAbs().maxCoeff() == 0.0) throw ConfigError("no target couplings");

  const BackendConfig bc = c.backend_config();
  const AtomArray start = initial_guess(j, cluster, c.c6);
  const GeometryResult result = optimize_geometry(start, j, bc.geometry_options);

  const fs::path dir = prepare_dir(c);
  write_positions((dir / "positions_initial.csv").string(), c, start);
  write_positions((dir / "positions_optimized.csv").string(), c, result.array);
  write_geometry_summary((dir / "geometry_summary.csv").string(), c, result);
  write_cost_history((dir / "cost_history.csv").string(), c, result);
  std::printf("D before = %.9g  D after = %.9g  iterations = %d%s%s\n",
              c.energy_to_config(result.initial_cost), c.energy_to_config(result.final_cost),
              result.iterations, result.converged ? "" : "  (not converged)",
              result.line_search_failed ? "  (line search stalled)" : "");
  if (result.line_search_failed) std::cerr << "warning: line search could not make progress\n";
  std::printf("wrote %s\n", (dir / "positions_optimized.csv").c_str());
  return rec.converged ? kExitOk : kExitUnconverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slave-spin mean-field simulator for the half-filled Hubbard model"};
  app.require_subcommand(1);
  Flags eq_flags, qu_flags, geo_flags;
  CLI::App* eq = app.add_subcommand("equilibrium", "Sweep U and write Z(U)");
  CLI::App* qu = app.add_subcommand("quench", "Interaction quench U: 0 -> U_f with spectra");
  CLI::App* geo = app.add_subcommand("geometry", "Optimise atom positions for the couplings");
  add_flags(eq, eq_flags);
  add_flags(qu, qu_flags);
  add_flags(geo, geo_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eq->parsed()) return cmd_equilibrium(resolve(eq_flags, Workflow::Equilibrium));
    if (qu->parsed()) return cmd_quench(resolve(qu_flags, Workflow::Quench));
    return cmd_geometry(resolve(geo_flags, Workflow::Geometry));
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnconverged;
  }
}
