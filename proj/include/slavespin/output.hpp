#pragma once

#include "slavespin/config.hpp"
#include "slavespin/geometry.hpp"
#include "slavespin/quench.hpp"
#include "slavespin/scf.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace slavespin {

/// `# key = value` lines for every numerical knob of the run.
void write_config_echo(std::ostream& os, const RunConfig& config, const std::string& workflow);

// Writers take values in config units. Energies computed internally are
// converted with RunConfig::energy_to_config. Spectrum frequencies are
// reported as omega when units.angular is set and as f otherwise, so peaks
// sit at the same numbers as the U values that produced them.

/// U, Z, Z_std_err, m_bar, converged, outer_iters, inner_iters_total
void write_z_vs_u(const std::string& path, const RunConfig& config,
                  const std::vector<ScfRecord>& records);
/// U, site, m_i, Z_i, Z_i_err
void write_site_z(const std::string& path, const RunConfig& config,
                  const std::vector<ScfRecord>& records);
/// outer, inner, m_bar, delta_m, delta_q, Z
void write_scf_log(const std::string& path, const RunConfig& config, const ScfRecord& record);

/// tau_us, Z, Z_std_err
void write_trace(const std::string& path, const RunConfig& config, const QuenchRun& run);
/// freq, amplitude
void write_spectrum(const std::string& path, const RunConfig& config, const Spectrum& spectrum);
/// U_f, freq, amplitude
void write_spectrum_map(const std::string& path, const RunConfig& config,
                        const std::vector<QuenchRun>& runs, const std::vector<Spectrum>& spectra);
/// U_f, peak_freq, peak_width, damping_rate, damping_rate_err, fit_ok
void write_quench_summary(const std::string& path, const RunConfig& config,
                          const std::vector<QuenchRun>& runs, const std::vector<Spectrum>& spectra,
                          const std::vector<DampingFit>& fits);

/// site_index, x_um, y_um
void write_positions(const std::string& path, const RunConfig& config, const AtomArray& array);
/// D_before, D_after, iterations, converged, line_search_failed
void write_geometry_summary(const std::string& path, const RunConfig& config,
                            const GeometryResult& result);
/// step, D
void write_cost_history(const std::string& path, const RunConfig& config,
                        const GeometryResult& result);

}  // namespace slavespin
