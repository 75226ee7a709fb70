#pragma once

#include "slavespin/backend.hpp"
#include "slavespin/lattice.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace slavespin {

/// Uniform grid tau_k = k * duration / samples, k = 0..samples.
std::vector<double> uniform_grid(double duration, int samples);

struct QuenchSettings {
  double u_final = 0.0;
  double duration = 4.0;
  int samples = 400;
  double tau_ramp = kDefaultQuenchRamp;
  /// true: constant H_s(U_f) from the polarised state. false: the register is
  /// driven with the quench schedule on the couplings of the backend.
  bool ideal_spin_dynamics = true;
};

struct QuenchRun {
  double u_final = 0.0;
  std::vector<double> tau;
  Eigen::VectorXd mbar;
  Eigen::VectorXd z;
  Eigen::VectorXd z_err;
  /// Couplings frozen at the U = 0 solution.
  Eigen::MatrixXd j;
  double mean_bond = 0.0;
};

/// U = 0 fixed point: <S^z S^z> = 1 on every bond, so Q = t.
SpinCoupling frozen_coupling(const Eigen::MatrixXd& hopping);

/// Quench U: 0 -> U_f from the fully polarised state, with the mean field
/// frozen at its U = 0 value. With a noisy backend every time point gets its
/// own shot record.
QuenchRun run_quench(const Eigen::MatrixXd& hopping, const SpinBackend& backend,
                     const QuenchSettings& settings);

enum class WindowKind { Hann, Rectangular };

struct Spectrum {
  /// Cyclic frequency f (MHz) and angular frequency omega = 2 pi f (rad/us).
  Eigen::VectorXd freq;
  Eigen::VectorXd omega;
  Eigen::VectorXd amplitude;
  /// omega spacing between bins.
  double bin_omega = 0.0;
  /// Arg-max over bins k >= 1; -1 for an identically flat trace.
  int peak = -1;
  double peak_omega = 0.0;
  /// Full width at half maximum of the main peak, in omega.
  double peak_width = 0.0;
};

/// Mean-subtracted, windowed DFT amplitude. Amplitudes are normalised so a
/// tone A cos(omega t) shows a peak of about A. Rejects grids with fewer than
/// 64 points or non-uniform spacing.
Spectrum fourier_spectrum(const std::vector<double>& tau, const Eigen::VectorXd& signal,
                          WindowKind window = WindowKind::Hann);

/// Local maxima with amplitude >= rel_threshold * max, excluding bin 0.
std::vector<int> find_peaks(const Spectrum& spectrum, double rel_threshold = 0.1);

struct PeakEstimate {
  int bin = -1;
  double omega = 0.0;
  double amplitude = 0.0;
};

/// Sub-bin position and height from a parabola through the log amplitudes of
/// bins k-1, k, k+1. Falls back to the raw bin at the edges.
PeakEstimate refine_peak(const Spectrum& spectrum, int bin);

/// Highest local maximum at bin >= min_bin, refined. The default skips the
/// main lobe of the Hann window around zero frequency, where a slow drift of
/// the signal lands. bin = -1 if there is none.
PeakEstimate dominant_peak(const Spectrum& spectrum, int min_bin = 2);

struct DampingFit {
  double rate = 0.0;
  double rate_err = 0.0;
  int peaks = 0;
  bool ok = false;
  std::string message;
};

/// Exponential envelope fit: local maxima of |x - mean(x)| at tau >= tau_min,
/// least squares on log(maxima) vs tau; rate = -slope.
DampingFit fit_damping(const std::vector<double>& tau, const Eigen::VectorXd& signal,
                       double tau_min = 0.0);

}  // namespace slavespin
