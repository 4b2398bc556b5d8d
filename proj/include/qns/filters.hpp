#pragma once

// Filter functions. Fundamental filters are complex Fourier integrals of the
// control; F_Omega = |F_xx|^2 / 4 and F_z = |F_zy|^2 are the real filters that
// enter the overlap integrals <a^2> = (1/pi) int_0^inf F S d omega.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qns/common.hpp"
#include "qns/dpss.hpp"
#include "qns/waveforms.hpp"

namespace qns {

enum class FilterKind { Fxx, Fzy, Fzz, Amplitude, Dephasing, ZzPower, Multitaper };

std::string to_string(FilterKind kind);

struct FundamentalFfs {
  std::vector<double> omega;
  std::vector<std::complex<double>> xx;
  std::vector<std::complex<double>> zy;
  std::vector<std::complex<double>> zz;
};

/// Real nonnegative filter on a frequency grid.
struct FilterFunction {
  FilterKind kind = FilterKind::Dephasing;
  std::vector<double> omega;
  std::vector<double> values;
  WaveformRecipe source;
  Band passband;
  bool has_passband = false;
};

inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr std::size_t kMinBandSteps = 8;

/// Uniform grid on [0, pi / dt].
std::vector<double> default_grid(double dt, std::size_t points = kDefaultGridPoints);

/// B_s = (max{0, omega_s - db}, omega_s + db), db = 2 pi W / dt.
Band shifted_passband(double omega_s, double half_bandwidth, double dt);

/// Exact per-segment integration (sin and cos of a linear angle integrate in
/// closed form on every segment).
FundamentalFfs fundamental_ffs(const Waveform& w, std::span<const double> omega);

/// Composite Simpson route with max(min_oversampling, ceil(4 |dTheta| / pi))
/// subintervals per segment.
FundamentalFfs fundamental_ffs_quadrature(const Waveform& w, std::span<const double> omega,
                                          std::size_t min_oversampling = 8);

/// Filters of `count` back-to-back copies of `unit`. Copy k is delayed by
/// k * unit.duration() and its angle offset by k times the unit's net rotation,
/// so the sums over copies are geometric and cost nothing per copy. A CPMG
/// sequence of n pulses is n copies of its one-pulse block.
FundamentalFfs repeated_ffs(const Waveform& unit, std::size_t count, std::span<const double> omega);

FilterFunction amplitude_ff(const FundamentalFfs& f);  // |F_xx|^2 / 4
FilterFunction dephasing_ff(const FundamentalFfs& f);  // |F_zy|^2
FilterFunction zz_power_ff(const FundamentalFfs& f);   // |F_zz|^2

/// Inputs for the closed-form filters of cosine-shifted DPSS controls.
struct ShiftedDpssParams {
  const DpssSet* set = nullptr;
  std::size_t order = 0;
  double shift = 0.0;        // omega_s
  double scale = 0.0;        // Omega_s
  double dt = 0.0;
  bool sidebands_only = false;  // drop the sideband interference term
};

/// |sum_n cos(n omega_s dt) v_n e^{i omega n dt}|^2
///   = (1/4)[U(w - ws)^2 + U(w + ws)^2 + 2 U(w - ws) U(w + ws) cos(ws (N - 1) dt)].
double shifted_dpss_power(const ShiftedDpssParams& p, double omega);

/// F_z = 16 sin^4(w dt / 2) / w^4 * Omega_s^2 * shifted power.
FilterFunction fd_dephasing_ff(const ShiftedDpssParams& p, std::span<const double> omega);
/// F_Omega = 4 sin^4(w dt / 2) / w^2 * Omega_s^2 * shifted power.
FilterFunction fd_amplitude_ff(const ShiftedDpssParams& p, std::span<const double> omega);
/// F_Omega = sin^2(w dt / 2) / w^2 * Omega_s^2 * shifted power.
FilterFunction cos_shifted_amplitude_ff(const ShiftedDpssParams& p, std::span<const double> omega);
/// Instantaneous-pulse DPSS sequence: |F_zz|^2 ~ c_tau^2 * shifted power.
FilterFunction pulsed_dpss_ff(const ShiftedDpssParams& p, double c_tau, std::span<const double> omega);

/// |int_0^tau y(s) e^{i w s} ds|^2 for the +-1 switching function of
/// instantaneous pi pulses at seq.centers.
FilterFunction switching_ff(const PulseSequence& seq, std::span<const double> omega);
std::vector<std::complex<double>> switching_transform(const PulseSequence& seq, std::span<const double> omega);

struct CpmgFourierModel {
  std::size_t pulses = 0;
  double tau = 0.0;
  double pulse_width = 0.0;
  double a0 = 0.0;
  std::vector<double> coefficients;  // a_nu for nu = 1..nu_max
  std::vector<double> centers;       // omega_nu = pi n nu / tau
};

CpmgFourierModel cpmg_ff_model(std::size_t n, double tau, double pulse_width, std::size_t nu_max);

/// |F_zz|^2 from the truncated cosine series of the switching function.
FilterFunction cpmg_model_ff(const CpmgFourierModel& m, std::span<const double> omega);

FilterFunction multitaper_ff(std::span<const FilterFunction> ffs, std::span<const double> weights);

/// (1/pi) int_band ff d omega by the trapezoidal rule with linear interpolation
/// at the band edges.
double band_integral(const FilterFunction& ff, Band band);

/// (1/pi) int ff * s over the whole grid (trapezoidal).
double overlap_integral(const FilterFunction& ff, std::span<const double> spectrum);

}  // namespace qns
