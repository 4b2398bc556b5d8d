#pragma once

// Target spectra and random-phase noise synthesis.
//
// Spectral convention: S(w) = int C(s) e^{-i w s} ds with C the noise
// autocovariance, so that <a^2> = (1/pi) int_0^inf F(w) S(w) dw and
// C(0) = (1/pi) int_0^inf S dw. A realization on the comb w_i = (i + 1/2) dw
// is beta(t) = sum_i A_i cos(w_i t + phi_i) with A_i = 2 sqrt(S(w_i) dw / 2 pi)
// and phi_i uniform on [0, 2 pi).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qns {

enum class SpectrumForm { Gridded, OneOverFWithSpurs, GaussianBump, White, DeltaTone };

std::string to_string(SpectrumForm form);

struct GaussianPeak {
  double center = 0.0;  // rad / time
  double width = 0.0;   // standard deviation, rad / time
  double height = 0.0;  // noise units^2 * time
};

struct Spectrum {
  SpectrumForm form = SpectrumForm::White;
  double level = 0.0;       // white level, or 1/f amplitude at w = 0
  double exponent = 1.0;    // 1/f exponent
  double knee = 1.0;        // 1/f knee frequency, rad / time
  std::vector<GaussianPeak> peaks;  // spurs, or the single bump
  double tone_frequency = 0.0;      // delta tone
  double tone_power = 0.0;          // S = P delta(w - w_tone)
  std::vector<double> grid_omega;   // gridded form, linear interpolation
  std::vector<double> grid_values;
  double cutoff = std::numeric_limits<double>::infinity();  // w_c
  double lower = 0.0;                                        // comb lower bound

  /// Continuous part of S at w >= 0 (0 outside [lower, cutoff]); the delta
  /// tone has no continuous part.
  double operator()(double omega) const;
  bool is_delta() const { return form == SpectrumForm::DeltaTone; }
  std::vector<double> evaluate(std::span<const double> omega) const;
};

Spectrum white(double level, double cutoff);
/// level / (1 + w / knee)^exponent plus Gaussian spurs.
Spectrum one_over_f_with_spurs(double level, double exponent, double knee, std::vector<GaussianPeak> spurs,
                               double cutoff);
Spectrum gaussian_bump(double center, double width, double height, double cutoff);
Spectrum delta_tone(double omega, double power);
Spectrum gridded(std::vector<double> omega, std::vector<double> values);

enum class NoiseComponent { Dephasing, Amplitude };

struct TimeGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double end() const { return start + step * static_cast<double>(count == 0 ? 0 : count - 1); }
  double at(std::size_t j) const { return start + step * static_cast<double>(j); }
};

struct Comb {
  std::vector<double> omega;
  std::vector<double> amplitude;
};

/// Comb lines (i + 1/2) dw inside [lower, cutoff]; a delta tone gives one line
/// with amplitude sqrt(2 P / pi).
Comb make_comb(const Spectrum& s, double spacing);

struct NoiseRealization {
  NoiseComponent component = NoiseComponent::Dephasing;
  std::uint64_t seed = 0;
  TimeGrid grid;
  std::vector<double> samples;
  std::vector<double> phases;
  Comb comb;

  /// Linear interpolation between samples.
  double value_at(double t) const;
};

/// Default comb spacing 2 pi / (4 tau).
double default_comb_spacing(double tau);

NoiseRealization realize(const Spectrum& s, const TimeGrid& grid, double spacing, std::uint64_t seed,
                         NoiseComponent component = NoiseComponent::Dephasing);

/// Comb lines and phases only, without time samples. realize() with the same
/// seed draws the same phases.
NoiseRealization draw_phases(const Spectrum& s, double spacing, std::uint64_t seed,
                             NoiseComponent component = NoiseComponent::Dephasing);

/// Realization whose phases are supplied explicitly (one per comb line).
NoiseRealization realize_with_phases(const Spectrum& s, const TimeGrid& grid, double spacing,
                                     std::vector<double> phases, NoiseComponent component);

/// Tones with phases 2 pi j / n_phases, j = 0..n_phases-1.
std::vector<NoiseRealization> phase_sweep_tone(double omega, double power, std::size_t n_phases,
                                               const TimeGrid& grid,
                                               NoiseComponent component = NoiseComponent::Dephasing);

struct VerificationReport {
  std::vector<double> omega;
  std::vector<double> estimate;
  std::vector<double> truth;
  std::vector<double> relative_error;
  double mean_relative_error = 0.0;
  double chi2_per_bin = 0.0;
  std::size_t realizations = 0;
  bool low_confidence = false;
  bool consistent = false;
};

/// Ensemble-averaged periodogram (first Slepian taper, NW = 4) of the
/// realizations compared with s on `bins` frequencies inside the comb.
VerificationReport verify_realizations(std::span<const NoiseRealization> realizations, const Spectrum& s,
                                       std::size_t bins = 48, double tolerance = 0.1);

}  // namespace qns
