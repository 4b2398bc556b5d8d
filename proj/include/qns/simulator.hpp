#pragma once

// Qubit evolution under control and noise.
//
// Lab-frame model in the frame rotating with the qubit:
//   H(t) = beta_z(t) sigma_z + Omega(t) (1 + beta_Omega(t)) sigma_x / 2.
// The toggling-frame propagator is U~(tau) = exp(+i Theta(tau) sigma_x / 2) U(tau).
// To first order U~ = exp(-i a . sigma) with
//   a_x = (1/2) int Omega beta_Omega,  a_y = int sin Theta beta_z,  a_z = int cos Theta beta_z.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qns/noise.hpp"
#include "qns/waveforms.hpp"

namespace qns {

/// SU(2) element [[alpha, -conj(beta)], [beta, conj(alpha)]].
struct Su2 {
  std::complex<double> alpha{1.0, 0.0};
  std::complex<double> beta{0.0, 0.0};

  Su2 operator*(const Su2& r) const;
  double det() const { return std::norm(alpha) + std::norm(beta); }
  /// Vector a with U = cos|a| I - i sin|a| (a/|a|) . sigma (|a| <= pi).
  std::array<double, 3> error_vector() const;
  /// |<+i|U|+i>|^2 for i = x, y, z.
  std::array<double, 3> survival() const;
};

Su2 exp_pauli(double hx, double hy, double hz);  // exp(-i (hx sx + hy sy + hz sz))

inline constexpr std::size_t kDefaultSubsteps = 8;

struct PropagationOptions {
  std::size_t substeps = kDefaultSubsteps;  // per waveform segment
  double max_substep = 0.0;                 // 0: use the noise grid step
};

/// Either noise component may be absent (null).
Su2 propagate_exact(const Waveform& w, const NoiseRealization* beta_z, const NoiseRealization* beta_omega,
                    PropagationOptions opt = {});

std::array<double, 3> first_order_error_vector(const Waveform& w, const NoiseRealization* beta_z,
                                               const NoiseRealization* beta_omega, PropagationOptions opt = {});

/// One noise realization: dephasing and/or amplitude samples.
struct NoisePair {
  std::optional<NoiseRealization> dephasing;
  std::optional<NoiseRealization> amplitude;
};

struct NoiseSpec {
  std::optional<Spectrum> dephasing;
  std::optional<Spectrum> amplitude;
  double comb_spacing = 0.0;  // 0: default for the grid duration
};

/// Realization r uses seeds derived from (seed, component stream, r). With
/// samples = false only the comb phases are drawn (for simulate_spectral).
std::vector<NoisePair> generate_ensemble(const NoiseSpec& spec, const TimeGrid& grid, std::size_t count,
                                         std::uint64_t seed, bool samples = true);

/// Grid covering [0, tau] with the given step (inclusive endpoint).
TimeGrid covering_grid(double tau, double step);

struct RealizationOutcome {
  std::array<double, 3> first_order{};  // a^(1)
  std::array<double, 3> exact{};        // survival probabilities from U~
};

struct SimulationRecord {
  std::vector<RealizationOutcome> outcomes;
  bool has_exact = false;
};

/// Evaluates every realization (OpenMP across realizations, results stored
/// per realization so the output does not depend on the thread count).
SimulationRecord simulate(const Waveform& w, std::span<const NoisePair> ensemble, bool exact = true,
                          PropagationOptions opt = {});

struct Moment {
  double mean = 0.0;
  double std_error = 0.0;
};

/// First-order outcomes evaluated on the comb lines: for
/// beta(t) = sum_i A_i cos(w_i t + phi_i),
///   a_y = Re sum_i A_i e^{i phi_i} F_zy(w_i),  a_z likewise with F_zz,
///   a_x = Re sum_i A_i e^{i phi_i} F_xx(w_i) / 2.
/// Exact for the continuous realization; time samples are not used.
SimulationRecord simulate_spectral(const Waveform& w, std::span<const NoisePair> ensemble);

struct ErrorVectorMoments {
  std::array<Moment, 3> second;  // <a_x^2>, <a_y^2>, <a_z^2>
  std::size_t count = 0;
};

ErrorVectorMoments moments(const SimulationRecord& rec);

enum class TomographyMode { FirstOrder, Exact };

struct TomographyOptions {
  TomographyMode mode = TomographyMode::Exact;
  std::size_t shots = 0;           // per realization and axis; 0 = infinite
  double fidelity = 0.997;         // symmetric readout fidelity
  std::uint64_t seed = 0;          // shot-noise stream
};

inline constexpr double kDefaultReadoutFidelity = 0.997;

struct TomographyRecord {
  std::array<double, 3> probability{};  // P(up_x), P(up_y), P(up_z)
  std::array<double, 3> std_error{};
  std::array<std::uint64_t, 3> counts{};
  std::size_t shots = 0;
  std::size_t realizations = 0;
  double fidelity = 1.0;
  // Per-realization estimates, rows indexed by realization.
  std::vector<std::array<double, 3>> per_realization;
};

TomographyRecord tomography(const SimulationRecord& rec, const TomographyOptions& opt);

/// Applies invert_readout to every probability so that the projections are
/// unbiased by the readout channel.
TomographyRecord readout_corrected(const TomographyRecord& rec);

/// p -> f p + (1 - f)(1 - p) and its inverse.
double readout_channel(double p, double fidelity);
double invert_readout(double p, double fidelity);

struct SignalProjections {
  std::array<double, 3> value{};   // S_x, S_y, S_z
  std::array<double, 3> std_error{};
};

/// S_y = (1 + P_y - P_x - P_z) / 2 and cyclic; unclamped.
SignalProjections signal_projections(const TomographyRecord& rec);

/// Bias of the exact-mode S_y relative to the first-order <a_y^2>, as a
/// fraction of <a_y^2>, with its standard error.
struct BiasEstimate {
  double bias = 0.0;
  double std_error = 0.0;
};

BiasEstimate higher_order_diagnostic(const SimulationRecord& rec);

struct BiasComparison {
  double bias_a = 0.0;
  double bias_b = 0.0;
  double upper_quantile = 0.0;  // 95% one-sided bootstrap bound on |bias_a| - |bias_b|
  bool a_smaller = false;
};

/// Paired bootstrap over realizations: is |bias_a| < |bias_b| at 95%?
BiasComparison compare_bias(const SimulationRecord& a, const SimulationRecord& b, std::size_t resamples,
                            std::uint64_t seed);

}  // namespace qns
