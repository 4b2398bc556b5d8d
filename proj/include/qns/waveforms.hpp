#pragma once

// Control waveforms. Every waveform is piecewise constant: segment j spans
// [edges[j], edges[j+1]) with drive amplitude values[j] (rad per unit time).
// Uniform waveforms have edges at multiples of `step`; pulse renderings may
// carry sub-grid breakpoints.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qns/dpss.hpp"
#include "qns/kernels.hpp"

namespace qns {

enum class WaveformKind { Dpss, CosineShift, FiniteDifference, EmbeddedDd, Cpmg, RotarySpinEcho, Custom };

/// How the overall scale of a shifted waveform is fixed.
///  Fixed       : value is the amplitude scale Omega_s itself.
///  Energy      : value is the target of int Omega(t)^2 dt of the shifted waveform.
///  ThetaEnergy : value is the target of int Theta_FD(t)^2 dt, the squared rotation
///                angle of the finite-difference waveform built from it.
///  MaxTheta    : value is the target of max |Theta_FD(t)|.
enum class Normalization { Fixed, Energy, ThetaEnergy, MaxTheta };

std::string to_string(WaveformKind kind);
std::string to_string(Normalization mode);

struct Scaling {
  Normalization mode = Normalization::Fixed;
  double value = 1.0;
};

struct WaveformRecipe {
  WaveformKind kind = WaveformKind::Custom;
  std::size_t order = 0;
  std::size_t length = 0;        // N
  double half_bandwidth = 0.0;   // W
  double shift = 0.0;            // omega_s, rad / time
  Normalization normalization = Normalization::Fixed;
  double scale = 0.0;            // resolved Omega or Omega_s
};

struct Waveform {
  std::vector<double> edges;   // size n + 1, edges[0] = 0
  std::vector<double> values;  // size n
  double step = 0.0;           // nominal segment duration; 0 when irregular
  WaveformRecipe recipe;
  std::vector<std::string> warnings;

  std::size_t size() const { return values.size(); }
  double duration() const { return edges.empty() ? 0.0 : edges.back(); }
};

/// Uniform-grid waveform from amplitudes.
Waveform make_uniform_waveform(std::vector<double> values, double dt);

/// Piecewise-linear rotation angle Theta(t) = int_0^t Omega.
struct RotationAngle {
  std::vector<double> edges;
  std::vector<double> values;  // Theta at each edge
  std::vector<double> slopes;  // Omega on each segment

  double at(double t) const;
  double final_value() const { return values.empty() ? 0.0 : values.back(); }
  double max_abs() const;
};

RotationAngle rotation_angle(const Waveform& w);

/// Closed-form angle of a finite-difference waveform built from base values V:
/// Theta(m dt) = dt V_{m-1}, linear in between.
double theta_fd(const std::vector<double>& base, double dt, double t);

/// Span view for kernels; `theta` must outlive the view.
kernels::SegmentView segment_view(const Waveform& w, const RotationAngle& theta);

/// Throws AmplitudeCap when any |Omega_n| exceeds cap.
void check_amplitude_cap(const Waveform& w, double cap);

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();
inline constexpr double kSmallAngleLimit = 0.39269908169872414;  // pi / 8

Waveform dpss_waveform(const DpssSet& set, std::size_t k, double omega, double dt, double cap = kNoCap);

/// values_n = Omega_s cos(n omega_s dt) v_n.
Waveform cosine_shift(const DpssSet& set, std::size_t k, double omega_s, double dt, Scaling scaling,
                      double cap = kNoCap);

/// V'_0 = V_0, V'_n = V_n - V_{n-1}.
Waveform finite_difference(const Waveform& base, double cap = kNoCap);

/// Finite-difference waveform with pi rotations inserted so that cos Theta
/// follows a two-pulse CPMG switching pattern. N must be divisible by 4.
Waveform finite_difference_embedded_dd(const DpssSet& set, std::size_t k, double omega_s, double dt,
                                       Scaling scaling, double cap = kNoCap);

struct PulseSequence {
  std::vector<double> centers;
  double pulse_width = 0.0;  // tau_pi; 0 means instantaneous
  double buffer = 0.0;       // total dead time required between adjacent pulses
  double duration = 0.0;     // tau

  double amplitude() const;       // pi / tau_pi
  double min_spacing() const;     // tau_pi + buffer
  double idle_ratio() const;      // 1 - n * min_spacing / tau
};

PulseSequence cpmg(std::size_t n, double tau, double pulse_width, double buffer);

/// Largest pulse count whose minimal spacings fit in tau.
std::size_t cpmg_max_pulses(double tau, double pulse_width, double buffer);

/// Square-pulse rendering. Idle stretches are split into pieces no longer than
/// grid_step when grid_step > 0.
Waveform render(const PulseSequence& seq, double grid_step = 0.0);

/// Alternating +Omega / -Omega halves of each period.
Waveform rotary_spin_echo(double omega, double period, double tau);

/// 2N - 1 instantaneous pi pulses whose odd members are displaced by a
/// cosine-modulated DPSS.
PulseSequence pulsed_dpss(const DpssSet& set, std::size_t k, double omega_s, double c_tau, double dt,
                          std::size_t n);

struct ScanRange {
  double cpmg_max = 0.0;        // rad / time
  double as_max = 0.0;
  double dpss_max = 0.0;
  double cpmg_resolution = 0.0; // pi / tau
  double as_resolution = 0.0;   // 2 pi / tau_b
  double dpss_resolution = 0.0; // shift-grid spacing
};

struct ScanInputs {
  double pulse_width = 0.0;
  double buffer = 0.0;
  double idle_ratio = 0.0;
  double awg_step = 0.0;          // smallest waveform increment dt
  double sample_rate = 0.0;       // omega_SR; 0 for no cap
  double tau = 0.0;
  double base_duration = 0.0;     // tau_b
  double shift_spacing = 0.0;
};

ScanRange scan_range(const ScanInputs& in);

}  // namespace qns
