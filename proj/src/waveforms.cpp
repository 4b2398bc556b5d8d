#include "qns/waveforms.hpp"

#include <algorithm>
#include <cmath>

#include "qns/common.hpp"
#include "qns/error.hpp"

namespace qns {

std::string to_string(WaveformKind kind) {
  switch (kind) {
    case WaveformKind::Dpss: return "dpss";
    case WaveformKind::CosineShift: return "cosine_shift";
    case WaveformKind::FiniteDifference: return "finite_difference";
    case WaveformKind::EmbeddedDd: return "embedded_dd";
    case WaveformKind::Cpmg: return "cpmg";
    case WaveformKind::RotarySpinEcho: return "rotary_spin_echo";
    case WaveformKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(Normalization mode) {
  switch (mode) {
    case Normalization::Fixed: return "fixed";
    case Normalization::Energy: return "energy";
    case Normalization::ThetaEnergy: return "theta_energy";
    case Normalization::MaxTheta: return "max_theta";
  }
  return "fixed";
}

Waveform make_uniform_waveform(std::vector<double> values, double dt) {
  if (values.empty()) throw Error(ErrorCode::InvalidParams, "waveform needs at least one segment");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParams, "segment duration must be positive");
  Waveform w;
  w.step = dt;
  w.edges.resize(values.size() + 1);
  for (std::size_t i = 0; i <= values.size(); ++i) w.edges[i] = dt * static_cast<double>(i);
  w.values = std::move(values);
  w.recipe.length = w.values.size();
  return w;
}

double RotationAngle::at(double t) const {
  if (edges.empty()) return 0.0;
  if (t <= edges.front()) return values.front();
  if (t >= edges.back()) return values.back();
  const auto it = std::upper_bound(edges.begin(), edges.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - edges.begin()) - 1;
  return values[j] + slopes[j] * (t - edges[j]);
}

double RotationAngle::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

RotationAngle rotation_angle(const Waveform& w) {
  RotationAngle r;
  r.edges = w.edges;
  r.slopes = w.values;
  r.values.resize(w.edges.size());
  if (r.values.empty()) return r;
  // Sum per-segment increments with Neumaier compensation so long sequences of
  // cancelling increments (finite differences) stay exact to rounding.
  double sum = 0.0;
  double comp = 0.0;
  r.values[0] = 0.0;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    const double inc = w.values[j] * (w.edges[j + 1] - w.edges[j]);
    const double t = sum + inc;
    if (std::abs(sum) >= std::abs(inc)) {
      comp += (sum - t) + inc;
    } else {
      comp += (inc - t) + sum;
    }
    sum = t;
    r.values[j + 1] = sum + comp;
  }
  return r;
}

double theta_fd(const std::vector<double>& base, double dt, double t) {
  const std::size_t n = base.size();
  if (n == 0 || t <= 0.0) return 0.0;
  const double pos = t / dt;
  if (pos >= static_cast<double>(n)) return dt * base[n - 1];
  const auto m = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(m);
  const double a = m == 0 ? 0.0 : dt * base[m - 1];
  const double b = dt * base[m];
  return a + frac * (b - a);
}

kernels::SegmentView segment_view(const Waveform& w, const RotationAngle& theta) {
  return kernels::SegmentView{w.edges, w.values, theta.values};
}

void check_amplitude_cap(const Waveform& w, double cap) {
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    if (std::abs(w.values[j]) > cap) {
      throw Error(ErrorCode::AmplitudeCap, "segment " + std::to_string(j) + " amplitude " +
                                               std::to_string(std::abs(w.values[j])) + " exceeds cap " +
                                               std::to_string(cap));
    }
  }
}

namespace {

void small_angle_guard(Waveform& w, double max_theta) {
  if (max_theta > kSmallAngleLimit) {
    w.warnings.push_back("max |Theta| = " + std::to_string(max_theta) +
                         " rad exceeds pi/8; first-order filter model degrades");
  }
}

double fd_theta_energy(const std::vector<double>& v, double dt) {
  double s = 0.0;
  double prev = 0.0;
  for (double x : v) {
    const double a = dt * prev;
    const double b = dt * x;
    s += dt * (a * a + a * b + b * b) / 3.0;
    prev = x;
  }
  return s;
}

double resolve_scale(const std::vector<double>& unit, double dt, Scaling scaling) {
  switch (scaling.mode) {
    case Normalization::Fixed:
      return scaling.value;
    case Normalization::Energy: {
      double e = 0.0;
      for (double x : unit) e += x * x * dt;
      if (e <= 0.0) throw Error(ErrorCode::InvalidParams, "shifted waveform has zero energy");
      return std::sqrt(scaling.value / e);
    }
    case Normalization::ThetaEnergy: {
      const double e = fd_theta_energy(unit, dt);
      if (e <= 0.0) throw Error(ErrorCode::InvalidParams, "shifted waveform has zero angle energy");
      return std::sqrt(scaling.value / e);
    }
    case Normalization::MaxTheta: {
      double m = 0.0;
      for (double x : unit) m = std::max(m, std::abs(x));
      if (m <= 0.0) throw Error(ErrorCode::InvalidParams, "shifted waveform is identically zero");
      return scaling.value / (dt * m);
    }
  }
  return scaling.value;
}

std::vector<double> shifted_unit(const DpssSet& set, std::size_t k, double omega_s, double dt) {
  const auto v = set.sequence(k);
  std::vector<double> out(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    out[n] = std::cos(static_cast<double>(n) * omega_s * dt) * v[n];
  }
  return out;
}

}  // namespace

Waveform dpss_waveform(const DpssSet& set, std::size_t k, double omega, double dt, double cap) {
  const auto v = set.sequence(k);
  std::vector<double> values(v.begin(), v.end());
  for (double& x : values) x *= omega;
  Waveform w = make_uniform_waveform(std::move(values), dt);
  w.recipe = {WaveformKind::Dpss, k, set.params.length, set.params.half_bandwidth, 0.0,
              Normalization::Fixed, omega};
  check_amplitude_cap(w, cap);
  small_angle_guard(w, rotation_angle(w).max_abs());
  return w;
}

Waveform cosine_shift(const DpssSet& set, std::size_t k, double omega_s, double dt, Scaling scaling, double cap) {
  if (omega_s < 0.0) throw Error(ErrorCode::InvalidParams, "shift frequency must be nonnegative");
  auto values = shifted_unit(set, k, omega_s, dt);
  const double scale = resolve_scale(values, dt, scaling);
  for (double& x : values) x *= scale;
  Waveform w = make_uniform_waveform(std::move(values), dt);
  w.recipe = {WaveformKind::CosineShift, k, set.params.length, set.params.half_bandwidth, omega_s,
              scaling.mode, scale};
  const double half_band = kTwoPi * set.params.half_bandwidth / dt;
  if (omega_s > 0.0 && omega_s <= half_band) {
    w.warnings.push_back("shift inside the base band: sidebands overlap and a cross term appears");
  }
  check_amplitude_cap(w, cap);
  return w;
}

Waveform finite_difference(const Waveform& base, double cap) {
  if (base.values.size() < 2) throw Error(ErrorCode::InvalidParams, "finite difference needs N >= 2");
  if (!(base.step > 0.0)) throw Error(ErrorCode::InvalidParams, "finite difference needs a uniform base");
  std::vector<double> d(base.values.size());
  d[0] = base.values[0];
  for (std::size_t n = 1; n < d.size(); ++n) d[n] = base.values[n] - base.values[n - 1];
  Waveform w = make_uniform_waveform(std::move(d), base.step);
  w.recipe = base.recipe;
  w.recipe.kind = WaveformKind::FiniteDifference;
  w.warnings = base.warnings;
  check_amplitude_cap(w, cap);
  double m = 0.0;
  for (double x : base.values) m = std::max(m, std::abs(x));
  small_angle_guard(w, m * base.step);
  return w;
}

Waveform finite_difference_embedded_dd(const DpssSet& set, std::size_t k, double omega_s, double dt,
                                       Scaling scaling, double cap) {
  const std::size_t n = set.params.length;
  if (n % 4 != 0 || n < 8) throw Error(ErrorCode::InvalidN, "N must be a multiple of 4 (and at least 8)");
  const Waveform base = cosine_shift(set, k, omega_s, dt, scaling);
  const auto& v = base.values;
  const std::size_t q = n / 4;
  const double pi_rate = kPi / dt;
  auto at = [&](std::size_t j) { return v[j]; };

  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double prev = j == 0 ? 0.0 : at(j - 1);
    if (j + 2 <= q) {
      d[j] = at(j) - prev;
    } else if (j == q - 1) {
      d[j] = pi_rate - at(q - 1) - at(q - 2);
    } else if (j + 2 <= 3 * q) {
      d[j] = prev - at(j);
    } else if (j == 3 * q - 1) {
      d[j] = at(3 * q - 1) + at(3 * q - 2) - pi_rate;
    } else {
      d[j] = at(j) - prev;
    }
  }
  Waveform w = make_uniform_waveform(std::move(d), dt);
  w.recipe = base.recipe;
  w.recipe.kind = WaveformKind::EmbeddedDd;
  w.warnings = base.warnings;
  check_amplitude_cap(w, cap);
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  small_angle_guard(w, m * dt);
  return w;
}

double PulseSequence::amplitude() const { return pulse_width > 0.0 ? kPi / pulse_width : 0.0; }
double PulseSequence::min_spacing() const { return pulse_width + buffer; }
double PulseSequence::idle_ratio() const {
  return duration > 0.0 ? 1.0 - static_cast<double>(centers.size()) * min_spacing() / duration : 0.0;
}

PulseSequence cpmg(std::size_t n, double tau, double pulse_width, double buffer) {
  if (n == 0 || !(tau > 0.0) || pulse_width < 0.0 || buffer < 0.0) {
    throw Error(ErrorCode::InvalidParams, "CPMG needs n >= 1, tau > 0 and nonnegative pulse width and buffer");
  }
  const double need = static_cast<double>(n) * (pulse_width + buffer);
  if (need > tau * (1.0 + 1e-12)) {
    throw Error(ErrorCode::Overlap, std::to_string(n) + " pulses with spacing " +
                                        std::to_string(pulse_width + buffer) + " do not fit in " +
                                        std::to_string(tau));
  }
  PulseSequence s;
  s.pulse_width = pulse_width;
  s.buffer = buffer;
  s.duration = tau;
  s.centers.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    s.centers[j - 1] = static_cast<double>(2 * j - 1) * tau / static_cast<double>(2 * n);
  }
  return s;
}

std::size_t cpmg_max_pulses(double tau, double pulse_width, double buffer) {
  const double spacing = pulse_width + buffer;
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidParams, "minimum spacing must be positive");
  return static_cast<std::size_t>(std::floor(tau / spacing * (1.0 + 1e-12)));
}

Waveform render(const PulseSequence& seq, double grid_step) {
  if (!(seq.pulse_width > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "instantaneous pulses have no square rendering");
  }
  const double half = 0.5 * seq.pulse_width;
  const double amp = seq.amplitude();
  Waveform w;
  w.edges.push_back(0.0);
  auto idle_to = [&](double end) {
    const double start = w.edges.back();
    const double len = end - start;
    if (len <= 1e-15 * seq.duration) return;
    std::size_t pieces = 1;
    if (grid_step > 0.0) pieces = static_cast<std::size_t>(std::ceil(len / grid_step - 1e-9));
    pieces = std::max<std::size_t>(pieces, 1);
    for (std::size_t p = 1; p <= pieces; ++p) {
      w.edges.push_back(p == pieces ? end : start + len * static_cast<double>(p) / static_cast<double>(pieces));
      w.values.push_back(0.0);
    }
  };
  double last_end = 0.0;
  for (double c : seq.centers) {
    const double s = c - half;
    const double e = c + half;
    if (s < -1e-12 * seq.duration || e > seq.duration * (1.0 + 1e-12) || s < last_end - 1e-12 * seq.duration) {
      throw Error(ErrorCode::Overlap, "pulse at " + std::to_string(c) + " overlaps a neighbour or the boundary");
    }
    idle_to(std::max(s, w.edges.back()));
    w.edges.push_back(std::min(e, seq.duration));
    w.values.push_back(amp);
    last_end = e;
  }
  idle_to(seq.duration);
  w.recipe.kind = WaveformKind::Cpmg;
  w.recipe.length = w.values.size();
  w.recipe.scale = amp;
  return w;
}

Waveform rotary_spin_echo(double omega, double period, double tau) {
  if (!(period > 0.0) || !(tau > 0.0)) throw Error(ErrorCode::InvalidParams, "period and tau must be positive");
  const double cycles = tau / period;
  const double rounded = std::round(cycles);
  if (rounded < 1.0 || std::abs(cycles - rounded) > 1e-9 * std::max(1.0, cycles)) {
    throw Error(ErrorCode::InvalidParams, "tau must be a whole number of periods");
  }
  const auto n = static_cast<std::size_t>(rounded);
  std::vector<double> values(2 * n);
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = (j % 2 == 0) ? omega : -omega;
  Waveform w = make_uniform_waveform(std::move(values), 0.5 * period);
  w.recipe.kind = WaveformKind::RotarySpinEcho;
  w.recipe.scale = omega;
  return w;
}

PulseSequence pulsed_dpss(const DpssSet& set, std::size_t k, double omega_s, double c_tau, double dt,
                          std::size_t n) {
  if (set.params.length != n) throw Error(ErrorCode::InvalidParams, "DPSS length does not match N");
  if (!(dt > 0.0) || c_tau < 0.0) throw Error(ErrorCode::InvalidParams, "need dt > 0 and c_tau >= 0");
  const auto v = set.sequence(k);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (!(c_tau * vmax < dt)) {
    throw Error(ErrorCode::ScalingTooLarge, "c_tau * max|v| must be below dt");
  }
  PulseSequence s;
  s.duration = static_cast<double>(n) * dt;
  s.centers.resize(2 * n - 1);
  for (std::size_t i = 1; i <= 2 * n - 1; ++i) {
    const double base = static_cast<double>(i) * dt;
    if (i % 2 == 0) {
      s.centers[i - 1] = 0.5 * base;
    } else {
      const std::size_t m = (i - 1) / 2;
      s.centers[i - 1] = 0.5 * (c_tau * std::cos(static_cast<double>(m) * omega_s * dt) * v[m] + base);
    }
  }
  return s;
}

ScanRange scan_range(const ScanInputs& in) {
  ScanRange r;
  const double spacing = in.pulse_width + in.buffer;
  const double pulsed = spacing > 0.0 ? kPi * (1.0 - in.idle_ratio) / spacing : 0.0;
  r.cpmg_max = std::max(0.0, pulsed);
  r.as_max = r.cpmg_max;
  if (in.awg_step > 0.0) {
    r.dpss_max = kPi / in.awg_step;
    if (in.sample_rate > 0.0) r.dpss_max = std::min(r.dpss_max, 0.5 * in.sample_rate);
  }
  r.cpmg_resolution = in.tau > 0.0 ? kPi / in.tau : 0.0;
  r.as_resolution = in.base_duration > 0.0 ? kTwoPi / in.base_duration : 0.0;
  r.dpss_resolution = in.shift_spacing;
  return r;
}

}  // namespace qns
