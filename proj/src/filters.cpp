#include "qns/filters.hpp"

#include <algorithm>
#include <cmath>

#include "qns/error.hpp"
#include "qns/kernels.hpp"

namespace qns {

using cplx = std::complex<double>;

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Fxx: return "F_xx";
    case FilterKind::Fzy: return "F_zy";
    case FilterKind::Fzz: return "F_zz";
    case FilterKind::Amplitude: return "F_Omega";
    case FilterKind::Dephasing: return "F_z";
    case FilterKind::ZzPower: return "F_zz_power";
    case FilterKind::Multitaper: return "multitaper";
  }
  return "unknown";
}

std::vector<double> default_grid(double dt, std::size_t points) { return uniform_grid(0.0, kPi / dt, points); }

Band shifted_passband(double omega_s, double half_bandwidth, double dt) {
  const double db = kTwoPi * half_bandwidth / dt;
  return Band{std::max(0.0, omega_s - db), omega_s + db};
}

FundamentalFfs fundamental_ffs(const Waveform& w, std::span<const double> omega) {
  if (omega.empty()) throw Error(ErrorCode::GridEmpty, "frequency grid is empty");
  const auto theta = rotation_angle(w);
  auto v = kernels::fundamental_ffs_parallel(segment_view(w, theta), omega);
  return FundamentalFfs{{omega.begin(), omega.end()}, std::move(v.xx), std::move(v.zy), std::move(v.zz)};
}

namespace {

// sum_{k < m} e^{i k x} as e^{i x (m - 1) / 2} sin(m x / 2) / sin(x / 2).
cplx geometric(double x, std::size_t m) {
  const double r = std::remainder(x, kTwoPi);
  const double mm = static_cast<double>(m);
  const double half = 0.5 * r;
  const double ratio = std::abs(half) < 1e-7 ? mm * (1.0 - (mm * mm - 1.0) * half * half / 6.0)
                                             : std::sin(mm * half) / std::sin(half);
  return std::polar(ratio, half * (mm - 1.0));
}

}  // namespace

FundamentalFfs repeated_ffs(const Waveform& unit, std::size_t count, std::span<const double> omega) {
  if (count == 0) throw Error(ErrorCode::InvalidParams, "need at least one copy");
  FundamentalFfs u = fundamental_ffs(unit, omega);
  const double period = unit.duration();
  const double step = rotation_angle(unit).final_value();
  for (std::size_t q = 0; q < omega.size(); ++q) {
    const double x = omega[q] * period;
    const cplx gp = geometric(x + step, count);
    const cplx gm = geometric(x - step, count);
    const cplx c = 0.5 * (gp + gm);                // sum cos(k step) e^{i k x}
    const cplx s = (gp - gm) / cplx(0.0, 2.0);     // sum sin(k step) e^{i k x}
    const cplx zy = u.zy[q], zz = u.zz[q];
    u.xx[q] *= geometric(x, count);
    u.zy[q] = c * zy + s * zz;
    u.zz[q] = c * zz - s * zy;
  }
  return u;
}

FundamentalFfs fundamental_ffs_quadrature(const Waveform& w, std::span<const double> omega,
                                          std::size_t min_oversampling) {
  if (omega.empty()) throw Error(ErrorCode::GridEmpty, "frequency grid is empty");
  const auto theta = rotation_angle(w);
  const std::size_t nw = omega.size();
  FundamentalFfs out{{omega.begin(), omega.end()}, std::vector<cplx>(nw), std::vector<cplx>(nw),
                     std::vector<cplx>(nw)};

  // Simpson nodes and weights for every segment, independent of omega.
  std::vector<double> nodes, weight, sin_t, cos_t, amp;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    const double t0 = w.edges[j];
    const double d = w.edges[j + 1] - t0;
    const double dtheta = w.values[j] * d;
    std::size_t m = std::max<std::size_t>(min_oversampling,
                                          static_cast<std::size_t>(std::ceil(4.0 * std::abs(dtheta) / kPi)));
    if (m % 2) ++m;
    const double h = d / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) {
      const double s = t0 + h * static_cast<double>(i);
      const double c = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double th = theta.values[j] + w.values[j] * (s - t0);
      nodes.push_back(s);
      weight.push_back(c * h / 3.0);
      sin_t.push_back(std::sin(th));
      cos_t.push_back(std::cos(th));
      amp.push_back(w.values[j]);
    }
  }

  const long long nq = static_cast<long long>(nw);
#pragma omp parallel for schedule(static)
  for (long long qi = 0; qi < nq; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    cplx xx{}, zy{}, zz{};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const cplx e = weight[i] * std::polar(1.0, omega[q] * nodes[i]);
      xx += amp[i] * e;
      zy += sin_t[i] * e;
      zz += cos_t[i] * e;
    }
    out.xx[q] = xx;
    out.zy[q] = zy;
    out.zz[q] = zz;
  }
  return out;
}

namespace {

FilterFunction power_of(const std::vector<double>& omega, const std::vector<cplx>& v, double factor,
                        FilterKind kind) {
  FilterFunction f;
  f.kind = kind;
  f.omega = omega;
  f.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = factor * std::norm(v[i]);
  return f;
}

// sin(x dt / 2) / x with its limit dt / 2 at x = 0.
double half_sine_ratio(double x, double dt) {
  const double h = 0.5 * x * dt;
  return 0.5 * dt * sinc(h);
}

FilterFunction shifted_filter(const ShiftedDpssParams& p, std::span<const double> omega, FilterKind kind,
                              double (*shape)(double, double)) {
  if (p.set == nullptr) throw Error(ErrorCode::InvalidParams, "closed-form filter needs a DPSS set");
  if (omega.empty()) throw Error(ErrorCode::GridEmpty, "frequency grid is empty");
  FilterFunction f;
  f.kind = kind;
  f.omega.assign(omega.begin(), omega.end());
  f.values.resize(omega.size());
  const double s2 = p.scale * p.scale;
  const long long m = static_cast<long long>(omega.size());
#pragma omp parallel for schedule(static)
  for (long long qi = 0; qi < m; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    f.values[q] = s2 * shape(omega[q], p.dt) * shifted_dpss_power(p, omega[q]);
  }
  f.passband = shifted_passband(p.shift, p.set->params.half_bandwidth, p.dt);
  f.has_passband = true;
  f.source.order = p.order;
  f.source.length = p.set->params.length;
  f.source.half_bandwidth = p.set->params.half_bandwidth;
  f.source.shift = p.shift;
  f.source.scale = p.scale;
  return f;
}

double fd_dephasing_shape(double w, double dt) {
  const double r = half_sine_ratio(w, dt);  // sin(w dt/2)/w
  return 16.0 * r * r * r * r;
}

double fd_amplitude_shape(double w, double dt) {
  const double r = half_sine_ratio(w, dt);
  const double s = std::sin(0.5 * w * dt);
  return 4.0 * r * r * s * s;
}

double cos_amplitude_shape(double w, double dt) {
  const double r = half_sine_ratio(w, dt);
  return r * r;
}

double unit_shape(double, double) { return 1.0; }

}  // namespace

FilterFunction amplitude_ff(const FundamentalFfs& f) { return power_of(f.omega, f.xx, 0.25, FilterKind::Amplitude); }
FilterFunction dephasing_ff(const FundamentalFfs& f) { return power_of(f.omega, f.zy, 1.0, FilterKind::Dephasing); }
FilterFunction zz_power_ff(const FundamentalFfs& f) { return power_of(f.omega, f.zz, 1.0, FilterKind::ZzPower); }

double shifted_dpss_power(const ShiftedDpssParams& p, double omega) {
  const auto v = p.set->sequence(p.order);
  const double um = dpswf_value(v, p.order, p.dt, omega - p.shift);
  const double up = dpswf_value(v, p.order, p.dt, omega + p.shift);
  double s = um * um + up * up;
  if (!p.sidebands_only) {
    const double phase = p.shift * static_cast<double>(v.size() - 1) * p.dt;
    s += 2.0 * um * up * std::cos(phase);
  }
  return 0.25 * s;
}

FilterFunction fd_dephasing_ff(const ShiftedDpssParams& p, std::span<const double> omega) {
  return shifted_filter(p, omega, FilterKind::Dephasing, fd_dephasing_shape);
}

FilterFunction fd_amplitude_ff(const ShiftedDpssParams& p, std::span<const double> omega) {
  return shifted_filter(p, omega, FilterKind::Amplitude, fd_amplitude_shape);
}

FilterFunction cos_shifted_amplitude_ff(const ShiftedDpssParams& p, std::span<const double> omega) {
  return shifted_filter(p, omega, FilterKind::Amplitude, cos_amplitude_shape);
}

FilterFunction pulsed_dpss_ff(const ShiftedDpssParams& p, double c_tau, std::span<const double> omega) {
  ShiftedDpssParams q = p;
  q.scale = c_tau;
  auto f = shifted_filter(q, omega, FilterKind::ZzPower, unit_shape);
  return f;
}

std::vector<cplx> switching_transform(const PulseSequence& seq, std::span<const double> omega) {
  if (omega.empty()) throw Error(ErrorCode::GridEmpty, "frequency grid is empty");
  std::vector<double> cuts;
  cuts.reserve(seq.centers.size() + 2);
  cuts.push_back(0.0);
  for (double c : seq.centers) cuts.push_back(c);
  cuts.push_back(seq.duration);
  std::vector<cplx> out(omega.size());
  const long long m = static_cast<long long>(omega.size());
#pragma omp parallel for schedule(static)
  for (long long qi = 0; qi < m; ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    const double w = omega[q];
    cplx acc{};
    double sign = 1.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double d = cuts[i + 1] - a;
      const double h = 0.5 * w * d;
      acc += sign * d * sinc(h) * std::polar(1.0, w * a + h);
      sign = -sign;
    }
    out[q] = acc;
  }
  return out;
}

FilterFunction switching_ff(const PulseSequence& seq, std::span<const double> omega) {
  const auto t = switching_transform(seq, omega);
  return power_of({omega.begin(), omega.end()}, t, 1.0, FilterKind::ZzPower);
}

CpmgFourierModel cpmg_ff_model(std::size_t n, double tau, double pulse_width, std::size_t nu_max) {
  if (n == 0 || !(tau > 0.0)) throw Error(ErrorCode::InvalidParams, "CPMG model needs n >= 1 and tau > 0");
  const double spacing = tau / static_cast<double>(n);
  if (!(spacing > pulse_width)) throw Error(ErrorCode::PulseOverlap, "pulse width exceeds interpulse spacing");
  CpmgFourierModel m;
  m.pulses = n;
  m.tau = tau;
  m.pulse_width = pulse_width;
  const double period = 2.0 * spacing;
  const double half = 0.5 * pulse_width;

  // One period centred on t = 0: Y = +1 on |t| < spacing/2 - half, a pi
  // rotation centred at +-spacing/2, and -1 beyond.
  auto y = [&](double t) {
    const double a = std::abs(t);
    const double edge = 0.5 * spacing;
    if (a <= edge - half) return 1.0;
    if (a >= edge + half) return -1.0;
    return std::cos(kPi * (a - (edge - half)) / pulse_width);
  };

  // Composite Simpson on [0, T/2] using the evenness of Y.
  const std::size_t pieces = 20000;
  const double h = 0.5 * period / static_cast<double>(pieces);
  auto coefficient = [&](double w) {
    double s = 0.0;
    for (std::size_t i = 0; i <= pieces; ++i) {
      const double t = h * static_cast<double>(i);
      const double c = (i == 0 || i == pieces) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += c * y(t) * std::cos(w * t);
    }
    return 2.0 * (2.0 / period) * s * h / 3.0;
  };
  m.a0 = coefficient(0.0);
  for (std::size_t nu = 1; nu <= nu_max; ++nu) {
    const double w = kPi * static_cast<double>(n * nu) / tau;
    m.centers.push_back(w);
    m.coefficients.push_back(coefficient(w));
  }
  return m;
}

FilterFunction cpmg_model_ff(const CpmgFourierModel& m, std::span<const double> omega) {
  if (omega.empty()) throw Error(ErrorCode::GridEmpty, "frequency grid is empty");
  auto g = [&](double x) {
    const double h = 0.5 * x * m.tau;
    return m.tau * sinc(h) * std::polar(1.0, h);
  };
  std::vector<cplx> v(omega.size());
  for (std::size_t q = 0; q < omega.size(); ++q) {
    cplx acc = 0.5 * m.a0 * g(omega[q]);
    for (std::size_t i = 0; i < m.coefficients.size(); ++i) {
      acc += 0.5 * m.coefficients[i] * (g(omega[q] + m.centers[i]) + g(omega[q] - m.centers[i]));
    }
    v[q] = acc;
  }
  return power_of({omega.begin(), omega.end()}, v, 1.0, FilterKind::ZzPower);
}

FilterFunction multitaper_ff(std::span<const FilterFunction> ffs, std::span<const double> weights) {
  if (ffs.empty() || ffs.size() != weights.size()) {
    throw Error(ErrorCode::InvalidParams, "multitaper needs one weight per filter");
  }
  FilterFunction out;
  out.kind = FilterKind::Multitaper;
  out.omega = ffs[0].omega;
  out.values.assign(out.omega.size(), 0.0);
  out.passband = ffs[0].passband;
  out.has_passband = ffs[0].has_passband;
  out.source = ffs[0].source;
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    if (ffs[i].omega != out.omega) throw Error(ErrorCode::GridMismatch, "multitaper filters use different grids");
    for (std::size_t q = 0; q < out.values.size(); ++q) out.values[q] += weights[i] * ffs[i].values[q];
  }
  return out;
}

double band_integral(const FilterFunction& ff, Band band) {
  const auto& w = ff.omega;
  if (w.size() < 2) throw Error(ErrorCode::GridEmpty, "band integral needs at least two grid points");
  const double tol = 1e-9 * (w.back() - w.front());
  if (band.lo < w.front() - tol || band.hi > w.back() + tol || !(band.hi > band.lo)) {
    throw Error(ErrorCode::GridMismatch, "band lies outside the filter grid");
  }
  const double step = (w.back() - w.front()) / static_cast<double>(w.size() - 1);
  if (band.width() < static_cast<double>(kMinBandSteps) * step * (1.0 - 1e-9)) {
    throw Error(ErrorCode::DegenerateBand, "band narrower than 8 grid steps");
  }
  const double lo = std::max(band.lo, w.front());
  const double hi = std::min(band.hi, w.back());
  auto value_at = [&](double x) {
    auto it = std::upper_bound(w.begin(), w.end(), x);
    if (it == w.begin()) return ff.values.front();
    if (it == w.end()) return ff.values.back();
    const std::size_t j = static_cast<std::size_t>(it - w.begin());
    const double t = (x - w[j - 1]) / (w[j] - w[j - 1]);
    return ff.values[j - 1] + t * (ff.values[j] - ff.values[j - 1]);
  };
  double acc = 0.0;
  double px = lo;
  double py = value_at(lo);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] <= lo) continue;
    if (w[j] >= hi) break;
    acc += 0.5 * (py + ff.values[j]) * (w[j] - px);
    px = w[j];
    py = ff.values[j];
  }
  acc += 0.5 * (py + value_at(hi)) * (hi - px);
  return acc / kPi;
}

double overlap_integral(const FilterFunction& ff, std::span<const double> spectrum) {
  if (spectrum.size() != ff.values.size()) throw Error(ErrorCode::GridMismatch, "spectrum and filter grids differ");
  double acc = 0.0;
  for (std::size_t j = 1; j < ff.omega.size(); ++j) {
    acc += 0.5 * (ff.values[j - 1] * spectrum[j - 1] + ff.values[j] * spectrum[j]) * (ff.omega[j] - ff.omega[j - 1]);
  }
  return acc / kPi;
}

}  // namespace qns
