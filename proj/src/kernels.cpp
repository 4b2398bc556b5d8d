#include "qns/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "qns/common.hpp"
#include "qns/error.hpp"

namespace qns::kernels {
namespace {

constexpr std::size_t kResyncBlock = 64;
constexpr std::size_t kTimeBlock = 256;

// int_0^d e^{i x u} du
cplx segment_integral(double x, double d) {
  const double half = 0.5 * x * d;
  return d * sinc(half) * std::polar(1.0, half);
}

void check_view(const SegmentView& w) {
  if (w.edges.size() != w.amplitude.size() + 1 || w.theta.size() != w.edges.size()) {
    throw Error(ErrorCode::GridMismatch, "segment view sizes are inconsistent");
  }
}

}  // namespace

FundamentalValues fundamental_ffs_serial(const SegmentView& w, std::span<const double> omega) {
  check_view(w);
  const std::size_t nw = omega.size();
  FundamentalValues out{std::vector<cplx>(nw), std::vector<cplx>(nw), std::vector<cplx>(nw)};
  const cplx half_i_inv{0.0, -0.5};  // 1 / (2i)
  for (std::size_t q = 0; q < nw; ++q) {
    const double om = omega[q];
    cplx xx{}, gp{}, gm{};
    for (std::size_t j = 0; j < w.amplitude.size(); ++j) {
      const double t = w.edges[j];
      const double d = w.edges[j + 1] - t;
      const double a = w.amplitude[j];
      const double th = w.theta[j];
      const cplx base = std::polar(1.0, om * t);
      xx += a * base * segment_integral(om, d);
      gp += std::polar(1.0, th) * base * segment_integral(om + a, d);
      gm += std::polar(1.0, -th) * base * segment_integral(om - a, d);
    }
    out.xx[q] = xx;
    out.zz[q] = 0.5 * (gp + gm);
    out.zy[q] = half_i_inv * (gp - gm);
  }
  return out;
}

FundamentalValues fundamental_ffs_parallel(const SegmentView& w, std::span<const double> omega) {
  check_view(w);
  const std::size_t nw = omega.size();
  const std::size_t ns = w.amplitude.size();
  FundamentalValues out{std::vector<cplx>(nw), std::vector<cplx>(nw), std::vector<cplx>(nw)};

  // Per-segment phase factors that do not depend on omega.
  std::vector<double> dur(ns);
  std::vector<cplx> rot_amp(ns), rot_theta(ns);
  bool uniform = ns > 0;
  for (std::size_t j = 0; j < ns; ++j) {
    dur[j] = w.edges[j + 1] - w.edges[j];
    rot_amp[j] = std::polar(1.0, w.amplitude[j] * dur[j]);
    rot_theta[j] = std::polar(1.0, w.theta[j]);
    if (std::abs(dur[j] - dur[0]) > 1e-12 * std::abs(dur[0])) uniform = false;
  }

  const cplx half_i_inv{0.0, -0.5};
  const long long nq = static_cast<long long>(nw);
#pragma omp parallel for schedule(static)
  for (long long qi = 0; qi < nq; ++qi) {
    const std::size_t q = static_cast<std::size_t>(qi);
    const double om = omega[q];
    cplx xx{}, gp{}, gm{};
    cplx phase{};
    const cplx step_uniform = uniform ? std::polar(1.0, om * dur[0]) : cplx{};
    for (std::size_t j = 0; j < ns; ++j) {
      if (j % kResyncBlock == 0) {
        phase = std::polar(1.0, om * w.edges[j]);
      }
      const double d = dur[j];
      const double a = w.amplitude[j];
      const cplx step = uniform ? step_uniform : std::polar(1.0, om * d);

      // (e^{i x d} - 1) / (i x), falling back to the sinc form near x = 0.
      auto integral = [&](double x, const cplx& e) -> cplx {
        if (std::abs(x * d) < 1e-2) return segment_integral(x, d);
        const cplx num = e - 1.0;
        return cplx{num.imag() / x, -num.real() / x};
      };

      xx += a * phase * integral(om, step);
      const cplx ep = step * rot_amp[j];
      const cplx em = step * std::conj(rot_amp[j]);
      gp += rot_theta[j] * phase * integral(om + a, ep);
      gm += std::conj(rot_theta[j]) * phase * integral(om - a, em);
      phase *= step;
    }
    out.xx[q] = xx;
    out.zz[q] = 0.5 * (gp + gm);
    out.zy[q] = half_i_inv * (gp - gm);
  }
  return out;
}

double toeplitz_quadratic_serial(std::span<const double> v, std::span<const double> r) {
  const std::size_t n = v.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      acc += v[i] * r[lag] * v[j];
    }
  }
  return acc;
}

double toeplitz_quadratic_parallel(std::span<const double> v, std::span<const double> r) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  std::vector<double> per_lag(n, 0.0);
  const long long nl = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long li = 0; li < nl; ++li) {
    const std::size_t lag = static_cast<std::size_t>(li);
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += v[i] * v[i + lag];
    per_lag[lag] = r[lag] * s;
  }
  double acc = per_lag[0];
  for (std::size_t lag = 1; lag < n; ++lag) acc += 2.0 * per_lag[lag];
  return acc;
}

void cosine_sum_serial(std::span<const double> amp, std::span<const double> freq,
                       std::span<const double> phase, double t0, double dt, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double t = t0 + static_cast<double>(j) * dt;
    double s = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) s += amp[i] * std::cos(freq[i] * t + phase[i]);
    out[j] = s;
  }
}

void cosine_sum_parallel(std::span<const double> amp, std::span<const double> freq,
                         std::span<const double> phase, double t0, double dt, std::span<double> out) {
  const std::size_t nt = out.size();
  const std::size_t nl = amp.size();
  std::vector<cplx> rot(nl);
  for (std::size_t i = 0; i < nl; ++i) rot[i] = std::polar(1.0, freq[i] * dt);

  const long long blocks = static_cast<long long>((nt + kTimeBlock - 1) / kTimeBlock);
#pragma omp parallel
  {
    std::vector<cplx> z(nl);
#pragma omp for schedule(static)
    for (long long b = 0; b < blocks; ++b) {
      const std::size_t j0 = static_cast<std::size_t>(b) * kTimeBlock;
      const std::size_t j1 = std::min(nt, j0 + kTimeBlock);
      const double ts = t0 + static_cast<double>(j0) * dt;
      for (std::size_t i = 0; i < nl; ++i) z[i] = std::polar(amp[i], freq[i] * ts + phase[i]);
      for (std::size_t j = j0; j < j1; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < nl; ++i) {
          s += z[i].real();
          z[i] *= rot[i];
        }
        out[j] = s;
      }
    }
  }
}

}  // namespace qns::kernels
