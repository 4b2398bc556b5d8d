#include "qns/dpss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qns/common.hpp"
#include "qns/error.hpp"
#include "qns/kernels.hpp"

namespace qns {

std::span<const double> DpssSet::sequence(std::size_t k) const {
  if (k >= sequences.size()) {
    throw Error(ErrorCode::OrderMissing, "order " + std::to_string(k) + " was not computed");
  }
  return sequences[k];
}

void fix_sign(std::span<double> v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return;
  for (double x : v) {
    if (std::abs(x) > kSignTolerance * peak) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

double sinc_kernel_rayleigh(std::span<const double> v, double half_bandwidth) {
  std::vector<double> r(v.size());
  if (!r.empty()) r[0] = 2.0 * half_bandwidth;
  for (std::size_t d = 1; d < r.size(); ++d) {
    const double x = static_cast<double>(d);
    r[d] = std::sin(kTwoPi * half_bandwidth * x) / (kPi * x);
  }
  return kernels::toeplitz_quadratic_parallel(v, r);
}

namespace detail {

Tridiagonal slepian_tridiagonal(std::size_t n, double half_bandwidth) {
  Tridiagonal t;
  t.diag.resize(n);
  t.off.resize(n > 0 ? n - 1 : 0);
  const double c = std::cos(kTwoPi * half_bandwidth);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 0.5 * (nd - 1.0 - 2.0 * static_cast<double>(i));
    t.diag[i] = h * h * c;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = static_cast<double>(i + 1);
    t.off[i] = 0.5 * a * (nd - a);
  }
  return t;
}

std::size_t sturm_count(const Tridiagonal& t, double x) {
  const std::size_t n = t.diag.size();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
    q = t.diag[i] - x - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

namespace {

std::pair<double, double> gershgorin(const Tridiagonal& t) {
  const std::size_t n = t.diag.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  return {lo - pad, hi + pad};
}

double matrix_scale(const Tridiagonal& t) {
  double s = 0.0;
  for (double d : t.diag) s = std::max(s, std::abs(d));
  for (double e : t.off) s = std::max(s, 2.0 * std::abs(e));
  return std::max(s, 1.0);
}

// Solves (T - mu I) x = b in place with a pivoted LU of the shifted matrix.
void shifted_solve(const Tridiagonal& t, double mu, std::vector<double>& b) {
  const std::size_t n = t.diag.size();
  const double guard = std::numeric_limits<double>::epsilon() * matrix_scale(t);
  // Row i of U holds u0[i] on the diagonal, u1[i], u2[i] on the next two columns.
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), mult(n, 0.0);
  std::vector<unsigned char> swapped(n, 0);

  std::vector<double> diag(n), sup(n, 0.0), sub(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) diag[i] = t.diag[i] - mu;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sup[i] = t.off[i];
    sub[i] = t.off[i];
  }

  // Working row i: (a, b, c) at columns (i, i+1, i+2).
  double a = diag[0];
  double bb = n > 1 ? sup[0] : 0.0;
  double cc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lower = sub[i];
    const double nd = diag[i + 1];
    const double ns = i + 2 < n ? sup[i + 1] : 0.0;
    if (std::abs(a) >= std::abs(lower)) {
      if (a == 0.0) a = guard;
      const double m = lower / a;
      u0[i] = a;
      u1[i] = bb;
      u2[i] = cc;
      mult[i] = m;
      a = nd - m * bb;
      bb = ns - m * cc;
      cc = 0.0;
    } else {
      const double m = a / lower;
      u0[i] = lower;
      u1[i] = nd;
      u2[i] = ns;
      mult[i] = m;
      swapped[i] = 1;
      const double na = bb - m * nd;
      const double nb = cc - m * ns;
      a = na;
      bb = nb;
      cc = 0.0;
    }
  }
  if (a == 0.0 || std::abs(a) < guard) a = a < 0.0 ? -guard : guard;
  u0[n - 1] = a;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (swapped[i]) std::swap(b[i], b[i + 1]);
    b[i + 1] -= mult[i] * b[i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    if (ii + 1 < n) s -= u1[ii] * b[ii + 1];
    if (ii + 2 < n) s -= u2[ii] * b[ii + 2];
    b[ii] = s / u0[ii];
  }
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

}  // namespace

double bisect_eigenvalue(const Tridiagonal& t, std::size_t j) {
  const std::size_t n = t.diag.size();
  const std::size_t target = n - j;  // want count(x) >= target
  auto [lo, hi] = gershgorin(t);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> inverse_iteration(const Tridiagonal& t, double eigenvalue, std::size_t seed) {
  const std::size_t n = t.diag.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) + 0.5 + static_cast<double>(seed);
    v[i] = 1.0 + 0.5 * std::sin(0.7071 * x) + 0.25 * std::cos(1.3 * x * x / static_cast<double>(n));
  }
  normalize(v);
  for (int it = 0; it < 3; ++it) {
    shifted_solve(t, eigenvalue, v);
    normalize(v);
  }
  return v;
}

}  // namespace detail

DpssSet compute_dpss(const DpssParams& params) {
  const std::size_t n = params.length;
  const double w = params.half_bandwidth;
  if (n < 2) throw Error(ErrorCode::InvalidParams, "N must be at least 2");
  if (!(w > 0.0 && w < 0.5)) {
    std::ostringstream msg;
    msg << "W=" << w << " outside (0, 0.5)";
    throw Error(ErrorCode::InvalidParams, msg.str());
  }
  if (params.max_order >= n) throw Error(ErrorCode::InvalidParams, "k_max must be below N");

  DpssSet set;
  set.params = params;
  if (2.0 * params.time_bandwidth() < 1.0) {
    set.warnings.push_back("2NW < 1: no well-concentrated sequences exist");
  }

  const auto tri = detail::slepian_tridiagonal(n, w);
  const std::size_t orders = params.max_order + 1;
  set.sequences.reserve(orders);
  set.eigenvalues.reserve(orders);
  for (std::size_t k = 0; k < orders; ++k) {
    const double mu = detail::bisect_eigenvalue(tri, k);
    auto v = detail::inverse_iteration(tri, mu, k);
    // Reorthogonalize against lower orders; the tridiagonal spectrum is simple
    // so this only removes rounding residue.
    for (std::size_t j = 0; j < k; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i] * set.sequences[j][i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * set.sequences[j][i];
    }
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
    fix_sign(v);
    set.eigenvalues.push_back(sinc_kernel_rayleigh(v, w));
    set.sequences.push_back(std::move(v));
  }
  return set;
}

double dpswf_value(std::span<const double> sequence, std::size_t k, double dt, double omega) {
  const std::size_t n = sequence.size();
  const double c = 0.5 * static_cast<double>(n - 1);
  double s = 0.0;
  if (k % 2 == 0) {
    for (std::size_t i = 0; i < n; ++i) s += sequence[i] * std::cos(omega * (static_cast<double>(i) - c) * dt);
    return s;
  }
  for (std::size_t i = 0; i < n; ++i) s += sequence[i] * std::sin(omega * (static_cast<double>(i) - c) * dt);
  return -s;
}

Dpswf evaluate_dpswf(const DpssSet& set, std::size_t k, double dt, std::span<const double> omega) {
  const auto seq = set.sequence(k);
  Dpswf out;
  out.order = k;
  out.step = dt;
  out.omega.assign(omega.begin(), omega.end());
  out.values.resize(omega.size());
  out.aliased.resize(omega.size());
  const double nyquist = kPi / dt;
  const long long m = static_cast<long long>(omega.size());
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < m; ++q) {
    const auto i = static_cast<std::size_t>(q);
    out.values[i] = dpswf_value(seq, k, dt, omega[i]);
    out.aliased[i] = std::abs(omega[i]) > nyquist * (1.0 + 1e-12) ? 1 : 0;
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::GridEmpty, "grid with zero points");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

}  // namespace qns
