#include "qns/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qns/common.hpp"
#include "qns/error.hpp"
#include "qns/filters.hpp"
#include "qns/rng.hpp"

namespace qns {

using cplx = std::complex<double>;

Su2 Su2::operator*(const Su2& r) const {
  return Su2{alpha * r.alpha - std::conj(beta) * r.beta, beta * r.alpha + std::conj(alpha) * r.beta};
}

std::array<double, 3> Su2::error_vector() const {
  const double u0 = alpha.real();
  const double ux = -beta.imag();
  const double uy = beta.real();
  const double uz = -alpha.imag();
  const double norm = std::sqrt(ux * ux + uy * uy + uz * uz);
  if (norm == 0.0) return {0.0, 0.0, 0.0};
  const double angle = std::atan2(norm, u0);
  const double f = angle / norm;
  return {f * ux, f * uy, f * uz};
}

std::array<double, 3> Su2::survival() const {
  const double u0 = alpha.real();
  const double ux = -beta.imag();
  const double uy = beta.real();
  const double uz = -alpha.imag();
  const double d = u0 * u0 + ux * ux + uy * uy + uz * uz;
  return {(u0 * u0 + ux * ux) / d, (u0 * u0 + uy * uy) / d, (u0 * u0 + uz * uz) / d};
}

Su2 exp_pauli(double hx, double hy, double hz) {
  const double theta = std::sqrt(hx * hx + hy * hy + hz * hz);
  const double c = std::cos(theta);
  const double s = sinc(theta);  // sin(theta) / theta
  return Su2{cplx{c, -s * hz}, cplx{s * hy, -s * hx}};
}

namespace {

void check_cover(const NoiseRealization* r, double tau) {
  if (r == nullptr) return;
  const double tol = 1e-9 * std::max(tau, r->grid.step);
  if (r->grid.start > tol || r->grid.end() < tau - tol) {
    throw Error(ErrorCode::GridMismatch, "noise grid does not cover the waveform duration");
  }
}

double substep_limit(const NoiseRealization* bz, const NoiseRealization* bo, const PropagationOptions& opt) {
  if (opt.max_substep > 0.0) return opt.max_substep;
  double lim = 0.0;
  if (bz != nullptr) lim = bz->grid.step;
  if (bo != nullptr) lim = lim > 0.0 ? std::min(lim, bo->grid.step) : bo->grid.step;
  return lim;
}

template <class Visit>
void for_each_substep(const Waveform& w, double limit, std::size_t substeps, Visit&& visit) {
  const auto theta = rotation_angle(w);
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    const double t0 = w.edges[j];
    const double d = w.edges[j + 1] - t0;
    std::size_t s = std::max<std::size_t>(substeps, 1);
    if (limit > 0.0) s = std::max(s, static_cast<std::size_t>(std::ceil(d / limit - 1e-9)));
    const double h = d / static_cast<double>(s);
    for (std::size_t i = 0; i < s; ++i) {
      const double off = h * (static_cast<double>(i) + 0.5);
      visit(t0 + off, h, w.values[j], theta.values[j] + w.values[j] * off);
    }
  }
}

}  // namespace

Su2 propagate_exact(const Waveform& w, const NoiseRealization* beta_z, const NoiseRealization* beta_omega,
                    PropagationOptions opt) {
  const double tau = w.duration();
  check_cover(beta_z, tau);
  check_cover(beta_omega, tau);
  Su2 u;
  for_each_substep(w, substep_limit(beta_z, beta_omega, opt), opt.substeps,
                   [&](double t, double h, double omega, double) {
                     const double bz = beta_z ? beta_z->value_at(t) : 0.0;
                     const double bo = beta_omega ? beta_omega->value_at(t) : 0.0;
                     u = exp_pauli(0.5 * omega * (1.0 + bo) * h, 0.0, bz * h) * u;
                   });
  const double final_theta = rotation_angle(w).final_value();
  return exp_pauli(-0.5 * final_theta, 0.0, 0.0) * u;
}

std::array<double, 3> first_order_error_vector(const Waveform& w, const NoiseRealization* beta_z,
                                               const NoiseRealization* beta_omega, PropagationOptions opt) {
  const double tau = w.duration();
  check_cover(beta_z, tau);
  check_cover(beta_omega, tau);
  std::array<double, 3> a{0.0, 0.0, 0.0};
  for_each_substep(w, substep_limit(beta_z, beta_omega, opt), opt.substeps,
                   [&](double t, double h, double omega, double theta_mid) {
                     if (beta_z) {
                       const double bz = beta_z->value_at(t);
                       const double weight = h * sinc(0.5 * omega * h);
                       a[1] += bz * weight * std::sin(theta_mid);
                       a[2] += bz * weight * std::cos(theta_mid);
                     }
                     if (beta_omega) a[0] += 0.5 * omega * beta_omega->value_at(t) * h;
                   });
  return a;
}

TimeGrid covering_grid(double tau, double step) {
  if (!(tau > 0.0) || !(step > 0.0)) throw Error(ErrorCode::InvalidParams, "grid needs tau > 0 and step > 0");
  const auto intervals = static_cast<std::size_t>(std::ceil(tau / step - 1e-9));
  const std::size_t n = std::max<std::size_t>(intervals, 1);
  return TimeGrid{0.0, tau / static_cast<double>(n), n + 1};
}

std::vector<NoisePair> generate_ensemble(const NoiseSpec& spec, const TimeGrid& grid, std::size_t count,
                                         std::uint64_t seed, bool samples) {
  const double spacing =
      spec.comb_spacing > 0.0 ? spec.comb_spacing : default_comb_spacing(grid.end() - grid.start);
  std::vector<NoisePair> out(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long ri = 0; ri < n; ++ri) {
    const auto r = static_cast<std::uint64_t>(ri);
    auto make = [&](const Spectrum& s, std::uint64_t stream, NoiseComponent c) {
      const auto sd = derive_seed(seed, stream, r);
      if (samples) return realize(s, grid, spacing, sd, c);
      auto x = draw_phases(s, spacing, sd, c);
      x.grid = grid;
      return x;
    };
    if (spec.dephasing) out[r].dephasing = make(*spec.dephasing, streams::kDephasing, NoiseComponent::Dephasing);
    if (spec.amplitude) out[r].amplitude = make(*spec.amplitude, streams::kAmplitude, NoiseComponent::Amplitude);
  }
  return out;
}

SimulationRecord simulate(const Waveform& w, std::span<const NoisePair> ensemble, bool exact,
                          PropagationOptions opt) {
  if (ensemble.empty()) throw Error(ErrorCode::InvalidParams, "noise ensemble is empty");
  SimulationRecord rec;
  rec.outcomes.resize(ensemble.size());
  std::vector<std::string> failures(ensemble.size());
  const long long n = static_cast<long long>(ensemble.size());
#pragma omp parallel for schedule(dynamic)
  for (long long ri = 0; ri < n; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const auto& p = ensemble[r];
    const NoiseRealization* bz = p.dephasing ? &*p.dephasing : nullptr;
    const NoiseRealization* bo = p.amplitude ? &*p.amplitude : nullptr;
    try {
      rec.outcomes[r].first_order = first_order_error_vector(w, bz, bo, opt);
      if (exact) rec.outcomes[r].exact = propagate_exact(w, bz, bo, opt).survival();
    } catch (const Error& e) {
      failures[r] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(ErrorCode::GridMismatch, f);
  }
  rec.has_exact = exact;
  return rec;
}

namespace {

// Fundamental filters at the comb lines of one noise component, reused while
// consecutive realizations share the same comb.
class CombFilters {
 public:
  explicit CombFilters(const Waveform& w) : w_(w) {}

  const FundamentalFfs& at(const Comb& c) {
    if (!valid_ || c.omega != ffs_.omega) {
      ffs_ = fundamental_ffs(w_, c.omega);
      valid_ = true;
    }
    return ffs_;
  }

 private:
  const Waveform& w_;
  FundamentalFfs ffs_;
  bool valid_ = false;
};

double project(const NoiseRealization& r, const std::vector<std::complex<double>>& f) {
  double a = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) a += r.comb.amplitude[i] * std::real(std::polar(1.0, r.phases[i]) * f[i]);
  return a;
}

}  // namespace

SimulationRecord simulate_spectral(const Waveform& w, std::span<const NoisePair> ensemble) {
  if (ensemble.empty()) throw Error(ErrorCode::InvalidParams, "noise ensemble is empty");
  SimulationRecord rec;
  rec.outcomes.resize(ensemble.size());
  CombFilters fz(w), fo(w);
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const auto& p = ensemble[r];
    auto& a = rec.outcomes[r].first_order;
    if (p.dephasing && !p.dephasing->comb.omega.empty()) {
      const auto& f = fz.at(p.dephasing->comb);
      a[1] = project(*p.dephasing, f.zy);
      a[2] = project(*p.dephasing, f.zz);
    }
    if (p.amplitude && !p.amplitude->comb.omega.empty()) {
      a[0] = 0.5 * project(*p.amplitude, fo.at(p.amplitude->comb).xx);
    }
  }
  return rec;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  std::size_t n = 0;

  static void neumaier(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  void add(double x) {
    neumaier(sum, comp, x);
    ++n;
  }
  double mean() const { return n ? (sum + comp) / static_cast<double>(n) : 0.0; }
};

Moment summarize(const std::vector<double>& x) {
  Accumulator acc;
  for (double v : x) acc.add(v);
  // Two-pass variance for accuracy.
  const double m = acc.mean();
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  const double se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return Moment{m, se};
}

}  // namespace

ErrorVectorMoments moments(const SimulationRecord& rec) {
  ErrorVectorMoments m;
  m.count = rec.outcomes.size();
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> v(rec.outcomes.size());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = rec.outcomes[r].first_order[i] * rec.outcomes[r].first_order[i];
    m.second[i] = summarize(v);
  }
  return m;
}

TomographyRecord readout_corrected(const TomographyRecord& rec) {
  TomographyRecord t = rec;
  if (rec.fidelity == 1.0) return t;
  const double d = std::abs(2.0 * rec.fidelity - 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    t.probability[i] = invert_readout(rec.probability[i], rec.fidelity);
    t.std_error[i] = rec.std_error[i] / d;
  }
  for (auto& p : t.per_realization) {
    for (double& x : p) x = invert_readout(x, rec.fidelity);
  }
  t.fidelity = 1.0;
  return t;
}

double readout_channel(double p, double fidelity) { return fidelity * p + (1.0 - fidelity) * (1.0 - p); }

double invert_readout(double p, double fidelity) {
  const double d = 2.0 * fidelity - 1.0;
  if (std::abs(d) < 1e-12) throw Error(ErrorCode::InvalidParams, "readout fidelity 1/2 is not invertible");
  return (p - (1.0 - fidelity)) / d;
}

TomographyRecord tomography(const SimulationRecord& rec, const TomographyOptions& opt) {
  if (rec.outcomes.empty()) throw Error(ErrorCode::InvalidParams, "empty ensemble");
  if (opt.mode == TomographyMode::Exact && !rec.has_exact) {
    throw Error(ErrorCode::InvalidParams, "exact tomography requested but the simulation skipped it");
  }
  if (opt.fidelity < 0.0 || opt.fidelity > 1.0) throw Error(ErrorCode::InvalidParams, "fidelity outside [0, 1]");
  const std::size_t n = rec.outcomes.size();
  TomographyRecord t;
  t.shots = opt.shots;
  t.realizations = n;
  t.fidelity = opt.fidelity;
  t.per_realization.resize(n);

  std::array<double, 3> mean_ideal{0.0, 0.0, 0.0};
  for (std::size_t r = 0; r < n; ++r) {
    std::array<double, 3> p;
    if (opt.mode == TomographyMode::Exact) {
      p = rec.outcomes[r].exact;
    } else {
      const auto& a = rec.outcomes[r].first_order;
      const double x2 = a[0] * a[0], y2 = a[1] * a[1], z2 = a[2] * a[2];
      p = {1.0 - y2 - z2, 1.0 - x2 - z2, 1.0 - x2 - y2};
    }
    for (std::size_t i = 0; i < 3; ++i) mean_ideal[i] += p[i] / static_cast<double>(n);
    t.per_realization[r] = p;
  }
  if (opt.mode == TomographyMode::FirstOrder) {
    for (double p : mean_ideal) {
      if (p < 0.0 || p > 1.0) {
        throw Error(ErrorCode::ProbabilityRange, "first-order probability outside [0, 1]; noise too strong");
      }
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < 3; ++i) {
      double p = readout_channel(t.per_realization[r][i], opt.fidelity);
      if (opt.shots > 0) {
        std::mt19937_64 gen(derive_seed(opt.seed, streams::kShots, 3 * r + i));
        std::binomial_distribution<std::uint64_t> bin(opt.shots, std::clamp(p, 0.0, 1.0));
        const auto c = bin(gen);
        t.counts[i] += c;
        p = static_cast<double>(c) / static_cast<double>(opt.shots);
      }
      t.per_realization[r][i] = p;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = t.per_realization[r][i];
    const auto m = summarize(v);
    t.probability[i] = m.mean;
    t.std_error[i] = m.std_error;
  }
  return t;
}

namespace {

std::array<double, 3> projections_of(const std::array<double, 3>& p) {
  return {0.5 * (1.0 + p[0] - p[1] - p[2]), 0.5 * (1.0 + p[1] - p[0] - p[2]), 0.5 * (1.0 + p[2] - p[0] - p[1])};
}

}  // namespace

SignalProjections signal_projections(const TomographyRecord& rec) {
  SignalProjections s;
  if (rec.per_realization.empty()) {
    s.value = projections_of(rec.probability);
    return s;
  }
  const std::size_t n = rec.per_realization.size();
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = projections_of(rec.per_realization[r])[i];
    const auto m = summarize(v);
    s.value[i] = m.mean;
    s.std_error[i] = m.std_error;
  }
  return s;
}

namespace {

void paired_terms(const SimulationRecord& rec, std::vector<double>& diff, std::vector<double>& ay2) {
  const std::size_t n = rec.outcomes.size();
  diff.resize(n);
  ay2.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& o = rec.outcomes[r];
    const double sy = projections_of(o.exact)[1];
    ay2[r] = o.first_order[1] * o.first_order[1];
    diff[r] = sy - ay2[r];
  }
}

}  // namespace

BiasEstimate higher_order_diagnostic(const SimulationRecord& rec) {
  if (!rec.has_exact) throw Error(ErrorCode::InvalidParams, "diagnostic needs exact-mode outcomes");
  std::vector<double> diff, ay2;
  paired_terms(rec, diff, ay2);
  const auto d = summarize(diff);
  const auto a = summarize(ay2);
  if (a.mean <= 0.0) return {};
  return BiasEstimate{d.mean / a.mean, d.std_error / a.mean};
}

BiasComparison compare_bias(const SimulationRecord& a, const SimulationRecord& b, std::size_t resamples,
                            std::uint64_t seed) {
  if (a.outcomes.size() != b.outcomes.size() || a.outcomes.empty()) {
    throw Error(ErrorCode::InvalidParams, "paired comparison needs equally sized ensembles");
  }
  std::vector<double> da, ya, db, yb;
  paired_terms(a, da, ya);
  paired_terms(b, db, yb);
  const std::size_t n = da.size();
  auto ratio = [](const std::vector<double>& d, const std::vector<double>& y, const std::vector<std::size_t>* idx) {
    double sd = 0.0, sy = 0.0;
    const std::size_t m = idx ? idx->size() : d.size();
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = idx ? (*idx)[i] : i;
      sd += d[k];
      sy += y[k];
    }
    return sy > 0.0 ? sd / sy : 0.0;
  };
  BiasComparison c;
  c.bias_a = ratio(da, ya, nullptr);
  c.bias_b = ratio(db, yb, nullptr);
  std::mt19937_64 gen(derive_seed(seed, streams::kBootstrap, 0));
  std::vector<double> stats(resamples);
  std::vector<std::size_t> idx(n);
  for (std::size_t s = 0; s < resamples; ++s) {
    for (auto& k : idx) k = static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n));
    stats[s] = std::abs(ratio(da, ya, &idx)) - std::abs(ratio(db, yb, &idx));
  }
  std::sort(stats.begin(), stats.end());
  const std::size_t q = std::min(resamples - 1, static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(resamples))) - 1);
  c.upper_quantile = resamples ? stats[q] : 0.0;
  c.a_smaller = resamples > 0 && c.upper_quantile < 0.0;
  return c;
}

}  // namespace qns
