#include "qns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "qns/common.hpp"
#include "qns/dpss.hpp"
#include "qns/error.hpp"
#include "qns/kernels.hpp"
#include "qns/rng.hpp"

namespace qns {

std::string to_string(SpectrumForm form) {
  switch (form) {
    case SpectrumForm::Gridded: return "gridded";
    case SpectrumForm::OneOverFWithSpurs: return "one_over_f_with_spurs";
    case SpectrumForm::GaussianBump: return "gaussian_bump";
    case SpectrumForm::White: return "white";
    case SpectrumForm::DeltaTone: return "delta_tone";
  }
  return "white";
}

namespace {

double gaussian(const GaussianPeak& p, double w) {
  const double z = (w - p.center) / p.width;
  return p.height * std::exp(-0.5 * z * z);
}

}  // namespace

double Spectrum::operator()(double omega) const {
  const double w = std::abs(omega);
  if (w < lower || w > cutoff) return 0.0;
  switch (form) {
    case SpectrumForm::White:
      return level;
    case SpectrumForm::OneOverFWithSpurs: {
      double s = level / std::pow(1.0 + w / knee, exponent);
      for (const auto& p : peaks) s += gaussian(p, w);
      return s;
    }
    case SpectrumForm::GaussianBump: {
      double s = 0.0;
      for (const auto& p : peaks) s += gaussian(p, w);
      return s;
    }
    case SpectrumForm::DeltaTone:
      return 0.0;
    case SpectrumForm::Gridded: {
      if (grid_omega.empty() || w < grid_omega.front() || w > grid_omega.back()) return 0.0;
      const auto it = std::upper_bound(grid_omega.begin(), grid_omega.end(), w);
      if (it == grid_omega.end()) return grid_values.back();
      const std::size_t j = static_cast<std::size_t>(it - grid_omega.begin());
      if (j == 0) return grid_values.front();
      const double t = (w - grid_omega[j - 1]) / (grid_omega[j] - grid_omega[j - 1]);
      return grid_values[j - 1] + t * (grid_values[j] - grid_values[j - 1]);
    }
  }
  return 0.0;
}

std::vector<double> Spectrum::evaluate(std::span<const double> omega) const {
  std::vector<double> out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = (*this)(omega[i]);
  return out;
}

Spectrum white(double level, double cutoff) {
  if (level < 0.0) throw Error(ErrorCode::InvalidParams, "white level must be nonnegative");
  Spectrum s;
  s.form = SpectrumForm::White;
  s.level = level;
  s.cutoff = cutoff;
  return s;
}

Spectrum one_over_f_with_spurs(double level, double exponent, double knee, std::vector<GaussianPeak> spurs,
                               double cutoff) {
  if (level < 0.0 || !(knee > 0.0)) throw Error(ErrorCode::InvalidParams, "1/f needs level >= 0 and knee > 0");
  for (const auto& p : spurs) {
    if (p.height < 0.0 || !(p.width > 0.0)) throw Error(ErrorCode::InvalidParams, "spur needs height >= 0, width > 0");
  }
  Spectrum s;
  s.form = SpectrumForm::OneOverFWithSpurs;
  s.level = level;
  s.exponent = exponent;
  s.knee = knee;
  s.peaks = std::move(spurs);
  s.cutoff = cutoff;
  return s;
}

Spectrum gaussian_bump(double center, double width, double height, double cutoff) {
  if (height < 0.0 || !(width > 0.0)) throw Error(ErrorCode::InvalidParams, "bump needs height >= 0, width > 0");
  Spectrum s;
  s.form = SpectrumForm::GaussianBump;
  s.peaks = {GaussianPeak{center, width, height}};
  s.cutoff = cutoff;
  return s;
}

Spectrum delta_tone(double omega, double power) {
  if (!(omega > 0.0) || power < 0.0) throw Error(ErrorCode::InvalidParams, "tone needs w > 0, power >= 0");
  Spectrum s;
  s.form = SpectrumForm::DeltaTone;
  s.tone_frequency = omega;
  s.tone_power = power;
  return s;
}

Spectrum gridded(std::vector<double> omega, std::vector<double> values) {
  if (omega.size() != values.size() || omega.size() < 2) {
    throw Error(ErrorCode::GridMismatch, "gridded spectrum needs matching grids of at least two points");
  }
  for (std::size_t i = 1; i < omega.size(); ++i) {
    if (!(omega[i] > omega[i - 1])) throw Error(ErrorCode::InvalidParams, "gridded spectrum grid must increase");
  }
  for (double v : values) {
    if (v < 0.0) throw Error(ErrorCode::InvalidParams, "spectrum values must be nonnegative");
  }
  Spectrum s;
  s.form = SpectrumForm::Gridded;
  s.cutoff = omega.back();
  s.grid_omega = std::move(omega);
  s.grid_values = std::move(values);
  return s;
}

Comb make_comb(const Spectrum& s, double spacing) {
  Comb c;
  if (s.is_delta()) {
    c.omega = {s.tone_frequency};
    c.amplitude = {std::sqrt(2.0 * s.tone_power / kPi)};
    return c;
  }
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidParams, "comb spacing must be positive");
  if (!std::isfinite(s.cutoff)) throw Error(ErrorCode::InvalidParams, "spectrum needs a finite cutoff");
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(s.lower / spacing - 0.5)));
  for (std::size_t i = first;; ++i) {
    const double w = (static_cast<double>(i) + 0.5) * spacing;
    if (w > s.cutoff) break;
    c.omega.push_back(w);
    c.amplitude.push_back(2.0 * std::sqrt(s(w) * spacing / kTwoPi));
  }
  if (c.omega.empty()) throw Error(ErrorCode::EmptyComb, "no comb line falls inside the spectrum bounds");
  return c;
}

double NoiseRealization::value_at(double t) const {
  if (samples.empty()) return 0.0;
  const double pos = (t - grid.start) / grid.step;
  if (pos <= 0.0) return samples.front();
  const double last = static_cast<double>(samples.size() - 1);
  if (pos >= last) return samples.back();
  const auto j = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(j);
  return samples[j] + f * (samples[j + 1] - samples[j]);
}

double default_comb_spacing(double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidParams, "duration must be positive");
  return kTwoPi / (4.0 * tau);
}

NoiseRealization realize_with_phases(const Spectrum& s, const TimeGrid& grid, double spacing,
                                     std::vector<double> phases, NoiseComponent component) {
  if (grid.count == 0 || !(grid.step > 0.0)) throw Error(ErrorCode::GridEmpty, "time grid is empty");
  NoiseRealization r;
  r.component = component;
  r.grid = grid;
  r.comb = make_comb(s, spacing);
  if (phases.size() != r.comb.omega.size()) throw Error(ErrorCode::GridMismatch, "one phase per comb line required");
  r.phases = std::move(phases);
  r.samples.resize(grid.count);
  kernels::cosine_sum_parallel(r.comb.amplitude, r.comb.omega, r.phases, grid.start, grid.step, r.samples);
  return r;
}

NoiseRealization draw_phases(const Spectrum& s, double spacing, std::uint64_t seed, NoiseComponent component) {
  NoiseRealization r;
  r.component = component;
  r.seed = seed;
  r.comb = make_comb(s, spacing);
  std::mt19937_64 gen(seed);
  r.phases.resize(r.comb.omega.size());
  for (double& p : r.phases) p = kTwoPi * uniform01(gen);
  return r;
}

NoiseRealization realize(const Spectrum& s, const TimeGrid& grid, double spacing, std::uint64_t seed,
                         NoiseComponent component) {
  auto phases = draw_phases(s, spacing, seed, component).phases;
  auto r = realize_with_phases(s, grid, spacing, std::move(phases), component);
  r.seed = seed;
  return r;
}

std::vector<NoiseRealization> phase_sweep_tone(double omega, double power, std::size_t n_phases,
                                               const TimeGrid& grid, NoiseComponent component) {
  if (n_phases < 2) throw Error(ErrorCode::InvalidParams, "phase sweep needs at least two phases");
  const Spectrum s = delta_tone(omega, power);
  std::vector<NoiseRealization> out;
  out.reserve(n_phases);
  for (std::size_t j = 0; j < n_phases; ++j) {
    const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_phases);
    out.push_back(realize_with_phases(s, grid, 0.0, {phi}, component));
    out.back().seed = j;
  }
  return out;
}

VerificationReport verify_realizations(std::span<const NoiseRealization> realizations, const Spectrum& s,
                                       std::size_t bins, double tolerance) {
  if (realizations.empty()) throw Error(ErrorCode::InvalidParams, "no realizations to verify");
  if (s.is_delta()) throw Error(ErrorCode::InvalidParams, "a delta tone has no continuous spectrum to verify");
  const TimeGrid grid = realizations.front().grid;
  for (const auto& r : realizations) {
    if (r.grid.count != grid.count || r.grid.step != grid.step) {
      throw Error(ErrorCode::GridMismatch, "realizations use different time grids");
    }
  }
  const std::size_t m = grid.count;
  const double nw = 4.0;
  if (static_cast<double>(m) < 4.0 * nw) throw Error(ErrorCode::InvalidParams, "record too short to verify");
  const auto taper = compute_dpss({m, nw / static_cast<double>(m), 0});
  const auto w = taper.sequence(0);
  double w2 = 0.0;
  for (double x : w) w2 += x * x;

  const double record = grid.step * static_cast<double>(m);
  const double resolution = kTwoPi * nw / record;
  const Comb comb = make_comb(s, realizations.front().comb.omega.size() > 1
                                     ? realizations.front().comb.omega[1] - realizations.front().comb.omega[0]
                                     : kTwoPi / record);
  const double lo = comb.omega.front() + 2.0 * resolution;
  const double hi = std::min(comb.omega.back(), kPi / grid.step) - 2.0 * resolution;
  if (!(hi > lo) || bins == 0) throw Error(ErrorCode::InvalidParams, "no verifiable band inside the comb");

  VerificationReport rep;
  rep.realizations = realizations.size();
  rep.low_confidence = realizations.size() < 100;
  rep.omega = uniform_grid(lo, hi, bins);
  rep.estimate.assign(bins, 0.0);
  const long long nb = static_cast<long long>(bins);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < nb; ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    const double om = rep.omega[b];
    double acc = 0.0;
    for (const auto& r : realizations) {
      std::complex<double> x{};
      for (std::size_t j = 0; j < m; ++j) x += w[j] * r.samples[j] * std::polar(1.0, -om * grid.at(j));
      acc += std::norm(x * grid.step);
    }
    rep.estimate[b] = acc / static_cast<double>(realizations.size()) / (grid.step * w2);
  }
  rep.truth = s.evaluate(rep.omega);
  rep.relative_error.resize(bins);
  double chi2 = 0.0;
  double mean_rel = 0.0;
  const double count = static_cast<double>(realizations.size());
  for (std::size_t b = 0; b < bins; ++b) {
    const double t = rep.truth[b];
    const double rel = t > 0.0 ? (rep.estimate[b] - t) / t : (rep.estimate[b] > 0.0 ? 1.0 : 0.0);
    rep.relative_error[b] = rel;
    mean_rel += std::abs(rel);
    chi2 += count * rel * rel;
  }
  rep.mean_relative_error = mean_rel / static_cast<double>(bins);
  rep.chi2_per_bin = chi2 / static_cast<double>(bins);
  rep.consistent = rep.mean_relative_error <= tolerance;
  return rep;
}

}  // namespace qns
