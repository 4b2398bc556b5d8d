#include "qns/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qns/error.hpp"

namespace qns {

SegmentGrid::SegmentGrid(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) throw Error(ErrorCode::InvalidParams, "segment grid needs at least one segment");
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (!(boundaries_[i] > boundaries_[i - 1])) {
      throw Error(ErrorCode::InvalidParams, "segment boundaries must increase strictly");
    }
  }
}

std::size_t SegmentGrid::locate(double omega) const {
  if (omega < boundaries_.front() || omega >= boundaries_.back()) return size();
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), omega);
  return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

namespace {

PointEstimate ratio_estimate(double projection, double error, const FilterFunction& ff, Band band, double omega_s) {
  const double a = band_integral(ff, band);
  if (!(a > kDegenerateBandFloor)) {
    throw Error(ErrorCode::DegenerateBand, "filter has no weight in the band");
  }
  return PointEstimate{omega_s, projection / a, std::abs(error) / a};
}

}  // namespace

PointEstimate single_taper(double projection, double projection_error, const FilterFunction& dephasing, Band band,
                           double omega_s) {
  return ratio_estimate(projection, projection_error, dephasing, band, omega_s);
}

PointEstimate amplitude_estimate(double projection, double projection_error, const FilterFunction& amplitude,
                                 Band band, double omega_s) {
  return ratio_estimate(projection, projection_error, amplitude, band, omega_s);
}

MultiAxisResult multi_axis(std::span<const AxisMeasurement> records) {
  MultiAxisResult out;
  for (const auto& r : records) {
    out.dephasing.push_back(
        single_taper(r.projections.value[1], r.projections.std_error[1], r.dephasing, r.band, r.omega_s));
    out.amplitude.push_back(
        amplitude_estimate(r.projections.value[0], r.projections.std_error[0], r.amplitude, r.band, r.omega_s));
  }
  return out;
}

Eigen::MatrixXd filter_matrix(std::span<const FilterFunction> ffs, const SegmentGrid& grid) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(ffs.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t s = 0; s < ffs.size(); ++s) {
    for (std::size_t l = 0; l < grid.size(); ++l) {
      f(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(l)) = band_integral(ffs[s], grid.segment(l));
    }
  }
  return f;
}

namespace {

double symmetric_condition(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

void check_model(const BayesianModel& m) {
  const auto l = m.coarse.cols();
  if (m.coarse_y.size() != m.coarse.rows() || m.coarse_var.size() != m.coarse.rows() || m.selector.size() != l ||
      m.reference.size() != l) {
    throw Error(ErrorCode::GridMismatch, "Bayesian model dimensions are inconsistent");
  }
  if ((m.coarse_var.array() <= 0.0).any()) throw Error(ErrorCode::InvalidParams, "coarse variances must be positive");
}

}  // namespace

Prior build_prior(const BayesianModel& model, bool require_invertible) {
  check_model(model);
  const Eigen::VectorXd winv = model.coarse_var.cwiseInverse();
  const Eigen::VectorXd reg = 2.0 * model.lambda * model.lambda * model.selector.cwiseAbs2();
  Prior p;
  p.precision = model.coarse.transpose() * winv.asDiagonal() * model.coarse;
  p.precision.diagonal() += reg;
  p.information = model.coarse.transpose() * winv.asDiagonal() * model.coarse_y;
  p.information += reg.cwiseProduct(model.reference);
  p.condition = symmetric_condition(p.precision);
  p.invertible = p.condition <= kSingularCondition;
  if (p.invertible) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(p.precision);
    p.mean = ldlt.solve(p.information);
    p.covariance = ldlt.solve(Eigen::MatrixXd::Identity(p.precision.rows(), p.precision.cols()));
  } else if (require_invertible) {
    throw Error(ErrorCode::SingularSystem,
                "regularized prior precision is singular (condition " + std::to_string(p.condition) + ")");
  }
  return p;
}

Posterior posterior_update(const Prior& prior, const Eigen::MatrixXd& fine, const Eigen::VectorXd& fine_y,
                           const Eigen::VectorXd& fine_var) {
  if (fine.cols() != prior.precision.cols() || fine_y.size() != fine.rows() || fine_var.size() != fine.rows()) {
    throw Error(ErrorCode::GridMismatch, "fine data dimensions do not match the prior");
  }
  if ((fine_var.array() <= 0.0).any()) throw Error(ErrorCode::InvalidParams, "fine variances must be positive");
  const Eigen::VectorXd winv = fine_var.cwiseInverse();
  Eigen::MatrixXd precision = fine.transpose() * winv.asDiagonal() * fine + prior.precision;
  const Eigen::VectorXd info = fine.transpose() * winv.asDiagonal() * fine_y + prior.information;
  Posterior post;
  post.condition = symmetric_condition(precision);
  if (post.condition > kSingularCondition) {
    throw Error(ErrorCode::SingularSystem,
                "posterior precision is singular (condition " + std::to_string(post.condition) + ")");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(precision);
  post.mean = ldlt.solve(info);
  post.covariance = ldlt.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
  return post;
}

double prior_objective(const BayesianModel& model, const Eigen::VectorXd& s) {
  const Eigen::VectorXd r = model.coarse_y - model.coarse * s;
  const double data = 0.5 * r.cwiseAbs2().cwiseQuotient(model.coarse_var).sum();
  const Eigen::VectorXd d = (model.lambda * model.selector).cwiseProduct(s - model.reference);
  return data + d.squaredNorm();
}

PointEstimate multitaper_estimate(std::span<const double> projections, std::span<const double> errors,
                                  std::span<const double> weights, const FilterFunction& multitaper, Band band,
                                  double omega_s) {
  if (projections.size() != weights.size() || errors.size() != weights.size() || weights.empty()) {
    throw Error(ErrorCode::InvalidParams, "one projection, error and weight per order required");
  }
  double num = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    num += weights[k] * projections[k];
    var += weights[k] * weights[k] * errors[k] * errors[k];
  }
  return ratio_estimate(num, std::sqrt(var), multitaper, band, omega_s);
}

std::vector<double> as_harmonic_powers(const Waveform& base, double omega0, std::size_t m_max) {
  std::vector<double> omega(m_max);
  for (std::size_t n = 1; n <= m_max; ++n) omega[n - 1] = omega0 * static_cast<double>(n);
  const auto f = fundamental_ffs(base, omega);
  std::vector<double> out(m_max);
  for (std::size_t i = 0; i < m_max; ++i) out[i] = std::norm(f.zz[i]);
  return out;
}

AsResult as_inversion(std::span<const AsRow> rows, double omega0, std::size_t m_max, double threshold) {
  if (rows.size() < m_max || m_max == 0) {
    throw Error(ErrorCode::InvalidParams, "A-S inversion needs at least m_max base sequences");
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(m_max);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, c);
  Eigen::VectorXd b(r);
  Eigen::VectorXd sig(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (row.harmonic_power.size() < m_max || row.m == 0 || !(row.base_duration > 0.0)) {
      throw Error(ErrorCode::InvalidParams, "A-S row is incomplete");
    }
    const double weight = 2.0 * static_cast<double>(row.repetitions) / row.base_duration;
    for (std::size_t n = row.m; n <= m_max; n += row.m) {
      a(i, static_cast<Eigen::Index>(n - 1)) = weight * row.harmonic_power[n - 1];
    }
    b(i) = row.measurement;
    sig(i) = row.std_error;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  AsResult out;
  out.system = a;
  out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (out.condition > threshold) {
    throw Error(ErrorCode::IllConditioned, "A-S system condition " + std::to_string(out.condition));
  }
  const Eigen::VectorXd x = svd.solve(b);
  out.residual = (a * x - b).norm();
  // Linear error propagation through the pseudo-inverse.
  const Eigen::MatrixXd pinv = svd.solve(Eigen::MatrixXd::Identity(r, r));
  for (std::size_t n = 1; n <= m_max; ++n) {
    const auto k = static_cast<Eigen::Index>(n - 1);
    const double var = (pinv.row(k).transpose().cwiseProduct(sig)).squaredNorm();
    out.points.push_back({omega0 * static_cast<double>(n), x(k), std::sqrt(var)});
  }
  return out;
}

Band cpmg_passband(const FilterFunction& zz_power, double center) {
  const auto& w = zz_power.omega;
  const auto& v = zz_power.values;
  if (w.size() < 3) throw Error(ErrorCode::GridEmpty, "filter grid too small");
  const auto lo_it = std::lower_bound(w.begin(), w.end(), 0.5 * center);
  const auto hi_it = std::upper_bound(w.begin(), w.end(), 1.5 * center);
  std::size_t lo = static_cast<std::size_t>(lo_it - w.begin());
  std::size_t hi = static_cast<std::size_t>(hi_it - w.begin());
  if (hi <= lo) throw Error(ErrorCode::DegenerateBand, "no grid points near the CPMG peak");
  std::size_t peak = lo;
  for (std::size_t j = lo; j < hi; ++j) {
    if (v[j] > v[peak]) peak = j;
  }
  std::size_t left = peak;
  while (left > 0 && v[left - 1] <= v[left]) --left;
  std::size_t right = peak;
  while (right + 1 < v.size() && v[right + 1] <= v[right]) ++right;
  return Band{w[left], w[right]};
}

PointEstimate cpmg_npulse_estimate(std::size_t n, double tau, double projection, double projection_error,
                                   const FilterFunction& zz_power) {
  const double center = kPi * static_cast<double>(n) / tau;
  const Band band = cpmg_passband(zz_power, center);
  return ratio_estimate(projection, projection_error, zz_power, band, center);
}

}  // namespace qns
