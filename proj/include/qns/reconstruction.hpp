#pragma once

// Spectrum estimators: single-taper and multitaper eigenestimates, the
// two-stage Bayesian segment estimate, simultaneous two-axis estimates,
// frequency-comb (A-S) inversion and n-pulse CPMG estimates.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qns/common.hpp"
#include "qns/filters.hpp"
#include "qns/simulator.hpp"

namespace qns {

struct PointEstimate {
  double omega = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct ReconstructionResult {
  std::string method;
  std::vector<PointEstimate> points;
  std::vector<Band> bands;
};

/// Contiguous segments [b_l, b_{l+1}).
class SegmentGrid {
 public:
  explicit SegmentGrid(std::vector<double> boundaries);
  std::size_t size() const { return boundaries_.size() - 1; }
  Band segment(std::size_t l) const { return {boundaries_[l], boundaries_[l + 1]}; }
  const std::vector<double>& boundaries() const { return boundaries_; }
  /// Segment containing omega, or size() when outside.
  std::size_t locate(double omega) const;

 private:
  std::vector<double> boundaries_;
};

/// Relative floor below which a band integral counts as degenerate.
inline constexpr double kDegenerateBandFloor = 1e-300;

/// S(omega_s) = S_y / ((1/pi) int_B F); standard error propagated linearly.
PointEstimate single_taper(double projection, double projection_error, const FilterFunction& dephasing, Band band,
                           double omega_s);
PointEstimate amplitude_estimate(double projection, double projection_error, const FilterFunction& amplitude,
                                 Band band, double omega_s);

struct AxisMeasurement {
  double omega_s = 0.0;
  Band band;
  FilterFunction dephasing;  // F_z
  FilterFunction amplitude;  // F_Omega
  SignalProjections projections;
};

struct MultiAxisResult {
  std::vector<PointEstimate> dephasing;
  std::vector<PointEstimate> amplitude;
};

MultiAxisResult multi_axis(std::span<const AxisMeasurement> records);

/// (F)_{s,l} = (1/pi) int_{sigma_l} F_s d omega.
Eigen::MatrixXd filter_matrix(std::span<const FilterFunction> ffs, const SegmentGrid& grid);

struct BayesianModel {
  Eigen::MatrixXd coarse;        // M_c x L
  Eigen::VectorXd coarse_y;
  Eigen::VectorXd coarse_var;    // diagonal of Sigma_c
  double lambda = 0.35;
  Eigen::VectorXd selector;      // diagonal of D
  Eigen::VectorXd reference;     // S-bar
};

/// Gaussian prior kept in information form: precision P0 and h0 = P0 S0.
/// Mean and covariance are filled only when P0 is invertible.
struct Prior {
  Eigen::MatrixXd precision;
  Eigen::VectorXd information;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double condition = 0.0;
  bool invertible = false;
};

inline constexpr double kSingularCondition = 1e12;

/// P0 = F^T Sigma^-1 F + 2 lambda^2 D^2, h0 = F^T Sigma^-1 y + 2 lambda^2 D^2 S-bar.
/// Throws SingularSystem when require_invertible and cond(P0) > 1e12.
Prior build_prior(const BayesianModel& model, bool require_invertible = true);

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double condition = 0.0;
};

/// Combines the prior with fine data; throws SingularSystem when the
/// posterior precision has cond > 1e12.
Posterior posterior_update(const Prior& prior, const Eigen::MatrixXd& fine, const Eigen::VectorXd& fine_y,
                           const Eigen::VectorXd& fine_var);

/// Objective minimized by the prior mean (for audit and tests).
double prior_objective(const BayesianModel& model, const Eigen::VectorXd& s);

/// sum_k c_k S_y^(k) / ((1/pi) int_B sum_k c_k F^(k)).
PointEstimate multitaper_estimate(std::span<const double> projections, std::span<const double> errors,
                                  std::span<const double> weights, const FilterFunction& multitaper, Band band,
                                  double omega_s);

/// One frequency-comb measurement: a base sequence of duration T repeated M
/// times; harmonic_power[n-1] = |F_zz(n omega_0, T)|^2 of a single repetition.
struct AsRow {
  std::size_t m = 1;
  double base_duration = 0.0;
  std::size_t repetitions = 1;
  double measurement = 0.0;
  double std_error = 0.0;
  std::vector<double> harmonic_power;
};

struct AsResult {
  std::vector<PointEstimate> points;  // at n omega_0, n = 1..m_max
  double condition = 0.0;
  double residual = 0.0;
  Eigen::MatrixXd system;
};

inline constexpr double kIllConditioned = 1e8;

/// |F_zz(n omega_0)|^2, n = 1..m_max, of one base repetition.
std::vector<double> as_harmonic_powers(const Waveform& base, double omega0, std::size_t m_max);

/// Least-squares solve of S_y(m) = (2M/T) sum_{n: n mod m = 0} |F(n omega_0)|^2 S(n omega_0).
AsResult as_inversion(std::span<const AsRow> rows, double omega0, std::size_t m_max,
                      double threshold = kIllConditioned);

/// Interval between the filter minima adjacent to its largest peak near center.
Band cpmg_passband(const FilterFunction& zz_power, double center);

/// S(n pi / tau) = pi S_z / int_{B_n} |F_zz|^2.
PointEstimate cpmg_npulse_estimate(std::size_t n, double tau, double projection, double projection_error,
                                   const FilterFunction& zz_power);

}  // namespace qns
