#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qns/error.hpp"
#include "qns/reconstruction.hpp"

using namespace qns;

namespace {

BayesianModel random_model(std::mt19937_64& g, Eigen::Index m, Eigen::Index l) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BayesianModel b;
  b.coarse = Eigen::MatrixXd(m, l);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < l; ++j) b.coarse(i, j) = u(g);
  b.coarse_y = Eigen::VectorXd(m);
  b.coarse_var = Eigen::VectorXd(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b.coarse_y(i) = 2.0 * u(g);
    b.coarse_var(i) = 0.05 + u(g);
  }
  b.lambda = 0.35;
  b.selector = Eigen::VectorXd(l);
  b.reference = Eigen::VectorXd(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    b.selector(j) = u(g) < 0.5 ? 1.0 : 0.0;
    b.reference(j) = u(g);
  }
  return b;
}

}  // namespace

TEST_CASE("segment grid") {
  SegmentGrid g({0.0, 1.0, 3.0});
  CHECK(g.size() == 2);
  CHECK(g.locate(0.5) == 0);
  CHECK(g.locate(1.0) == 1);
  CHECK(g.locate(3.0) == 2);
  CHECK(g.segment(1).width() == doctest::Approx(2.0));
  CHECK_THROWS_AS(SegmentGrid({0.0, 1.0, 1.0}), Error);
}

TEST_CASE("single-taper estimate inverts a flat-band overlap") {
  FilterFunction f;
  f.omega = uniform_grid(0.0, 100.0, 1001);
  f.values.resize(1001);
  for (std::size_t i = 0; i < 1001; ++i) f.values[i] = std::exp(-0.5 * std::pow((f.omega[i] - 50.0) / 4.0, 2));
  const Band band{38.0, 62.0};
  const double s = 3.5;
  const double projection = s * band_integral(f, band);
  const auto e = single_taper(projection, 0.1 * projection, f, band, 50.0);
  CHECK(e.value == doctest::Approx(s));
  CHECK(e.std_error == doctest::Approx(0.1 * s));
  FilterFunction zero = f;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK_THROWS_AS(single_taper(1.0, 0.1, zero, band, 50.0), Error);
}

TEST_CASE("prior and posterior match brute-force minimization") {
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(g, 12, 6);
    const Prior p = build_prior(m);
    REQUIRE(p.invertible);
    auto obj = [&](const Eigen::VectorXd& s) { return prior_objective(m, s); };
    const Eigen::VectorXd x = oracle::minimize(obj, Eigen::VectorXd::Zero(6));
    CHECK((p.mean - x).norm() / x.norm() < 1e-6);

    Eigen::MatrixXd fine(5, 6);
    Eigen::VectorXd fy(5), fv(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) fine(i, j) = u(g);
      fy(i) = u(g);
      fv(i) = 0.1 + u(g);
    }
    const Posterior post = posterior_update(p, fine, fy, fv);
    // Posterior objective: prior quadratic form plus the fine data misfit.
    auto pobj = [&](const Eigen::VectorXd& s) {
      const Eigen::VectorXd d = s - p.mean;
      const Eigen::VectorXd r = fy - fine * s;
      return 0.5 * d.dot(p.precision * d) + 0.5 * r.cwiseAbs2().cwiseQuotient(fv).sum();
    };
    const Eigen::VectorXd y = oracle::minimize(pobj, Eigen::VectorXd::Zero(6));
    CHECK((post.mean - y).norm() / y.norm() < 1e-6);
    // Covariance is the inverse Hessian.
    const Eigen::MatrixXd h = fine.transpose() * fv.cwiseInverse().asDiagonal() * fine + p.precision;
    CHECK((post.covariance * h - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-8);
  }
}

TEST_CASE("singular prior is reported") {
  std::mt19937_64 g(7);
  auto m = random_model(g, 3, 6);
  m.selector.setZero();
  CHECK_THROWS_AS(build_prior(m), Error);
  const Prior p = build_prior(m, false);
  CHECK_FALSE(p.invertible);
  // Fine data of full rank restores a well-posed posterior.
  const Eigen::MatrixXd fine = Eigen::MatrixXd::Identity(6, 6);
  const Eigen::VectorXd fy = Eigen::VectorXd::Ones(6);
  const Eigen::VectorXd fv = Eigen::VectorXd::Constant(6, 0.1);
  CHECK_NOTHROW(posterior_update(p, fine, fy, fv));
}

TEST_CASE("multitaper estimate") {
  FilterFunction f;
  f.omega = uniform_grid(0.0, 10.0, 101);
  f.values.assign(101, 1.0);
  const std::vector<double> proj{0.5, 0.7};
  const std::vector<double> err{0.1, 0.1};
  const std::vector<double> w{0.5, 0.5};
  const auto e = multitaper_estimate(proj, err, w, f, {2.0, 4.0}, 3.0);
  CHECK(e.value == doctest::Approx(0.6 / (2.0 / kPi)));
}

TEST_CASE("A-S inversion recovers harmonic values exactly on noiseless data") {
  const double tb = 1e-3;
  const double w0 = kTwoPi / tb;
  const std::size_t mmax = 6;
  std::vector<double> truth(mmax);
  for (std::size_t n = 1; n <= mmax; ++n) truth[n - 1] = 1.0 / (1.0 + 0.3 * n);
  std::vector<AsRow> rows;
  for (std::size_t m = 1; m <= mmax; ++m) {
    const double t = tb / static_cast<double>(m);
    const Waveform base = render(cpmg(2, t, 5e-6, 0.0));
    AsRow row;
    row.m = m;
    row.base_duration = t;
    row.repetitions = 4 * m;
    row.harmonic_power = as_harmonic_powers(base, w0, mmax);
    double y = 0.0;
    for (std::size_t n = m; n <= mmax; n += m) {
      y += 2.0 * row.repetitions / t * row.harmonic_power[n - 1] * truth[n - 1];
    }
    row.measurement = y;
    row.std_error = 1e-3 * y;
    rows.push_back(row);
  }
  const auto r = as_inversion(rows, w0, mmax);
  for (std::size_t n = 1; n <= mmax; ++n) {
    CHECK(r.points[n - 1].omega == doctest::Approx(w0 * n));
    CHECK(r.points[n - 1].value == doctest::Approx(truth[n - 1]).epsilon(1e-8));
    CHECK(r.points[n - 1].std_error > 0.0);
  }
  CHECK(r.residual < 1e-8);
  CHECK_THROWS_AS(as_inversion(rows, w0, mmax, 1.0), Error);
}

TEST_CASE("A-S harmonic powers: 2-pulse CPMG vanishes at even harmonics") {
  const double t = 1e-3;
  const Waveform base = render(cpmg(2, t, 1e-8, 0.0));
  const auto p = as_harmonic_powers(base, kTwoPi / t, 4);
  // Over one base period the switching function is a square wave, so the even
  // harmonics vanish.
  CHECK(p[0] > 1e3 * p[1]);
  CHECK(p[2] > 1e3 * p[3]);
  CHECK(p[0] == doctest::Approx(oracle::switching_power({0.25 * t, 0.75 * t}, t, kTwoPi / t)).epsilon(1e-3));
}

TEST_CASE("CPMG passband and n-pulse estimate") {
  const double tau = 1e-3;
  const std::size_t n = 6;
  const auto grid = uniform_grid(0.0, 6e4, 6001);
  const auto f = switching_ff(cpmg(n, tau, 0.0, 0.0), grid);
  const double center = kPi * n / tau;
  const Band b = cpmg_passband(f, center);
  CHECK(b.contains(center));
  CHECK(b.width() == doctest::Approx(4.0 * kPi / tau).epsilon(0.02));
  const double s = 2.0;
  const double projection = s * band_integral(f, b);
  const auto e = cpmg_npulse_estimate(n, tau, projection, 0.0, f);
  CHECK(e.value == doctest::Approx(s));
  CHECK(e.omega == doctest::Approx(center));
}
