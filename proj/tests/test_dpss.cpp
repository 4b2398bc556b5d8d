#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qns/common.hpp"
#include "qns/dpss.hpp"
#include "qns/error.hpp"

using namespace qns;

TEST_CASE("two-point sequences are the symmetric and antisymmetric pair") {
  const auto set = compute_dpss({2, 0.25, 1});
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(set.sequences[0][0] == doctest::Approx(r).epsilon(1e-14));
  CHECK(set.sequences[0][1] == doctest::Approx(r).epsilon(1e-14));
  CHECK(set.sequences[1][0] == doctest::Approx(r).epsilon(1e-14));
  CHECK(set.sequences[1][1] == doctest::Approx(-r).epsilon(1e-14));
  // 2x2 kernel [[0.5, 1/pi], [1/pi, 0.5]].
  CHECK(set.eigenvalues[0] == doctest::Approx(0.5 + 1.0 / kPi).epsilon(1e-14));
  CHECK(set.eigenvalues[1] == doctest::Approx(0.5 - 1.0 / kPi).epsilon(1e-14));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(compute_dpss({16, 0.0, 0}), Error);
  CHECK_THROWS_AS(compute_dpss({16, 0.5, 0}), Error);
  CHECK_THROWS_AS(compute_dpss({16, 0.7, 0}), Error);
  CHECK_THROWS_AS(compute_dpss({16, 0.1, 16}), Error);
  CHECK_THROWS_AS(compute_dpss({1, 0.1, 0}), Error);
  try {
    compute_dpss({16, 0.7, 0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParams);
  }
}

TEST_CASE("small time-bandwidth product produces a warning") {
  const auto set = compute_dpss({16, 0.01, 0});
  CHECK(!set.warnings.empty());
  CHECK(compute_dpss({16, 0.1, 0}).warnings.empty());
}

TEST_CASE("leading concentration for N=128, NW=4") {
  const auto set = compute_dpss({128, 4.0 / 128.0, 5});
  CHECK(set.eigenvalues[0] >= 0.99999);
  const auto dense = oracle::dense_dpss(128, 4.0 / 128.0, 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::abs(set.eigenvalues[k] - dense.values[k]) < 1e-10);
  }
}

TEST_CASE("tridiagonal sequences match the dense kernel oracle elementwise") {
  struct Case {
    std::size_t n;
    double nw;
    std::size_t k;
  };
  for (const auto c : {Case{64, 2.5, 5}, Case{128, 4.0, 7}, Case{101, 3.0, 6}}) {
    const auto set = compute_dpss({c.n, c.nw / static_cast<double>(c.n), c.k});
    const auto dense = oracle::dense_dpss(c.n, c.nw / static_cast<double>(c.n), c.k + 1);
    double worst = 0.0;
    for (std::size_t k = 0; k <= c.k; ++k) {
      for (std::size_t i = 0; i < c.n; ++i) worst = std::max(worst, std::abs(set.sequences[k][i] - dense.vectors[k][i]));
    }
    INFO("N=" << c.n << " NW=" << c.nw);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("orthonormality, parity and sign convention") {
  for (const auto [n, nw] : {std::pair<std::size_t, double>{128, 4.0}, {600, 2.0}, {1000, 2.0}, {37, 1.5}}) {
    const std::size_t kmax = std::min<std::size_t>(9, n - 1);
    const auto set = compute_dpss({n, nw / static_cast<double>(n), kmax});
    for (std::size_t j = 0; j <= kmax; ++j) {
      for (std::size_t k = 0; k <= kmax; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += set.sequences[j][i] * set.sequences[k][i];
        CHECK(std::abs(dot - (j == k ? 1.0 : 0.0)) < 1e-10);
      }
      const double parity = j % 2 == 0 ? 1.0 : -1.0;
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(set.sequences[j][i] - parity * set.sequences[j][n - 1 - i]));
      }
      CHECK(worst < 1e-10);
      double peak = 0.0;
      for (double x : set.sequences[j]) peak = std::max(peak, std::abs(x));
      for (double x : set.sequences[j]) {
        if (std::abs(x) > kSignTolerance * peak) {
          CHECK(x > 0.0);
          break;
        }
      }
    }
    for (std::size_t k = 1; k <= kmax; ++k) CHECK(set.eigenvalues[k] <= set.eigenvalues[k - 1] + 1e-15);
  }
}

TEST_CASE("eigenvalues cluster around the Shannon number") {
  const std::size_t n = 200;
  const double nw = 5.0;
  const auto set = compute_dpss({n, nw / n, 20});
  for (std::size_t k = 0; k <= 20; ++k) {
    const double kk = static_cast<double>(k);
    if (kk < 2.0 * nw - 1.0) CHECK(set.eigenvalues[k] > 0.5);
    if (kk > 2.0 * nw + 1.0) CHECK(set.eigenvalues[k] < 0.5);
  }
}

TEST_CASE("DPSWF values at the origin and realness") {
  const auto set = compute_dpss({64, 3.0 / 64.0, 3});
  const std::vector<double> w{0.0};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto u = evaluate_dpswf(set, k, 1.0, w);
    double sum = 0.0;
    for (double x : set.sequences[k]) sum += x;
    if (k % 2) {
      CHECK(std::abs(u.values[0]) < 1e-13);
    } else {
      CHECK(u.values[0] == doctest::Approx(sum).epsilon(1e-13));
    }
  }
  // |U| from the real form equals the modulus of the complex sum.
  for (double om : {0.1, 0.37, 1.2, 2.9}) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double u = dpswf_value(set.sequences[k], k, 1.0, om);
      CHECK(u * u == doctest::Approx(oracle::dpswf_power(set.sequences[k], 1.0, om)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(evaluate_dpswf(set, 4, 1.0, w), Error);
}

TEST_CASE("DPSWF evenness and alias flags") {
  const auto set = compute_dpss({48, 2.0 / 48.0, 2});
  const double dt = 1e-3;
  const std::vector<double> w{-2000.0, 2000.0, kPi / dt * 1.01};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto u = evaluate_dpswf(set, k, dt, w);
    CHECK(std::abs(std::abs(u.values[0]) - std::abs(u.values[1])) < 1e-13);
    CHECK(u.aliased[0] == 0);
    CHECK(u.aliased[2] == 1);
  }
}

TEST_CASE("in-band energy fraction equals the eigenvalue") {
  const std::size_t n = 128;
  const double w = 4.0 / n;
  const double dt = 1.0;
  const auto set = compute_dpss({n, w, 5});
  for (std::size_t k = 0; k <= 5; ++k) {
    const auto& v = set.sequences[k];
    auto f = [&](double om) { return oracle::dpswf_power(v, dt, om); };
    const double band = kTwoPi * w / dt;
    const double in = 2.0 * oracle::simpson(f, 0.0, band, 4000);
    const double all = 2.0 * oracle::simpson(f, 0.0, kPi / dt, 40000);
    INFO("k=" << k);
    CHECK(std::abs(in / all - set.eigenvalues[k]) < 1e-6);
  }
}

TEST_CASE("Sturm count brackets every eigenvalue") {
  const auto t = detail::slepian_tridiagonal(20, 0.1);
  for (std::size_t j = 0; j < 20; ++j) {
    const double mu = detail::bisect_eigenvalue(t, j);
    const double eps = 1e-9 * (1.0 + std::abs(mu));
    CHECK(detail::sturm_count(t, mu - eps) == 19 - j);
    CHECK(detail::sturm_count(t, mu + eps) == 20 - j);
  }
}
