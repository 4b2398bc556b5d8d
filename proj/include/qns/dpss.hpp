#pragma once

// Discrete prolate spheroidal sequences (Slepian tapers) and their
// frequency-domain waveforms.
//
// Conventions:
//  * every sequence has unit Euclidean norm;
//  * the first element whose magnitude exceeds kSignTolerance * max|v| is
//    positive (deterministic sign);
//  * eigenvalues lambda_k are the energy concentrations in |f| < W and are
//    returned in nonincreasing order.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qns {

struct DpssParams {
  std::size_t length = 0;       // N, samples
  double half_bandwidth = 0.0;  // W, cycles per sample, 0 < W < 0.5
  std::size_t max_order = 0;    // highest order k computed, k < N

  double time_bandwidth() const { return static_cast<double>(length) * half_bandwidth; }
};

struct DpssSet {
  DpssParams params;
  std::vector<std::vector<double>> sequences;  // sequences[k][n]
  std::vector<double> eigenvalues;             // lambda_k
  std::vector<std::string> warnings;

  std::size_t orders() const { return sequences.size(); }
  std::span<const double> sequence(std::size_t k) const;
};

/// Discrete prolate spheroidal waveform U^(k)(omega), stored as real values.
/// For even k the waveform is sum_n v_n cos(omega (n - c) dt); for odd k the
/// factor epsilon_k = i turns the purely imaginary sum into
/// -sum_n v_n sin(omega (n - c) dt), with c = (N - 1) / 2.
struct Dpswf {
  std::size_t order = 0;
  double step = 0.0;                // dt
  std::vector<double> omega;        // rad / time
  std::vector<double> values;       // U^(k)(omega), real
  std::vector<unsigned char> aliased;  // 1 where |omega| > pi / dt
};

inline constexpr double kSignTolerance = 1e-10;

DpssSet compute_dpss(const DpssParams& params);

Dpswf evaluate_dpswf(const DpssSet& set, std::size_t k, double dt, std::span<const double> omega);

/// Single-point DPSWF evaluation for closed-form filter expressions.
double dpswf_value(std::span<const double> sequence, std::size_t k, double dt, double omega);

/// Concentration v^T K v against the dense sinc kernel
/// K_nm = sin(2 pi W (n - m)) / (pi (n - m)), K_nn = 2W.
double sinc_kernel_rayleigh(std::span<const double> v, double half_bandwidth);

/// Applies the sign convention in place.
void fix_sign(std::span<double> v);

namespace detail {

// Commuting symmetric tridiagonal matrix whose eigenvectors are the DPSS.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i + 1
};

Tridiagonal slepian_tridiagonal(std::size_t n, double half_bandwidth);

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const Tridiagonal& t, double x);

// The j-th largest eigenvalue (j = 0 is the largest) by bisection.
double bisect_eigenvalue(const Tridiagonal& t, std::size_t j);

// Eigenvector for a converged eigenvalue by inverse iteration.
std::vector<double> inverse_iteration(const Tridiagonal& t, double eigenvalue, std::size_t seed);

}  // namespace detail

}  // namespace qns
