#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP implementation used by
// the library and a plain serial reference used by the tests and the
// benchmark. Parallel results do not depend on the thread count: work is split
// into fixed blocks and reductions are performed in a fixed order.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qns::kernels {

using cplx = std::complex<double>;

/// Piecewise-constant drive: segment j spans [edges[j], edges[j+1]) with
/// amplitude amplitude[j]; theta[j] is the rotation angle at edges[j].
struct SegmentView {
  std::span<const double> edges;      // size n + 1
  std::span<const double> amplitude;  // size n
  std::span<const double> theta;      // size n + 1
};

struct FundamentalValues {
  std::vector<cplx> xx;  // int Omega(s) e^{i w s} ds
  std::vector<cplx> zy;  // int sin Theta(s) e^{i w s} ds
  std::vector<cplx> zz;  // int cos Theta(s) e^{i w s} ds
};

/// Exact per-segment integration of the three fundamental filter integrals.
FundamentalValues fundamental_ffs_parallel(const SegmentView& w, std::span<const double> omega);
FundamentalValues fundamental_ffs_serial(const SegmentView& w, std::span<const double> omega);

/// v^T T v for the symmetric Toeplitz matrix with first row r.
double toeplitz_quadratic_parallel(std::span<const double> v, std::span<const double> r);
double toeplitz_quadratic_serial(std::span<const double> v, std::span<const double> r);

/// out[j] = sum_i amp[i] cos(freq[i] (t0 + j dt) + phase[i]).
void cosine_sum_parallel(std::span<const double> amp, std::span<const double> freq,
                         std::span<const double> phase, double t0, double dt, std::span<double> out);
void cosine_sum_serial(std::span<const double> amp, std::span<const double> freq,
                       std::span<const double> phase, double t0, double dt, std::span<double> out);

}  // namespace qns::kernels
