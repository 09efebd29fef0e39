#pragma once

// Brute-force references used by the tests and by `tfft verify`. They
// share no code with the kernels they check. Expect O(n^2) cost.

#include "tfft/fft_core.hpp"
#include "tfft/layout.hpp"

#include <span>
#include <vector>

namespace tfft::oracle {

/// X[k] = sum_j x[j] exp(-+2 pi i j k / n) by direct summation, any n >= 1.
std::vector<Complex> dft1d_naive(std::span<const Complex> x, Direction dir);

/// Truncated 3D real-to-complex DFT by direct summation over every grid
/// point, n0 x n1 x (n2/2+1) row-major output.
std::vector<Complex> dft3d_r2c_naive(std::span<const double> field, const GlobalGrid& grid);

/// Expected logical (j, r, k) view of every rank after a correct n0 <-> n1
/// exchange of the n0 x n1 x n2c array `global` distributed along axis 0:
/// view_q[(j*n0 + r)*n2c + k] = global(r, q*(n1/p) + j, k).
std::vector<std::vector<Complex>> global_exchange_reference(std::span<const Complex> global,
                                                            std::size_t n0, std::size_t n1,
                                                            std::size_t n2c, std::size_t p);

} // namespace tfft::oracle
