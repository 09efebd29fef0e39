#pragma once

// Sequential FFT kernels. Every distributed stage is built from these:
// radix-2 complex transforms (contiguous and strided), 1D real<->complex
// transforms, and 2D real<->complex plane transforms.
//
// None of the kernels normalize. A forward followed by an inverse of
// length n multiplies the data by n.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tfft {

using Complex = std::complex<double>;

enum class Direction { Forward, Inverse };

/// True for 1, 2, 4, 8, ...
constexpr bool is_power_of_two(std::size_t n) noexcept
{
    return n != 0 && (n & (n - 1)) == 0;
}

/// Roots of unity exp(-2*pi*i*k/n) for k in [0, n/2). Immutable after
/// construction and shareable between threads.
class TwiddleTable {
public:
    /// Throws SizeError unless n is a power of two.
    explicit TwiddleTable(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    std::span<const Complex> factors() const noexcept { return factors_; }

private:
    std::size_t n_;
    std::vector<Complex> factors_;
};

TwiddleTable plan_twiddles(std::size_t n);

/// In-place iterative radix-2 decimation-in-time transform. buf.size() must
/// equal tw.size().
void fft_c2c_inplace(std::span<Complex> buf, Direction dir, const TwiddleTable& tw);

/// Two-level strided placement of a logical vector inside a larger buffer.
/// Logical element r lives at
///   base_offset + (r % inner_count) * inner_stride + (r / inner_count) * block_stride.
struct TwoLevelStride {
    std::size_t inner_count = 1;
    std::ptrdiff_t inner_stride = 1;
    std::size_t block_count = 1;
    std::ptrdiff_t block_stride = 0;
    std::ptrdiff_t base_offset = 0;

    std::size_t length() const noexcept { return inner_count * block_count; }

    std::ptrdiff_t offset(std::size_t r) const noexcept
    {
        return base_offset + static_cast<std::ptrdiff_t>(r % inner_count) * inner_stride +
               static_cast<std::ptrdiff_t>(r / inner_count) * block_stride;
    }

    /// Plain stride: n elements, stride apart, starting at base.
    static TwoLevelStride simple(std::size_t n, std::ptrdiff_t stride, std::ptrdiff_t base = 0)
    {
        return {n, stride, 1, 0, base};
    }
};

/// Throws LayoutError if any offset falls outside [0, buffer_size) or two
/// logical elements share an offset.
void check_stride(const TwoLevelStride& layout, std::size_t buffer_size);

enum class StrideCheck { Full, None };

/// Transforms the logical vector addressed by `layout`: gather into
/// `scratch`, run fft_c2c_inplace, scatter back. Elements of `buf` outside
/// the layout are not touched. StrideCheck::None skips check_stride for
/// callers that validated the geometry once up front.
void fft_c2c_strided(std::span<Complex> buf, const TwoLevelStride& layout, Direction dir,
                     const TwiddleTable& tw, std::vector<Complex>& scratch,
                     StrideCheck check = StrideCheck::Full);

void fft_c2c_strided(std::span<Complex> buf, const TwoLevelStride& layout, Direction dir,
                     const TwiddleTable& tw);

/// Real-to-complex forward transform of length n = tw.size() >= 2.
/// Writes the n/2+1 non-redundant bins to `out`. `scratch` must hold n
/// elements.
void fft_r2c_1d(std::span<const double> in, std::span<Complex> out, const TwiddleTable& tw,
                std::span<Complex> scratch);

std::vector<Complex> fft_r2c_1d(std::span<const double> in, const TwiddleTable& tw);

/// Unnormalized complex-to-real inverse of length n = tw.size(). Rebuilds
/// the full Hermitian spectrum, runs the complex inverse and drops the
/// imaginary part. Returns the largest discarded imaginary magnitude.
/// Throws ConsistencyError when that residue exceeds 1e-9 * n * max|in|.
double fft_c2r_1d(std::span<const Complex> in, std::span<double> out, const TwiddleTable& tw,
                  std::span<Complex> scratch);

std::vector<double> fft_c2r_1d(std::span<const Complex> in, std::size_t n, const TwiddleTable& tw);

/// Scratch needed by the 2D plane transforms.
struct PlaneScratch {
    std::vector<Complex> row;    // n2
    std::vector<Complex> column; // n1

    PlaneScratch() = default;
    PlaneScratch(std::size_t n1, std::size_t n2) : row(n2), column(n1) {}
};

/// 2D r2c of a row-major n1 x n2 real plane into a row-major
/// n1 x (n2/2+1) complex plane: r2c along rows, then forward c2c down each
/// retained column.
void fft2d_r2c_plane(std::span<const double> plane, std::span<Complex> out,
                     const TwiddleTable& tw1, const TwiddleTable& tw2, PlaneScratch& scratch);

std::vector<Complex> fft2d_r2c_plane(std::span<const double> plane, std::size_t n1,
                                     std::size_t n2);

/// Exact reverse of fft2d_r2c_plane (inverse c2c down columns, then c2r
/// along rows). `plane` is used as workspace and clobbered. Returns the
/// largest c2r imaginary residue seen.
double fft2d_c2r_plane(std::span<Complex> plane, std::span<double> out, const TwiddleTable& tw1,
                       const TwiddleTable& tw2, PlaneScratch& scratch);

std::vector<double> fft2d_c2r_plane(std::span<const Complex> plane, std::size_t n1,
                                    std::size_t n2);

} // namespace tfft
