#include "tfft/fft_core.hpp"

#include "tfft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tfft {

namespace {

// std::complex operator* goes through the NaN-recovering libgcc path.
inline Complex mul(Complex a, Complex b) noexcept
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void bit_reverse(std::span<Complex> a) noexcept
{
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

void require_length(std::size_t got, std::size_t want, const char* what)
{
    if (got != want)
        throw SizeError(std::string(what) + ": length " + std::to_string(got) +
                        " does not match plan length " + std::to_string(want));
}

} // namespace

TwiddleTable::TwiddleTable(std::size_t n) : n_(n)
{
    if (!is_power_of_two(n))
        throw SizeError("transform length " + std::to_string(n) + " is not a power of two");
    factors_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        if (4 * k == n) {
            factors_[k] = {0.0, -1.0};
        } else {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n);
            factors_[k] = {std::cos(angle), std::sin(angle)};
        }
    }
}

TwiddleTable plan_twiddles(std::size_t n) { return TwiddleTable(n); }

void fft_c2c_inplace(std::span<Complex> buf, Direction dir, const TwiddleTable& tw)
{
    require_length(buf.size(), tw.size(), "fft_c2c_inplace");
    const std::size_t n = buf.size();
    if (n < 2) return;
    bit_reverse(buf);
    const auto w = tw.factors();
    const bool inverse = dir == Direction::Inverse;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const Complex wj = inverse ? std::conj(w[j * step]) : w[j * step];
                const Complex u = buf[start + j];
                const Complex v = mul(buf[start + j + half], wj);
                buf[start + j] = u + v;
                buf[start + j + half] = u - v;
            }
        }
    }
}

void check_stride(const TwoLevelStride& layout, std::size_t buffer_size)
{
    if (layout.inner_count == 0 || layout.block_count == 0)
        throw LayoutError("strided layout has an empty dimension");
    std::vector<std::ptrdiff_t> offsets(layout.length());
    for (std::size_t r = 0; r < offsets.size(); ++r) {
        const auto off = layout.offset(r);
        if (off < 0 || static_cast<std::size_t>(off) >= buffer_size)
            throw LayoutError("strided offset " + std::to_string(off) + " of element " +
                              std::to_string(r) + " outside buffer of " +
                              std::to_string(buffer_size));
        offsets[r] = off;
    }
    std::sort(offsets.begin(), offsets.end());
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
        throw LayoutError("strided layout addresses the same element twice");
}

void fft_c2c_strided(std::span<Complex> buf, const TwoLevelStride& layout, Direction dir,
                     const TwiddleTable& tw, std::vector<Complex>& scratch, StrideCheck check)
{
    require_length(layout.length(), tw.size(), "fft_c2c_strided");
    if (check == StrideCheck::Full) check_stride(layout, buf.size());
    const std::size_t n = layout.length();
    scratch.resize(n);

    std::size_t r = 0;
    for (std::size_t b = 0; b < layout.block_count; ++b) {
        const Complex* src = buf.data() + layout.base_offset +
                             static_cast<std::ptrdiff_t>(b) * layout.block_stride;
        for (std::size_t i = 0; i < layout.inner_count; ++i)
            scratch[r++] = src[static_cast<std::ptrdiff_t>(i) * layout.inner_stride];
    }

    fft_c2c_inplace(std::span<Complex>(scratch.data(), n), dir, tw);

    r = 0;
    for (std::size_t b = 0; b < layout.block_count; ++b) {
        Complex* dst = buf.data() + layout.base_offset +
                       static_cast<std::ptrdiff_t>(b) * layout.block_stride;
        for (std::size_t i = 0; i < layout.inner_count; ++i)
            dst[static_cast<std::ptrdiff_t>(i) * layout.inner_stride] = scratch[r++];
    }
}

void fft_c2c_strided(std::span<Complex> buf, const TwoLevelStride& layout, Direction dir,
                     const TwiddleTable& tw)
{
    std::vector<Complex> scratch;
    fft_c2c_strided(buf, layout, dir, tw, scratch, StrideCheck::Full);
}

void fft_r2c_1d(std::span<const double> in, std::span<Complex> out, const TwiddleTable& tw,
                std::span<Complex> scratch)
{
    const std::size_t n = tw.size();
    if (n < 2) throw SizeError("real transform length must be at least 2");
    require_length(in.size(), n, "fft_r2c_1d input");
    require_length(out.size(), n / 2 + 1, "fft_r2c_1d output");
    require_length(scratch.size(), n, "fft_r2c_1d scratch");
    for (std::size_t i = 0; i < n; ++i) scratch[i] = {in[i], 0.0};
    fft_c2c_inplace(scratch, Direction::Forward, tw);
    std::copy_n(scratch.begin(), n / 2 + 1, out.begin());
}

std::vector<Complex> fft_r2c_1d(std::span<const double> in, const TwiddleTable& tw)
{
    std::vector<Complex> out(tw.size() / 2 + 1);
    std::vector<Complex> scratch(tw.size());
    fft_r2c_1d(in, out, tw, scratch);
    return out;
}

double fft_c2r_1d(std::span<const Complex> in, std::span<double> out, const TwiddleTable& tw,
                  std::span<Complex> scratch)
{
    const std::size_t n = tw.size();
    if (n < 2) throw SizeError("real transform length must be at least 2");
    require_length(in.size(), n / 2 + 1, "fft_c2r_1d input");
    require_length(out.size(), n, "fft_c2r_1d output");
    require_length(scratch.size(), n, "fft_c2r_1d scratch");

    double max_in = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        scratch[k] = in[k];
        max_in = std::max(max_in, std::abs(in[k]));
    }
    for (std::size_t k = n / 2 + 1; k < n; ++k) scratch[k] = std::conj(in[n - k]);

    fft_c2c_inplace(scratch, Direction::Inverse, tw);

    double residue = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = scratch[i].real();
        residue = std::max(residue, std::abs(scratch[i].imag()));
    }
    if (residue > 1e-9 * static_cast<double>(n) * max_in)
        throw ConsistencyError("complex-to-real input is not Hermitian: imaginary residue " +
                               std::to_string(residue));
    return residue;
}

std::vector<double> fft_c2r_1d(std::span<const Complex> in, std::size_t n, const TwiddleTable& tw)
{
    require_length(n, tw.size(), "fft_c2r_1d");
    std::vector<double> out(n);
    std::vector<Complex> scratch(n);
    fft_c2r_1d(in, out, tw, scratch);
    return out;
}

void fft2d_r2c_plane(std::span<const double> plane, std::span<Complex> out,
                     const TwiddleTable& tw1, const TwiddleTable& tw2, PlaneScratch& scratch)
{
    const std::size_t n1 = tw1.size();
    const std::size_t n2 = tw2.size();
    const std::size_t n2c = n2 / 2 + 1;
    require_length(plane.size(), n1 * n2, "fft2d_r2c_plane input");
    require_length(out.size(), n1 * n2c, "fft2d_r2c_plane output");
    scratch.row.resize(n2);

    for (std::size_t row = 0; row < n1; ++row)
        fft_r2c_1d(plane.subspan(row * n2, n2), out.subspan(row * n2c, n2c), tw2, scratch.row);
    for (std::size_t k = 0; k < n2c; ++k)
        fft_c2c_strided(out, TwoLevelStride::simple(n1, static_cast<std::ptrdiff_t>(n2c),
                                                    static_cast<std::ptrdiff_t>(k)),
                        Direction::Forward, tw1, scratch.column, StrideCheck::None);
}

std::vector<Complex> fft2d_r2c_plane(std::span<const double> plane, std::size_t n1,
                                     std::size_t n2)
{
    const TwiddleTable tw1(n1), tw2(n2);
    PlaneScratch scratch(n1, n2);
    std::vector<Complex> out(n1 * (n2 / 2 + 1));
    fft2d_r2c_plane(plane, out, tw1, tw2, scratch);
    return out;
}

double fft2d_c2r_plane(std::span<Complex> plane, std::span<double> out, const TwiddleTable& tw1,
                       const TwiddleTable& tw2, PlaneScratch& scratch)
{
    const std::size_t n1 = tw1.size();
    const std::size_t n2 = tw2.size();
    const std::size_t n2c = n2 / 2 + 1;
    require_length(plane.size(), n1 * n2c, "fft2d_c2r_plane input");
    require_length(out.size(), n1 * n2, "fft2d_c2r_plane output");
    scratch.row.resize(n2);

    for (std::size_t k = 0; k < n2c; ++k)
        fft_c2c_strided(plane, TwoLevelStride::simple(n1, static_cast<std::ptrdiff_t>(n2c),
                                                      static_cast<std::ptrdiff_t>(k)),
                        Direction::Inverse, tw1, scratch.column, StrideCheck::None);
    double residue = 0.0;
    for (std::size_t row = 0; row < n1; ++row)
        residue = std::max(residue, fft_c2r_1d(plane.subspan(row * n2c, n2c),
                                               out.subspan(row * n2, n2), tw2, scratch.row));
    return residue;
}

std::vector<double> fft2d_c2r_plane(std::span<const Complex> plane, std::size_t n1,
                                    std::size_t n2)
{
    const TwiddleTable tw1(n1), tw2(n2);
    PlaneScratch scratch(n1, n2);
    std::vector<Complex> work(plane.begin(), plane.end());
    std::vector<double> out(n1 * n2);
    fft2d_c2r_plane(work, out, tw1, tw2, scratch);
    return out;
}

} // namespace tfft
