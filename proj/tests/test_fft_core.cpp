#include "tfft/errors.hpp"
#include "tfft/fft_core.hpp"
#include "tfft/oracle.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace tfft;
using tfft::testing::max_abs_diff;
using tfft::testing::random_complex;
using tfft::testing::random_real;

namespace {

constexpr double kTol = 1e-12;

void expect_near(std::span<const Complex> got, std::span<const Complex> want, double tol = kTol)
{
    ASSERT_EQ(got.size(), want.size());
    EXPECT_LE(max_abs_diff(got, want), tol);
}

} // namespace

TEST(Twiddles, DegenerateAndSmallTables)
{
    EXPECT_TRUE(plan_twiddles(1).factors().empty());

    const auto t4 = plan_twiddles(4);
    ASSERT_EQ(t4.factors().size(), 2u);
    EXPECT_EQ(t4.factors()[0], Complex(1.0, 0.0));
    EXPECT_EQ(t4.factors()[1], Complex(0.0, -1.0));

    const auto t8 = plan_twiddles(8);
    const double h = std::numbers::sqrt2 / 2.0;
    EXPECT_NEAR(t8.factors()[1].real(), h, 1e-15);
    EXPECT_NEAR(t8.factors()[1].imag(), -h, 1e-15);
}

TEST(Twiddles, UnitModulusAndExactUnity)
{
    for (std::size_t n : {2u, 16u, 1024u}) {
        const auto t = plan_twiddles(n);
        EXPECT_EQ(t.factors()[0].real(), 1.0);
        EXPECT_EQ(t.factors()[0].imag(), 0.0);
        for (const auto w : t.factors()) EXPECT_NEAR(std::abs(w), 1.0, 1e-15);
    }
}

TEST(Twiddles, RejectsNonPowerOfTwo)
{
    EXPECT_THROW(plan_twiddles(0), SizeError);
    EXPECT_THROW(plan_twiddles(6), SizeError);
}

TEST(FftC2c, KnownVectors)
{
    const auto tw = plan_twiddles(4);
    std::vector<Complex> delta{1, 0, 0, 0};
    fft_c2c_inplace(delta, Direction::Forward, tw);
    expect_near(delta, std::vector<Complex>{1, 1, 1, 1});

    std::vector<Complex> ones{1, 1, 1, 1};
    fft_c2c_inplace(ones, Direction::Forward, tw);
    expect_near(ones, std::vector<Complex>{4, 0, 0, 0});

    std::vector<Complex> shifted{0, 1, 0, 0};
    const auto naive = oracle::dft1d_naive(shifted, Direction::Forward);
    fft_c2c_inplace(shifted, Direction::Forward, tw);
    expect_near(naive, std::vector<Complex>{{1, 0}, {0, -1}, {-1, 0}, {0, 1}});
    expect_near(shifted, naive);
}

TEST(FftC2c, LengthMismatchIsSizeError)
{
    std::vector<Complex> v(8);
    EXPECT_THROW(fft_c2c_inplace(v, Direction::Forward, plan_twiddles(4)), SizeError);
}

TEST(FftC2c, MatchesNaiveDftBothDirections)
{
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        for (auto dir : {Direction::Forward, Direction::Inverse}) {
            auto x = random_complex(n, 100 + n);
            const auto want = oracle::dft1d_naive(x, dir);
            fft_c2c_inplace(x, dir, plan_twiddles(n));
            EXPECT_LE(max_abs_diff(x, want), 1e-12 * static_cast<double>(n)) << "n=" << n;
        }
    }
}

TEST(FftC2c, Linearity)
{
    const std::size_t n = 64;
    const auto tw = plan_twiddles(n);
    const auto x = random_complex(n, 1), y = random_complex(n, 2);
    const Complex a{0.7, -1.3}, b{-2.1, 0.4};
    std::vector<Complex> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a * x[i] + b * y[i];
    auto fx = x, fy = y;
    fft_c2c_inplace(fx, Direction::Forward, tw);
    fft_c2c_inplace(fy, Direction::Forward, tw);
    fft_c2c_inplace(mix, Direction::Forward, tw);
    std::vector<Complex> want(n);
    for (std::size_t i = 0; i < n; ++i) want[i] = a * fx[i] + b * fy[i];
    EXPECT_LE(max_abs_diff(mix, want), 1e-12 * static_cast<double>(n) * 3.0);
}

TEST(FftC2c, Parseval)
{
    for (std::size_t n : {4u, 8u, 64u, 256u}) {
        auto x = random_complex(n, 7 * n);
        double time_energy = 0.0;
        for (const auto& v : x) time_energy += std::norm(v);
        fft_c2c_inplace(x, Direction::Forward, plan_twiddles(n));
        double freq_energy = 0.0;
        for (const auto& v : x) freq_energy += std::norm(v);
        const double want = static_cast<double>(n) * time_energy;
        EXPECT_LE(std::abs(freq_energy - want) / want, 1e-10) << "n=" << n;
    }
}

TEST(FftStrided, IdentityStrideReducesToContiguous)
{
    std::vector<Complex> buf{1, 0, 0, 0};
    fft_c2c_strided(buf, TwoLevelStride::simple(4, 1), Direction::Forward, plan_twiddles(4));
    expect_near(buf, std::vector<Complex>{1, 1, 1, 1});
}

TEST(FftStrided, InterleavedLeavesGapsUntouched)
{
    const Complex x{42.0, -3.0};
    std::vector<Complex> buf{1, x, 1, x, 1, x, 1, x};
    fft_c2c_strided(buf, TwoLevelStride::simple(4, 2), Direction::Forward, plan_twiddles(4));
    expect_near(buf, std::vector<Complex>{4, x, 0, x, 0, x, 0, x});
    for (std::size_t i = 1; i < 8; i += 2) EXPECT_EQ(buf[i], x);
}

TEST(FftStrided, TwoLevelLayout)
{
    // inner_count=2, inner_stride=4, block_count=2, block_stride=2 -> offsets {0,4,2,6}.
    const TwoLevelStride layout{2, 4, 2, 2, 0};
    std::vector<std::ptrdiff_t> offsets;
    for (std::size_t r = 0; r < 4; ++r) offsets.push_back(layout.offset(r));
    EXPECT_EQ(offsets, (std::vector<std::ptrdiff_t>{0, 4, 2, 6}));

    std::vector<Complex> buf(8, Complex{9.0, 9.0});
    buf[0] = 1;
    buf[4] = 0;
    buf[2] = 0;
    buf[6] = 0;
    const auto want = oracle::dft1d_naive(std::vector<Complex>{1, 0, 0, 0}, Direction::Forward);
    fft_c2c_strided(buf, layout, Direction::Forward, plan_twiddles(4));
    for (std::size_t r = 0; r < 4; ++r)
        EXPECT_LE(std::abs(buf[static_cast<std::size_t>(offsets[r])] - want[r]), kTol);
    for (std::size_t i : {1u, 3u, 5u, 7u}) EXPECT_EQ(buf[i], Complex(9.0, 9.0));
}

TEST(FftStrided, RejectsBadLayouts)
{
    std::vector<Complex> buf(8);
    const auto tw = plan_twiddles(4);
    // Overlap: inner_stride 0.
    EXPECT_THROW(fft_c2c_strided(buf, TwoLevelStride{4, 0, 1, 0, 0}, Direction::Forward, tw),
                 LayoutError);
    // Out of range.
    EXPECT_THROW(fft_c2c_strided(buf, TwoLevelStride::simple(4, 3), Direction::Forward, tw),
                 LayoutError);
    EXPECT_THROW(fft_c2c_strided(buf, TwoLevelStride::simple(4, 1, -1), Direction::Forward, tw),
                 LayoutError);
    // Blocks colliding with each other.
    EXPECT_THROW(fft_c2c_strided(buf, TwoLevelStride{2, 2, 2, 2, 0}, Direction::Forward, tw),
                 LayoutError);
}

// Property: any valid two-level geometry gives bitwise the same result as an
// explicit gather -> contiguous FFT -> scatter.
TEST(FftStrided, EquivalentToExplicitGatherScatter)
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t inner = std::size_t{1} << (rng() % 4);
        const std::size_t blocks = std::size_t{1} << (rng() % 3);
        const std::size_t gap = 1 + rng() % 3;
        const auto inner_stride = static_cast<std::ptrdiff_t>(gap);
        const auto block_stride = static_cast<std::ptrdiff_t>(inner * gap + rng() % 3);
        const auto base = static_cast<std::ptrdiff_t>(rng() % 4);
        const TwoLevelStride layout{inner, inner_stride, blocks, block_stride, base};
        const std::size_t size = static_cast<std::size_t>(layout.offset(inner * blocks - 1)) + 3;
        auto buf = random_complex(size, 1000 + static_cast<std::uint64_t>(trial));
        auto ref = buf;

        const auto tw = plan_twiddles(layout.length());
        for (auto dir : {Direction::Forward, Direction::Inverse}) {
            fft_c2c_strided(buf, layout, dir, tw);
            std::vector<Complex> tmp(layout.length());
            for (std::size_t r = 0; r < tmp.size(); ++r)
                tmp[r] = ref[static_cast<std::size_t>(layout.offset(r))];
            fft_c2c_inplace(tmp, dir, tw);
            for (std::size_t r = 0; r < tmp.size(); ++r)
                ref[static_cast<std::size_t>(layout.offset(r))] = tmp[r];
            EXPECT_TRUE(tfft::testing::bitwise_equal(buf, ref)) << "trial " << trial;
        }
    }
}

TEST(FftR2c, KnownVectors)
{
    const auto tw = plan_twiddles(4);
    expect_near(fft_r2c_1d(std::vector<double>{1, 1, 1, 1}, tw), std::vector<Complex>{4, 0, 0});
    expect_near(fft_r2c_1d(std::vector<double>{1, 0, 0, 0}, tw), std::vector<Complex>{1, 1, 1});

    const std::vector<double> alt{0, 1, 0, 1};
    std::vector<Complex> embedded(alt.begin(), alt.end());
    const auto naive = oracle::dft1d_naive(embedded, Direction::Forward);
    const auto got = fft_r2c_1d(alt, tw);
    expect_near(got, std::vector<Complex>(naive.begin(), naive.begin() + 3));
    expect_near(got, std::vector<Complex>{2, 0, -2});
}

TEST(FftR2c, RejectsLengthOne)
{
    EXPECT_THROW(fft_r2c_1d(std::vector<double>{1.0}, plan_twiddles(1)), SizeError);
    EXPECT_THROW(fft_r2c_1d(std::vector<double>{1.0, 2.0, 3.0}, plan_twiddles(4)), SizeError);
}

TEST(FftR2c, HermitianAndEdgeBinsReal)
{
    for (std::size_t n : {2u, 4u, 8u, 16u, 64u}) {
        const auto x = random_real(n, 5 * n);
        const auto tw = plan_twiddles(n);
        std::vector<Complex> full(x.begin(), x.end());
        fft_c2c_inplace(full, Direction::Forward, tw);
        for (std::size_t k = 1; k < n; ++k)
            EXPECT_LE(std::abs(full[k] - std::conj(full[n - k])), 1e-12);

        const auto half = fft_r2c_1d(x, tw);
        ASSERT_EQ(half.size(), n / 2 + 1);
        expect_near(half, std::vector<Complex>(full.begin(), full.begin() + n / 2 + 1));
        double max_x = 0.0;
        for (double v : x) max_x = std::max(max_x, std::abs(v));
        EXPECT_LE(std::abs(half[0].imag()), 1e-12 * n * max_x);
        EXPECT_LE(std::abs(half[n / 2].imag()), 1e-12 * n * max_x);
    }
}

TEST(FftC2r, KnownVectors)
{
    const auto tw = plan_twiddles(4);
    const auto a = fft_c2r_1d(std::vector<Complex>{4, 0, 0}, 4, tw);
    EXPECT_LE(max_abs_diff(a, std::vector<double>{4, 4, 4, 4}), kTol);
    const auto b = fft_c2r_1d(std::vector<Complex>{1, 1, 1}, 4, tw);
    EXPECT_LE(max_abs_diff(b, std::vector<double>{4, 0, 0, 0}), kTol);
}

TEST(FftC2r, RoundTripScalesByN)
{
    for (std::size_t n : {2u, 8u, 64u}) {
        const auto x = random_real(n, 11 * n);
        const auto tw = plan_twiddles(n);
        const auto y = fft_c2r_1d(fft_r2c_1d(x, tw), n, tw);
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(y[i], static_cast<double>(n) * x[i], 1e-12 * static_cast<double>(n));
    }
}

TEST(FftC2r, CorruptedSpectrumIsConsistencyError)
{
    const auto tw = plan_twiddles(4);
    EXPECT_THROW(fft_c2r_1d(std::vector<Complex>{{1.0, 0.5}, 0, 0}, 4, tw), ConsistencyError);
    EXPECT_THROW(fft_c2r_1d(std::vector<Complex>{1, 0, {0.0, 1.0}}, 4, tw), ConsistencyError);
}

TEST(Fft2d, KnownPlanes)
{
    const auto c = fft2d_r2c_plane(std::vector<double>{1, 1, 1, 1}, 2, 2);
    expect_near(c, std::vector<Complex>{4, 0, 0, 0});
    const auto d = fft2d_r2c_plane(std::vector<double>{1, 0, 0, 0}, 2, 2);
    expect_near(d, std::vector<Complex>{1, 1, 1, 1});

    const auto e = fft2d_c2r_plane(std::vector<Complex>{4, 0, 0, 0}, 2, 2);
    EXPECT_LE(max_abs_diff(e, std::vector<double>{4, 4, 4, 4}), kTol);
    const auto f = fft2d_c2r_plane(std::vector<Complex>{1, 1, 1, 1}, 2, 2);
    EXPECT_LE(max_abs_diff(f, std::vector<double>{4, 0, 0, 0}), kTol);
}

TEST(Fft2d, MatchesNaive2dDft)
{
    const std::size_t n1 = 4, n2 = 4, n2c = 3;
    const auto plane = random_real(n1 * n2, 77);
    // Independent 2D DFT by direct double summation.
    std::vector<Complex> want(n1 * n2c);
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n2c; ++b) {
            Complex s{};
            for (std::size_t i = 0; i < n1; ++i)
                for (std::size_t j = 0; j < n2; ++j) {
                    const double ang = -2.0 * std::numbers::pi *
                                       (static_cast<double>(a * i % n1) / n1 +
                                        static_cast<double>(b * j % n2) / n2);
                    s += plane[i * n2 + j] * Complex(std::cos(ang), std::sin(ang));
                }
            want[a * n2c + b] = s;
        }
    expect_near(fft2d_r2c_plane(plane, n1, n2), want);
}

TEST(Fft2d, RoundTrip)
{
    for (auto [n1, n2] : {std::pair<std::size_t, std::size_t>{4, 4}, {8, 2}, {2, 16}}) {
        const auto plane = random_real(n1 * n2, n1 * 31 + n2);
        const auto back = fft2d_c2r_plane(fft2d_r2c_plane(plane, n1, n2), n1, n2);
        double max_x = 0.0;
        for (double v : plane) max_x = std::max(max_x, std::abs(v));
        for (std::size_t i = 0; i < plane.size(); ++i)
            EXPECT_NEAR(back[i], static_cast<double>(n1 * n2) * plane[i],
                        1e-12 * static_cast<double>(n1 * n2) * max_x);
    }
}
