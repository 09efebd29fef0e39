#include "tfft/dfft.hpp"
#include "tfft/errors.hpp"
#include "tfft/oracle.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tfft;
using tfft::testing::bitwise_equal;
using tfft::testing::max_abs_diff;
using tfft::testing::random_real;

namespace {

double rms_rel(std::span<const double> got, std::span<const double> want)
{
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        e += (got[i] - want[i]) * (got[i] - want[i]);
        r += want[i] * want[i];
    }
    return std::sqrt(e / r);
}

DistributedResult run(std::span<const double> field, const GlobalGrid& grid, std::size_t p,
                      Strategy s, FabricMode mode = FabricMode::Serial)
{
    return run_distributed(field, grid, p, s, CommPattern::Pairwise, {mode});
}

} // namespace

TEST(Plan, DescriptorArithmetic)
{
    const FftPlan plan({4, 4, 4}, 2, 0, Strategy::Strided);
    EXPECT_EQ(plan.spectral_geometry().n2c, 3u);
    EXPECT_EQ(plan.exchange_plan().send_descs[1].block_length, 6u);
    EXPECT_EQ(plan.spectral_tag(), SpectralTag::StridedInplace);

    EXPECT_NO_THROW(FftPlan({2, 2, 2}, 1, 0, Strategy::Transpose));
    EXPECT_NO_THROW(FftPlan({4, 8, 4}, 4, 3, Strategy::Strided));
    EXPECT_THROW(FftPlan({4, 4, 4}, 3, 0, Strategy::Strided), ConfigError);
}

TEST(Forward, ConstantFieldIsPureDc)
{
    const GlobalGrid grid{4, 4, 4};
    const std::vector<double> ones(grid.real_size(), 1.0);
    for (std::size_t p : {1u, 2u, 4u})
        for (auto s : {Strategy::Transpose, Strategy::Strided}) {
            const auto res = run(ones, grid, p, s);
            for (std::size_t i = 0; i < res.spectrum.size(); ++i)
                EXPECT_LE(std::abs(res.spectrum[i] - (i == 0 ? Complex(64.0) : Complex(0.0))), 1e-12);
        }
}

TEST(Forward, DeltaIsFlatSpectrum)
{
    const GlobalGrid grid{4, 4, 4};
    std::vector<double> delta(grid.real_size(), 0.0);
    delta[0] = 1.0;
    for (auto s : {Strategy::Transpose, Strategy::Strided}) {
        const auto res = run(delta, grid, 2, s);
        for (const auto& v : res.spectrum) EXPECT_LE(std::abs(v - Complex(1.0)), 1e-12);
    }
}

TEST(Forward, MatchesNaive3dDft)
{
    const GlobalGrid grid{4, 4, 4};
    const auto field = random_real(grid.real_size(), 3);
    const auto want = oracle::dft3d_r2c_naive(field, grid);
    for (std::size_t p : {1u, 2u, 4u})
        for (auto s : {Strategy::Transpose, Strategy::Strided})
            EXPECT_LE(max_abs_diff(run(field, grid, p, s).spectrum, want), 1e-10);
}

TEST(Forward, LogicalElementMatchesGlobalTransform)
{
    const GlobalGrid grid{8, 4, 4};
    const std::size_t p = 2;
    const auto field = random_real(grid.real_size(), 17);
    const auto want = oracle::dft3d_r2c_naive(field, grid);
    auto inputs = scatter_real(field, grid, p);
    std::vector<std::vector<Complex>> logical(p);
    std::vector<SpectralTag> tags(p);
    Fabric fabric(p, {FabricMode::Threaded});
    fabric.run([&](Communicator& c) {
        FftPlan plan(grid, p, c.rank(), Strategy::Strided);
        const auto spec = plan.forward(inputs[c.rank()], c);
        logical[c.rank()] = spec.logical();
        tags[c.rank()] = spec.tag;
    });
    const std::size_t ln1 = grid.n1 / p, n2c = grid.n2c();
    for (std::size_t rank = 0; rank < p; ++rank) {
        EXPECT_EQ(tags[rank], SpectralTag::StridedInplace);
        for (std::size_t j = 0; j < ln1; ++j)
            for (std::size_t r = 0; r < grid.n0; ++r)
                for (std::size_t k = 0; k < n2c; ++k)
                    EXPECT_LE(std::abs(logical[rank][(j * grid.n0 + r) * n2c + k] -
                                       want[(r * grid.n1 + rank * ln1 + j) * n2c + k]),
                              1e-10);
    }
}

TEST(Inverse, DcSpectrumGivesConstantField)
{
    const GlobalGrid grid{4, 4, 4};
    FftPlan plan(grid, 1, 0, Strategy::Strided);
    Fabric fabric(1, {FabricMode::Threaded});
    auto spec = plan.make_spectral();
    spec.at(0, 0, 0) = 64.0;
    const auto out = plan.inverse(spec, fabric.endpoint(0));
    for (double v : out.data) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(Inverse, RoundTripRandom8Cubed)
{
    const GlobalGrid grid{8, 8, 8};
    const auto field = random_real(grid.real_size(), 9);
    for (auto s : {Strategy::Transpose, Strategy::Strided}) {
        const auto res = run(field, grid, 4, s, FabricMode::Threaded);
        EXPECT_LE(rms_rel(res.roundtrip, field), 1e-12);
    }
}

TEST(Inverse, RecoversDeltaPosition)
{
    const GlobalGrid grid{4, 4, 8};
    std::vector<double> delta(grid.real_size(), 0.0);
    const std::size_t at = (1 * grid.n1 + 2) * grid.n2 + 3;
    delta[at] = 1.0;
    for (auto s : {Strategy::Transpose, Strategy::Strided}) {
        const auto res = run(delta, grid, 2, s);
        const auto it = std::max_element(res.roundtrip.begin(), res.roundtrip.end());
        EXPECT_EQ(static_cast<std::size_t>(it - res.roundtrip.begin()), at);
    }
}

TEST(Inverse, TagMismatchIsContractError)
{
    const GlobalGrid grid{4, 4, 4};
    FftPlan plan(grid, 1, 0, Strategy::Transpose);
    Fabric fabric(1, {FabricMode::Threaded});
    SpectralSlab wrong(plan.spectral_geometry(), SpectralTag::StridedInplace);
    EXPECT_THROW(plan.inverse(wrong, fabric.endpoint(0)), ContractError);
}

TEST(Inverse, NonHermitianSpectrumIsConsistencyError)
{
    const GlobalGrid grid{4, 4, 4};
    FftPlan plan(grid, 1, 0, Strategy::Strided);
    Fabric fabric(1, {FabricMode::Threaded});
    auto spec = plan.make_spectral();
    spec.at(0, 0, 0) = Complex(0.0, 5.0);
    EXPECT_THROW(plan.inverse(spec, fabric.endpoint(0)), ConsistencyError);
}

TEST(Invariants, Parseval3d)
{
    for (const GlobalGrid grid : {GlobalGrid{4, 4, 4}, GlobalGrid{8, 4, 16}, GlobalGrid{16, 16, 16}}) {
        const auto field = random_real(grid.real_size(), grid.n0 * 7 + grid.n2);
        const auto res = run(field, grid, 2, Strategy::Strided);
        double energy = 0.0;
        for (double v : field) energy += v * v;
        // Expand the half spectrum: bins 1 .. n2/2-1 stand for two bins each.
        const std::size_t n2c = grid.n2c();
        double spectral = 0.0;
        for (std::size_t i = 0; i < grid.n0 * grid.n1; ++i)
            for (std::size_t k = 0; k < n2c; ++k) {
                const double w = (k == 0 || k == grid.n2 / 2) ? 1.0 : 2.0;
                spectral += w * std::norm(res.spectrum[i * n2c + k]);
            }
        const double want = energy * static_cast<double>(grid.real_size());
        EXPECT_LE(std::abs(spectral - want) / want, 1e-9);
    }
}

TEST(Invariants, StrategyAndRankCountBitwiseInvariant)
{
    const GlobalGrid grid{16, 16, 8};
    const auto field = random_real(grid.real_size(), 123);
    const auto ref = run(field, grid, 1, Strategy::Transpose).spectrum;
    for (std::size_t p : {1u, 2u, 4u, 8u})
        for (auto s : {Strategy::Transpose, Strategy::Strided})
            EXPECT_TRUE(bitwise_equal(run(field, grid, p, s, FabricMode::Threaded).spectrum, ref))
                << "p=" << p << " " << to_string(s);
}

TEST(Invariants, RealnessResidueIsTiny)
{
    const GlobalGrid grid{16, 8, 16};
    const auto field = random_real(grid.real_size(), 5);
    const auto res = run(field, grid, 4, Strategy::Strided);
    double max_spec = 0.0;
    for (const auto& v : res.spectrum) max_spec = std::max(max_spec, std::abs(v));
    EXPECT_LE(res.stats.max_c2r_residue, 1e-12 * max_spec);
}

TEST(Gather, FourByFourFromEitherStrategy)
{
    const std::vector<double> want{1, 5, 9, 13, 2, 6, 10, 14, 3, 7, 11, 15, 4, 8, 12, 16};
    for (auto s : {Strategy::Transpose, Strategy::Strided}) {
        auto planes = scatter_planes(tfft::testing::iota_complex(16, 1.0), 4, 4, 1, 2);
        std::vector<SpectralSlab> spectra;
        for (std::size_t r = 0; r < 2; ++r) spectra.emplace_back(planes[r].geom, spectral_tag_for(s));
        Fabric fabric(2, {FabricMode::Serial});
        fabric.run([&](Communicator& c) {
            const auto r = c.rank();
            spectra[r] = s == Strategy::Strided ? exchange_strided_forward(planes[r], c)
                                                : exchange_transpose_forward(planes[r], c);
        });
        // gathered[r][c] is logical (r, c): the global array with axes swapped.
        const auto gathered = gather_spectral(spectra);
        std::vector<double> transposed(16);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) transposed[c * 4 + r] = gathered[r * 4 + c].real();
        EXPECT_EQ(transposed, want);
    }
}

TEST(Gather, MissingOrDuplicateRank)
{
    const auto g0 = ExchangeGeometry::make(4, 4, 1, 2, 0);
    std::vector<SpectralSlab> one{SpectralSlab(g0, SpectralTag::StridedInplace)};
    EXPECT_THROW(gather_spectral(one), ProtocolError);
    std::vector<SpectralSlab> dup{SpectralSlab(g0, SpectralTag::StridedInplace),
                                  SpectralSlab(g0, SpectralTag::StridedInplace)};
    EXPECT_THROW(gather_spectral(dup), ProtocolError);
}

TEST(Stats, CountersAndRepeatedUse)
{
    const GlobalGrid grid{8, 8, 4};
    const std::size_t p = 2;
    const auto field = random_real(grid.real_size(), 8);
    auto inputs = scatter_real(field, grid, p);
    std::vector<CopyCounter> counts(p);
    std::vector<std::vector<double>> outs(p);
    Fabric fabric(p, {FabricMode::Threaded});
    fabric.run([&](Communicator& c) {
        FftPlan plan(grid, p, c.rank(), Strategy::Transpose);
        auto spec = plan.make_spectral();
        auto out = plan.make_real();
        for (int i = 0; i < 3; ++i) {
            plan.reset_stats();
            plan.forward(inputs[c.rank()], spec, c);
            plan.inverse_inplace(spec, out, c);
        }
        counts[c.rank()] = plan.stats().copies;
        outs[c.rank()] = out.data;
        EXPECT_GT(plan.stats().times.total_us, 0.0);
    });
    const std::uint64_t block = (8 / p) * (8 / p) * 3 * kComplexBytes;
    for (const auto& c : counts) {
        EXPECT_EQ(c.bytes_packed, 2 * (p - 1) * block);
        EXPECT_EQ(c.bytes_wire, 2 * (p - 1) * block);
        EXPECT_EQ(c.bytes_unpacked, 2 * (p - 1) * block);
    }
    std::vector<RealSlab> slabs;
    for (std::size_t r = 0; r < p; ++r) {
        slabs.emplace_back(SlabLayout::make(grid, p, r, DistAxis::RealAxis0));
        slabs.back().data = outs[r];
    }
    EXPECT_LE(rms_rel(gather_real(slabs), field), 1e-12);
}
