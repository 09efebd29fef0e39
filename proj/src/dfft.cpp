#include "tfft/dfft.hpp"

#include "tfft/errors.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace tfft {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

} // namespace

FftPlan::FftPlan(const GlobalGrid& grid, std::size_t p, std::size_t rank, Strategy strategy,
                 CommPattern pattern)
    : grid_(grid),
      real_layout_(SlabLayout::make(grid, p, rank, DistAxis::RealAxis0)),
      geom_(ExchangeGeometry::from(real_layout_)),
      tw0_(grid.n0),
      tw1_(grid.n1),
      tw2_(grid.n2),
      exchanger_(ExchangePlan::make(geom_, strategy, pattern)),
      plane_scratch_(grid.n1, grid.n2),
      column_scratch_(grid.n0)
{
    if (strategy == Strategy::Transpose) plane_buffer_.resize(geom_.local_size());
    // Columns differ only in base offset, so the two extreme ones bound them all.
    const auto tag = spectral_tag();
    check_stride(column_descriptor(geom_, tag, 0, 0), geom_.local_size());
    check_stride(column_descriptor(geom_, tag, geom_.local_n1() - 1, geom_.n2c - 1),
                 geom_.local_size());
}

void FftPlan::reset_stats() noexcept
{
    stats_ = {};
    exchanger_.reset_counters();
}

void FftPlan::column_pass(std::span<Complex> data, Direction dir)
{
    const auto tag = spectral_tag();
    for (std::size_t j = 0; j < geom_.local_n1(); ++j)
        for (std::size_t k = 0; k < geom_.n2c; ++k)
            fft_c2c_strided(data, column_descriptor(geom_, tag, j, k), dir, tw0_, column_scratch_,
                            StrideCheck::None);
}

void FftPlan::forward(const RealSlab& in, SpectralSlab& out, Communicator& comm)
{
    if (in.layout.grid != grid_ || in.layout.p != procs() || in.layout.rank != rank() ||
        in.data.size() != geom_.local_n0() * grid_.n1 * grid_.n2)
        throw ContractError("real slab does not match the plan layout");
    if (out.geom != geom_ || out.tag != spectral_tag() || out.data.size() != geom_.local_size())
        throw ContractError("spectral slab does not match the plan layout");

    const auto start = Clock::now();
    const bool strided = strategy() == Strategy::Strided;
    std::span<Complex> planes = strided ? std::span<Complex>(out.data) : plane_buffer_;

    const std::size_t real_plane = grid_.n1 * grid_.n2;
    const std::size_t spec_plane = grid_.n1 * grid_.n2c();
    const std::span<const double> real(in.data);
    for (std::size_t i = 0; i < geom_.local_n0(); ++i)
        fft2d_r2c_plane(real.subspan(i * real_plane, real_plane),
                        planes.subspan(i * spec_plane, spec_plane), tw1_, tw2_, plane_scratch_);
    const auto t1 = Clock::now();

    const auto before = exchanger_.counters();
    exchanger_.forward(planes, out.data, comm);
    stats_.copies += exchanger_.counters() - before;
    const auto t2 = Clock::now();

    column_pass(out.data, Direction::Forward);

    StageTimes t;
    t.stage1_us = std::chrono::duration<double, std::micro>(t1 - start).count();
    t.exchange_us = std::chrono::duration<double, std::micro>(t2 - t1).count();
    t.stage3_us = micros_since(t2);
    t.total_us = micros_since(start);
    stats_.times += t;
}

SpectralSlab FftPlan::forward(const RealSlab& in, Communicator& comm)
{
    auto out = make_spectral();
    forward(in, out, comm);
    return out;
}

void FftPlan::inverse_inplace(SpectralSlab& spec, RealSlab& out, Communicator& comm)
{
    if (spec.tag != spectral_tag())
        throw ContractError(std::string("plan expects a ") + to_string(spectral_tag()) +
                            " slab, got " + to_string(spec.tag));
    if (spec.geom != geom_ || spec.data.size() != geom_.local_size())
        throw ContractError("spectral slab does not match the plan layout");
    if (out.layout.grid != grid_ || out.layout.p != procs() || out.layout.rank != rank() ||
        out.data.size() != geom_.local_n0() * grid_.n1 * grid_.n2)
        throw ContractError("real slab does not match the plan layout");

    const auto start = Clock::now();
    column_pass(spec.data, Direction::Inverse);
    const auto t1 = Clock::now();

    const bool strided = strategy() == Strategy::Strided;
    std::span<Complex> planes = strided ? std::span<Complex>(spec.data) : plane_buffer_;
    const auto before = exchanger_.counters();
    exchanger_.inverse(spec.data, planes, comm);
    stats_.copies += exchanger_.counters() - before;
    const auto t2 = Clock::now();

    const std::size_t real_plane = grid_.n1 * grid_.n2;
    const std::size_t spec_plane = grid_.n1 * grid_.n2c();
    const std::span<double> real(out.data);
    for (std::size_t i = 0; i < geom_.local_n0(); ++i) {
        const double residue =
            fft2d_c2r_plane(planes.subspan(i * spec_plane, spec_plane),
                            real.subspan(i * real_plane, real_plane), tw1_, tw2_, plane_scratch_);
        stats_.max_c2r_residue = std::max(stats_.max_c2r_residue, residue);
    }
    const double scale = 1.0 / static_cast<double>(grid_.real_size());
    for (auto& x : out.data) x *= scale;

    StageTimes t;
    t.stage3_us = std::chrono::duration<double, std::micro>(t1 - start).count();
    t.exchange_us = std::chrono::duration<double, std::micro>(t2 - t1).count();
    t.stage1_us = micros_since(t2);
    t.total_us = micros_since(start);
    stats_.times += t;
}

RealSlab FftPlan::inverse(SpectralSlab spec, Communicator& comm)
{
    auto out = make_real();
    inverse_inplace(spec, out, comm);
    return out;
}

std::vector<Complex> gather_spectral(std::span<const SpectralSlab> slabs)
{
    if (slabs.empty()) throw ProtocolError("no spectral slabs to gather");
    const auto& g0 = slabs.front().geom;
    if (slabs.size() != g0.p)
        throw ProtocolError("gather needs " + std::to_string(g0.p) + " slabs, got " +
                            std::to_string(slabs.size()));
    std::vector<const SpectralSlab*> by_rank(g0.p, nullptr);
    for (const auto& s : slabs) {
        if (s.tag != slabs.front().tag) throw ContractError("gather over mixed slab tags");
        if (s.geom.n0 != g0.n0 || s.geom.n1 != g0.n1 || s.geom.n2c != g0.n2c || s.geom.p != g0.p)
            throw ContractError("gather over mixed geometries");
        if (by_rank[s.geom.rank]) throw ProtocolError("duplicate slab for one rank");
        by_rank[s.geom.rank] = &s;
    }

    const std::size_t ln1 = g0.local_n1();
    std::vector<Complex> global(g0.n0 * g0.n1 * g0.n2c);
    for (std::size_t r = 0; r < g0.n0; ++r)
        for (std::size_t c = 0; c < g0.n1; ++c)
            for (std::size_t k = 0; k < g0.n2c; ++k)
                global[(r * g0.n1 + c) * g0.n2c + k] = by_rank[c / ln1]->at(c % ln1, r, k);
    return global;
}

std::vector<RealSlab> scatter_real(std::span<const double> field, const GlobalGrid& grid,
                                   std::size_t p)
{
    validate(grid, p);
    if (field.size() != grid.real_size()) throw ContractError("field size does not match grid");
    std::vector<RealSlab> slabs;
    slabs.reserve(p);
    for (std::size_t r = 0; r < p; ++r) {
        RealSlab slab(SlabLayout::make(grid, p, r, DistAxis::RealAxis0));
        const auto n = slab.data.size();
        std::copy_n(field.begin() + static_cast<std::ptrdiff_t>(r * n), n, slab.data.begin());
        slabs.push_back(std::move(slab));
    }
    return slabs;
}

std::vector<double> gather_real(std::span<const RealSlab> slabs)
{
    if (slabs.empty()) throw ProtocolError("no real slabs to gather");
    const auto& layout = slabs.front().layout;
    if (slabs.size() != layout.p) throw ProtocolError("gather needs one slab per rank");
    std::vector<double> field(layout.grid.real_size());
    const std::size_t n = field.size() / layout.p;
    std::vector<bool> seen(layout.p, false);
    for (const auto& s : slabs) {
        if (s.layout.grid != layout.grid || s.layout.p != layout.p)
            throw ContractError("gather over mixed layouts");
        if (seen[s.layout.rank]) throw ProtocolError("duplicate slab for one rank");
        seen[s.layout.rank] = true;
        std::copy(s.data.begin(), s.data.end(),
                  field.begin() + static_cast<std::ptrdiff_t>(s.layout.rank * n));
    }
    return field;
}

std::vector<PlaneSlab> scatter_planes(std::span<const Complex> global, std::size_t n0,
                                      std::size_t n1, std::size_t n2c, std::size_t p)
{
    if (global.size() != n0 * n1 * n2c) throw ContractError("array size does not match shape");
    std::vector<PlaneSlab> slabs;
    slabs.reserve(p);
    for (std::size_t r = 0; r < p; ++r) {
        PlaneSlab slab(ExchangeGeometry::make(n0, n1, n2c, p, r));
        const auto n = slab.data.size();
        std::copy_n(global.begin() + static_cast<std::ptrdiff_t>(r * n), n, slab.data.begin());
        slabs.push_back(std::move(slab));
    }
    return slabs;
}

DistributedResult run_distributed(std::span<const double> field, const GlobalGrid& grid,
                                  std::size_t p, Strategy strategy, CommPattern pattern,
                                  FabricOptions fabric_options, bool with_inverse)
{
    auto inputs = scatter_real(field, grid, p);
    std::vector<SpectralSlab> spectra;
    std::vector<RealSlab> outputs;
    std::vector<TransformStats> stats(p);
    for (std::size_t r = 0; r < p; ++r) {
        spectra.emplace_back(ExchangeGeometry::from(inputs[r].layout),
                             spectral_tag_for(strategy));
        outputs.emplace_back(inputs[r].layout);
    }

    Fabric fabric(p, fabric_options);
    fabric.run([&](Communicator& comm) {
        const auto r = comm.rank();
        FftPlan plan(grid, p, r, strategy, pattern);
        plan.forward(inputs[r], spectra[r], comm);
        if (with_inverse) {
            auto work = spectra[r];
            plan.inverse_inplace(work, outputs[r], comm);
        }
        stats[r] = plan.stats();
    });

    DistributedResult result;
    result.spectrum = gather_spectral(spectra);
    if (with_inverse) result.roundtrip = gather_real(outputs);
    for (const auto& s : stats) {
        result.stats.times += s.times;
        result.stats.copies += s.copies;
        result.stats.max_c2r_residue = std::max(result.stats.max_c2r_residue, s.max_c2r_residue);
    }
    return result;
}

} // namespace tfft
