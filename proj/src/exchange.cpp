#include "tfft/exchange.hpp"

#include "tfft/errors.hpp"

#include <algorithm>
#include <string>

namespace tfft {

namespace {

std::uint64_t bytes_of(std::size_t elements) { return elements * kComplexBytes; }

void charge(CopyCounter& counter, bool self, std::uint64_t bytes, bool pack)
{
    if (self)
        counter.bytes_local += bytes;
    else if (pack)
        counter.bytes_packed += bytes;
    else
        counter.bytes_unpacked += bytes;
}

// block(j, i, k) = flipped(j, dest*(n0/p) + i, k): a run of (n0/p)*n2c
// contiguous elements per j.
void pack_flipped(std::span<const Complex> flipped, const ExchangeGeometry& g, std::size_t dest,
                  std::span<Complex> block, CopyCounter& counter)
{
    const std::size_t ln0 = g.local_n0();
    const std::size_t run = ln0 * g.n2c;
    for (std::size_t j = 0; j < g.local_n1(); ++j)
        std::copy_n(flipped.begin() + static_cast<std::ptrdiff_t>((j * g.n0 + dest * ln0) * g.n2c),
                    run, block.begin() + static_cast<std::ptrdiff_t>(j * run));
    charge(counter, dest == g.rank, bytes_of(g.block_size()), true);
}

// slab(i, src*(n1/p) + j, k) = block_src(j, i, k).
void unpack_to_plane(std::span<const Complex> blocks, const ExchangeGeometry& g,
                     std::span<Complex> slab, CopyCounter& counter)
{
    const std::size_t ln0 = g.local_n0();
    const std::size_t ln1 = g.local_n1();
    for (std::size_t src = 0; src < g.p; ++src) {
        const Complex* block = blocks.data() + src * g.block_size();
        for (std::size_t j = 0; j < ln1; ++j)
            for (std::size_t i = 0; i < ln0; ++i)
                std::copy_n(block + (j * ln0 + i) * g.n2c, g.n2c,
                            slab.data() + (i * g.n1 + src * ln1 + j) * g.n2c);
        charge(counter, src == g.rank, bytes_of(g.block_size()), false);
    }
}

void require_size(std::span<const Complex> buf, std::size_t want, const char* what)
{
    if (buf.size() != want)
        throw ContractError(std::string(what) + " has " + std::to_string(buf.size()) +
                            " elements, expected " + std::to_string(want));
}

bool overlaps(std::span<const Complex> a, std::span<const Complex> b)
{
    return a.data() < b.data() + b.size() && b.data() < a.data() + a.size();
}

} // namespace

const char* to_string(Strategy strategy) noexcept
{
    return strategy == Strategy::Strided ? "strided" : "transpose";
}

LayoutDescriptor column_band(const ExchangeGeometry& g, std::size_t peer)
{
    return LayoutDescriptor{g.local_n0(), g.local_n1() * g.n2c,
                            static_cast<std::ptrdiff_t>(g.n1 * g.n2c),
                            static_cast<std::ptrdiff_t>(peer * g.local_n1() * g.n2c)};
}

ExchangePlan ExchangePlan::make(const ExchangeGeometry& geom, Strategy strategy,
                                CommPattern pattern)
{
    ExchangePlan plan;
    plan.geom = ExchangeGeometry::make(geom.n0, geom.n1, geom.n2c, geom.p, geom.rank);
    plan.strategy = strategy;
    plan.pattern = pattern;
    const std::size_t block = geom.block_size();
    for (std::size_t q = 0; q < geom.p; ++q) {
        const auto desc = strategy == Strategy::Strided
                              ? column_band(geom, q)
                              : LayoutDescriptor::contiguous(
                                    block, static_cast<std::ptrdiff_t>(q * block));
        plan.send_descs.push_back(desc);
        plan.recv_descs.push_back(desc);
    }
    if (strategy == Strategy::Transpose) {
        plan.send_scratch_size = geom.p * block;
        plan.recv_scratch_size = geom.p * block;
    }
    return plan;
}

void pack_transposed(std::span<const Complex> slab, const ExchangeGeometry& g, std::size_t dest,
                     std::span<Complex> block, CopyCounter& counter)
{
    if (dest >= g.p) throw BoundsError("destination rank " + std::to_string(dest) + " >= p");
    require_size(slab, g.local_size(), "pack_transposed slab");
    require_size(block, g.block_size(), "pack_transposed block");
    const std::size_t ln0 = g.local_n0();
    const std::size_t ln1 = g.local_n1();
    for (std::size_t j = 0; j < ln1; ++j)
        for (std::size_t i = 0; i < ln0; ++i)
            std::copy_n(slab.data() + (i * g.n1 + dest * ln1 + j) * g.n2c, g.n2c,
                        block.data() + (j * ln0 + i) * g.n2c);
    charge(counter, dest == g.rank, bytes_of(g.block_size()), true);
}

std::vector<Complex> pack_transposed(const PlaneSlab& slab, std::size_t dest, CopyCounter& counter)
{
    std::vector<Complex> block(slab.geom.block_size());
    pack_transposed(slab.data, slab.geom, dest, block, counter);
    return block;
}

void unpack_received(std::span<const Complex> blocks, const ExchangeGeometry& g,
                     std::span<Complex> out, CopyCounter& counter)
{
    if (blocks.size() != g.p * g.block_size())
        throw ProtocolError("received " + std::to_string(blocks.size()) +
                            " elements, expected p blocks of " + std::to_string(g.block_size()));
    require_size(out, g.local_size(), "unpack_received output");
    const std::size_t ln0 = g.local_n0();
    const std::size_t run = ln0 * g.n2c;
    for (std::size_t b = 0; b < g.p; ++b) {
        const Complex* block = blocks.data() + b * g.block_size();
        for (std::size_t j = 0; j < g.local_n1(); ++j)
            std::copy_n(block + j * run, run, out.data() + (j * g.n0 + b * ln0) * g.n2c);
        charge(counter, b == g.rank, bytes_of(g.block_size()), false);
    }
}

void unpack_received(const std::vector<std::vector<Complex>>& blocks, SpectralSlab& out,
                     CopyCounter& counter)
{
    if (out.tag != SpectralTag::ContiguousFlipped)
        throw ContractError("unpack_received writes contiguous-flipped slabs only");
    const auto& g = out.geom;
    if (blocks.size() != g.p)
        throw ProtocolError("expected " + std::to_string(g.p) + " blocks, got " +
                            std::to_string(blocks.size()));
    std::vector<Complex> joined;
    joined.reserve(g.p * g.block_size());
    for (const auto& b : blocks) {
        if (b.size() != g.block_size())
            throw ProtocolError("block of " + std::to_string(b.size()) + " elements, expected " +
                                std::to_string(g.block_size()));
        joined.insert(joined.end(), b.begin(), b.end());
    }
    unpack_received(joined, g, out.data, counter);
}

Exchanger::Exchanger(ExchangePlan plan)
    : plan_(std::move(plan)),
      send_scratch_(plan_.send_scratch_size),
      recv_scratch_(plan_.recv_scratch_size)
{
}

void Exchanger::exchange_blocks(Communicator& comm)
{
    if (comm.size() != plan_.geom.p || comm.rank() != plan_.geom.rank)
        throw ContractError("communicator does not match the exchange plan");
    const auto before = comm.counters();
    comm.all_to_all(comm.next_tag(), send_scratch_, plan_.send_descs, recv_scratch_,
                    plan_.recv_descs, plan_.pattern, SelfBlock::Skip);
    counters_ += comm.counters() - before;
}

void Exchanger::move_strided(std::span<Complex> from, std::span<Complex> to, Communicator& comm)
{
    if (comm.size() != plan_.geom.p || comm.rank() != plan_.geom.rank)
        throw ContractError("communicator does not match the exchange plan");
    if (from.data() != to.data()) {
        if (overlaps(from, to)) throw ContractError("partially overlapping exchange buffers");
        std::copy(from.begin(), from.end(), to.begin());
        counters_.bytes_local += bytes_of(to.size());
    }
    if (plan_.geom.p == 1) return;
    const auto before = comm.counters();
    comm.all_to_all(comm.next_tag(), to, plan_.send_descs, to, plan_.recv_descs, plan_.pattern,
                    SelfBlock::Skip);
    counters_ += comm.counters() - before;
}

void Exchanger::forward(std::span<Complex> plane, std::span<Complex> spectral, Communicator& comm)
{
    const auto& g = plan_.geom;
    require_size(plane, g.local_size(), "exchange input");
    require_size(spectral, g.local_size(), "exchange output");
    if (plan_.strategy == Strategy::Strided) {
        move_strided(plane, spectral, comm);
        return;
    }
    if (overlaps(plane, spectral))
        throw ContractError("transpose exchange needs distinct input and output buffers");
    const std::size_t block = g.block_size();
    for (std::size_t q = 0; q < g.p; ++q) {
        auto& target = q == g.rank ? recv_scratch_ : send_scratch_;
        pack_transposed(plane, g, q, std::span(target).subspan(q * block, block), counters_);
    }
    exchange_blocks(comm);
    unpack_received(recv_scratch_, g, spectral, counters_);
}

void Exchanger::inverse(std::span<Complex> spectral, std::span<Complex> plane, Communicator& comm)
{
    const auto& g = plan_.geom;
    require_size(spectral, g.local_size(), "exchange input");
    require_size(plane, g.local_size(), "exchange output");
    if (plan_.strategy == Strategy::Strided) {
        // The band swap is its own inverse.
        move_strided(spectral, plane, comm);
        return;
    }
    if (overlaps(plane, spectral))
        throw ContractError("transpose exchange needs distinct input and output buffers");
    const std::size_t block = g.block_size();
    for (std::size_t q = 0; q < g.p; ++q) {
        auto& target = q == g.rank ? recv_scratch_ : send_scratch_;
        pack_flipped(spectral, g, q, std::span(target).subspan(q * block, block), counters_);
    }
    exchange_blocks(comm);
    unpack_to_plane(recv_scratch_, g, plane, counters_);
}

SpectralSlab exchange_transpose_forward(const PlaneSlab& slab, Communicator& comm,
                                        CommPattern pattern, CopyCounter* counters)
{
    Exchanger ex(ExchangePlan::make(slab.geom, Strategy::Transpose, pattern));
    SpectralSlab out(slab.geom, SpectralTag::ContiguousFlipped);
    std::vector<Complex> input = slab.data;
    ex.forward(input, out.data, comm);
    if (counters) *counters += ex.counters();
    return out;
}

SpectralSlab exchange_strided_forward(PlaneSlab slab, Communicator& comm, CommPattern pattern,
                                      CopyCounter* counters)
{
    Exchanger ex(ExchangePlan::make(slab.geom, Strategy::Strided, pattern));
    ex.forward(slab.data, slab.data, comm);
    if (counters) *counters += ex.counters();
    return SpectralSlab(slab.geom, SpectralTag::StridedInplace, std::move(slab.data));
}

PlaneSlab exchange_transpose_inverse(const SpectralSlab& slab, Communicator& comm,
                                     CommPattern pattern, CopyCounter* counters)
{
    if (slab.tag != SpectralTag::ContiguousFlipped)
        throw ContractError("transpose inverse needs a contiguous-flipped slab, got " +
                            std::string(to_string(slab.tag)));
    Exchanger ex(ExchangePlan::make(slab.geom, Strategy::Transpose, pattern));
    PlaneSlab out(slab.geom);
    std::vector<Complex> input = slab.data;
    ex.inverse(input, out.data, comm);
    if (counters) *counters += ex.counters();
    return out;
}

PlaneSlab exchange_strided_inverse(SpectralSlab slab, Communicator& comm, CommPattern pattern,
                                   CopyCounter* counters)
{
    if (slab.tag != SpectralTag::StridedInplace)
        throw ContractError("strided inverse needs a strided-inplace slab, got " +
                            std::string(to_string(slab.tag)));
    Exchanger ex(ExchangePlan::make(slab.geom, Strategy::Strided, pattern));
    ex.inverse(slab.data, slab.data, comm);
    if (counters) *counters += ex.counters();
    return PlaneSlab(slab.geom, std::move(slab.data));
}

} // namespace tfft
