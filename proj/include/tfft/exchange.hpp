#pragma once

// Redistribution between the plane stage (data split along axis 0) and the
// column stage (data split along axis 1).
//
// Strategy::Transpose packs each outgoing block with its (i, j) axes
// swapped, exchanges contiguous blocks, and rearranges the received
// blocks into a ContiguousFlipped slab.
//
// Strategy::Strided sends column band q of the local buffer straight to
// rank q through a strided descriptor and receives rank q's data into the
// band it just vacated. No local pack or unpack pass happens and the
// result is a StridedInplace slab occupying the original buffer.

#include "tfft/layout.hpp"
#include "tfft/transport.hpp"

#include <span>
#include <vector>

namespace tfft {

enum class Strategy { Transpose, Strided };

const char* to_string(Strategy strategy) noexcept;

/// Tag the forward exchange produces for a strategy.
constexpr SpectralTag spectral_tag_for(Strategy s) noexcept
{
    return s == Strategy::Strided ? SpectralTag::StridedInplace : SpectralTag::ContiguousFlipped;
}

/// Per-peer geometry of one rank's exchange. For Strided the send and the
/// receive descriptor of a peer are the same column band; for Transpose
/// they are consecutive contiguous blocks of the packing buffers.
struct ExchangePlan {
    ExchangeGeometry geom;
    Strategy strategy = Strategy::Strided;
    CommPattern pattern = CommPattern::Pairwise;
    std::vector<LayoutDescriptor> send_descs;
    std::vector<LayoutDescriptor> recv_descs;
    std::size_t send_scratch_size = 0;
    std::size_t recv_scratch_size = 0;

    static ExchangePlan make(const ExchangeGeometry& geom, Strategy strategy, CommPattern pattern);
};

/// Column band of peer q inside a (n0/p) x n1 x n2c buffer:
/// {count = n0/p, block_length = (n1/p)*n2c, stride = n1*n2c, base = q*(n1/p)*n2c}.
LayoutDescriptor column_band(const ExchangeGeometry& geom, std::size_t peer);

/// block(j, i, k) = slab(i, dest*(n1/p) + j, k). `block` holds
/// (n1/p)*(n0/p)*n2c elements. Counted as bytes_packed, or bytes_local when
/// dest is the calling rank.
void pack_transposed(std::span<const Complex> slab, const ExchangeGeometry& geom,
                     std::size_t dest, std::span<Complex> block, CopyCounter& counter);

std::vector<Complex> pack_transposed(const PlaneSlab& slab, std::size_t dest,
                                     CopyCounter& counter);

/// out(j, b*(n0/p) + i, k) = block_b(j, i, k) for every source b, where
/// `blocks` is the p blocks laid end to end and `out` is a ContiguousFlipped
/// buffer.
void unpack_received(std::span<const Complex> blocks, const ExchangeGeometry& geom,
                     std::span<Complex> out, CopyCounter& counter);

/// ProtocolError on a wrong block count or size; ContractError if `out`
/// is not ContiguousFlipped.
void unpack_received(const std::vector<std::vector<Complex>>& blocks, SpectralSlab& out,
                     CopyCounter& counter);

/// Executes an ExchangePlan. Owns the packing buffers, so repeated
/// exchanges do not allocate.
class Exchanger {
public:
    explicit Exchanger(ExchangePlan plan);

    const ExchangePlan& plan() const noexcept { return plan_; }
    SpectralTag output_tag() const noexcept { return spectral_tag_for(plan_.strategy); }

    /// `plane` is the (n0/p) x n1 x n2c stage-one buffer. For Strided the
    /// data ends up in `spectral`, which should alias `plane`; a distinct
    /// buffer is first filled by a local copy. For Transpose the two must
    /// not overlap.
    void forward(std::span<Complex> plane, std::span<Complex> spectral, Communicator& comm);

    /// Reverse permutation of forward; the same aliasing rules apply.
    void inverse(std::span<Complex> spectral, std::span<Complex> plane, Communicator& comm);

    /// Accumulated since construction or the last reset; includes the
    /// fabric bytes this exchanger caused.
    const CopyCounter& counters() const noexcept { return counters_; }
    void reset_counters() noexcept { counters_ = {}; }

private:
    void move_strided(std::span<Complex> from, std::span<Complex> to, Communicator& comm);
    void exchange_blocks(Communicator& comm);

    ExchangePlan plan_;
    std::vector<Complex> send_scratch_;
    std::vector<Complex> recv_scratch_;
    CopyCounter counters_;
};

SpectralSlab exchange_transpose_forward(const PlaneSlab& slab, Communicator& comm,
                                        CommPattern pattern = CommPattern::Pairwise,
                                        CopyCounter* counters = nullptr);

SpectralSlab exchange_strided_forward(PlaneSlab slab, Communicator& comm,
                                      CommPattern pattern = CommPattern::Pairwise,
                                      CopyCounter* counters = nullptr);

/// ContractError unless `slab` is ContiguousFlipped.
PlaneSlab exchange_transpose_inverse(const SpectralSlab& slab, Communicator& comm,
                                     CommPattern pattern = CommPattern::Pairwise,
                                     CopyCounter* counters = nullptr);

/// ContractError unless `slab` is StridedInplace.
PlaneSlab exchange_strided_inverse(SpectralSlab slab, Communicator& comm,
                                   CommPattern pattern = CommPattern::Pairwise,
                                   CopyCounter* counters = nullptr);

} // namespace tfft
