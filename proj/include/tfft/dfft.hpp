#pragma once

// Distributed 3D real<->complex FFT over slab decomposition.
//
// Forward, per rank:
//   1. r2c plane transforms (n1 x n2) on the n0/p local planes
//   2. exchange, Transpose or Strided
//   3. forward c2c of length n0 on each of the (n1/p) x n2c local columns
// Inverse runs the stages in reverse order and scales by 1/(n0*n1*n2).
//
// Both strategies feed identical operands, in identical order, to the same
// kernels, so their spectra agree bit for bit. So do different rank counts.

#include "tfft/exchange.hpp"
#include "tfft/layout.hpp"
#include "tfft/transport.hpp"

#include <span>
#include <vector>

namespace tfft {

struct StageTimes {
    double stage1_us = 0.0;
    double exchange_us = 0.0;
    double stage3_us = 0.0;
    double total_us = 0.0;

    StageTimes& operator+=(const StageTimes& o) noexcept
    {
        stage1_us += o.stage1_us;
        exchange_us += o.exchange_us;
        stage3_us += o.stage3_us;
        total_us += o.total_us;
        return *this;
    }
};

struct TransformStats {
    StageTimes times;
    CopyCounter copies;
    /// Largest imaginary magnitude dropped by the c2r row transforms.
    double max_c2r_residue = 0.0;
};

class FftPlan {
public:
    /// Throws ConfigError if the grid cannot be split over p ranks.
    FftPlan(const GlobalGrid& grid, std::size_t p, std::size_t rank, Strategy strategy,
            CommPattern pattern = CommPattern::Pairwise);

    const GlobalGrid& grid() const noexcept { return grid_; }
    std::size_t procs() const noexcept { return real_layout_.p; }
    std::size_t rank() const noexcept { return real_layout_.rank; }
    Strategy strategy() const noexcept { return exchanger_.plan().strategy; }
    CommPattern pattern() const noexcept { return exchanger_.plan().pattern; }
    const SlabLayout& real_layout() const noexcept { return real_layout_; }
    const ExchangeGeometry& spectral_geometry() const noexcept { return geom_; }
    SpectralTag spectral_tag() const noexcept { return exchanger_.output_tag(); }
    const ExchangePlan& exchange_plan() const noexcept { return exchanger_.plan(); }

    RealSlab make_real() const { return RealSlab(real_layout_); }
    SpectralSlab make_spectral() const { return SpectralSlab(geom_, spectral_tag()); }

    /// Unnormalized forward transform. Collective over `comm`.
    void forward(const RealSlab& in, SpectralSlab& out, Communicator& comm);
    SpectralSlab forward(const RealSlab& in, Communicator& comm);

    /// Normalized inverse. `spec` is used as workspace and left clobbered.
    /// ContractError if its tag or geometry does not match the plan;
    /// ConsistencyError if it is not the spectrum of a real field.
    void inverse_inplace(SpectralSlab& spec, RealSlab& out, Communicator& comm);
    RealSlab inverse(SpectralSlab spec, Communicator& comm);

    const TransformStats& stats() const noexcept { return stats_; }
    void reset_stats() noexcept;

private:
    void column_pass(std::span<Complex> data, Direction dir);

    GlobalGrid grid_;
    SlabLayout real_layout_;
    ExchangeGeometry geom_;
    TwiddleTable tw0_, tw1_, tw2_;
    Exchanger exchanger_;
    PlaneScratch plane_scratch_;
    std::vector<Complex> column_scratch_;
    std::vector<Complex> plane_buffer_; // Transpose only
    TransformStats stats_;
};

/// Global n0 x n1 x n2c array from all ranks' spectral slabs:
/// global[r][c][k] = slab[c / (n1/p)].at(c % (n1/p), r, k).
/// ProtocolError if a rank is missing or duplicated; ContractError on
/// mixed tags or geometries.
std::vector<Complex> gather_spectral(std::span<const SpectralSlab> slabs);

/// Splits a global real n0 x n1 x n2 field into per-rank slabs.
std::vector<RealSlab> scatter_real(std::span<const double> field, const GlobalGrid& grid,
                                   std::size_t p);
std::vector<double> gather_real(std::span<const RealSlab> slabs);

/// Splits a global complex n0 x n1 x n2c array along axis 0.
std::vector<PlaneSlab> scatter_planes(std::span<const Complex> global, std::size_t n0,
                                      std::size_t n1, std::size_t n2c, std::size_t p);

struct DistributedResult {
    std::vector<Complex> spectrum;  // gathered forward output
    std::vector<double> roundtrip;  // gathered inverse(forward(field)); empty if skipped
    TransformStats stats;           // summed over ranks
};

/// Convenience driver: scatters `field`, runs one forward (and optionally
/// one inverse) on a fresh fabric, gathers the results.
DistributedResult run_distributed(std::span<const double> field, const GlobalGrid& grid,
                                  std::size_t p, Strategy strategy, CommPattern pattern,
                                  FabricOptions fabric, bool with_inverse = true);

} // namespace tfft
