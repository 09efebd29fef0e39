#pragma once

// Global grid description, slab ownership, and rank-local containers.
//
// Real data is distributed along axis 0: each rank owns (n0/p) x n1 x n2
// row-major with n2 fastest. After the plane transforms the complex data
// keeps that distribution, (n0/p) x n1 x n2c (a PlaneSlab). After the
// exchange each rank owns n1/p columns of axis 1 for every r in [0, n0),
// stored in one of two physical layouts (SpectralTag) behind the same
// logical (j, r, k) index space.

#include "tfft/fft_core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tfft {

struct GlobalGrid {
    std::size_t n0 = 2;
    std::size_t n1 = 2;
    std::size_t n2 = 2;

    std::size_t n2c() const noexcept { return n2 / 2 + 1; }
    std::size_t real_size() const noexcept { return n0 * n1 * n2; }
    std::size_t spectral_size() const noexcept { return n0 * n1 * n2c(); }

    friend bool operator==(const GlobalGrid&, const GlobalGrid&) = default;
};

/// Throws ConfigError unless p >= 1, every axis is a power of two >= 2,
/// and p divides both n0 and n1. The message names the failing axis.
void validate(const GlobalGrid& grid, std::size_t p);

enum class DistAxis { RealAxis0, SpectralAxis1 };

struct SlabLayout {
    GlobalGrid grid;
    std::size_t p = 1;
    std::size_t rank = 0;
    DistAxis axis = DistAxis::RealAxis0;

    /// Validated constructor; also rejects rank >= p.
    static SlabLayout make(const GlobalGrid& grid, std::size_t p, std::size_t rank,
                           DistAxis axis);
};

struct OwnedRange {
    std::size_t start = 0;
    std::size_t length = 0;
    friend bool operator==(const OwnedRange&, const OwnedRange&) = default;
};

OwnedRange owned_range(const SlabLayout& layout);

/// Shape of the complex data one rank holds around the exchange. Kept
/// separate from GlobalGrid so n2c may be any positive extent (the 2D
/// exchange pictures use n2c = 1).
struct ExchangeGeometry {
    std::size_t n0 = 1;
    std::size_t n1 = 1;
    std::size_t n2c = 1;
    std::size_t p = 1;
    std::size_t rank = 0;

    std::size_t local_n0() const noexcept { return n0 / p; }
    std::size_t local_n1() const noexcept { return n1 / p; }
    /// Complex elements held per rank, identical before and after exchange.
    std::size_t local_size() const noexcept { return local_n0() * n1 * n2c; }
    /// Elements moving between one (src, dst) pair.
    std::size_t block_size() const noexcept { return local_n0() * local_n1() * n2c; }

    /// Throws ConfigError unless p divides n0 and n1 and rank < p.
    static ExchangeGeometry make(std::size_t n0, std::size_t n1, std::size_t n2c, std::size_t p,
                                 std::size_t rank);
    static ExchangeGeometry from(const SlabLayout& layout);

    friend bool operator==(const ExchangeGeometry&, const ExchangeGeometry&) = default;
};

enum class SpectralTag { ContiguousFlipped, StridedInplace };

const char* to_string(SpectralTag tag) noexcept;

/// Buffer offset of logical element (j, r, k):
///   ContiguousFlipped: j*(n0*n2c) + r*n2c + k
///   StridedInplace:    (r % (n0/p))*(n1*n2c) + (r / (n0/p))*((n1/p)*n2c) + j*n2c + k
/// Throws BoundsError on out-of-range indices.
std::size_t spectral_offset(const ExchangeGeometry& geom, SpectralTag tag, std::size_t j,
                            std::size_t r, std::size_t k);

/// Placement of the length-n0 column (j, k) for either tag.
TwoLevelStride column_descriptor(const ExchangeGeometry& geom, SpectralTag tag, std::size_t j,
                                 std::size_t k);

/// Column placement for StridedInplace slabs; ContractError for any other tag.
TwoLevelStride column_stride_descriptor(const ExchangeGeometry& geom, SpectralTag tag,
                                        std::size_t j, std::size_t k);

/// Rank-local real data, (n0/p) x n1 x n2.
struct RealSlab {
    SlabLayout layout;
    std::vector<double> data;

    explicit RealSlab(const SlabLayout& layout);

    double& at(std::size_t i, std::size_t j, std::size_t k);
    double at(std::size_t i, std::size_t j, std::size_t k) const;
};

/// Complex data after the plane transforms, still distributed along
/// axis 0: (n0/p) x n1 x n2c row-major.
struct PlaneSlab {
    ExchangeGeometry geom;
    std::vector<Complex> data;

    explicit PlaneSlab(const ExchangeGeometry& geom);
    PlaneSlab(const ExchangeGeometry& geom, std::vector<Complex> data);

    Complex& at(std::size_t i, std::size_t c, std::size_t k);
    const Complex& at(std::size_t i, std::size_t c, std::size_t k) const;
};

/// Complex data distributed along axis 1 with logical index (j, r, k),
/// j in [0, n1/p), r in [0, n0), k in [0, n2c).
struct SpectralSlab {
    ExchangeGeometry geom;
    SpectralTag tag = SpectralTag::ContiguousFlipped;
    std::vector<Complex> data;

    SpectralSlab(const ExchangeGeometry& geom, SpectralTag tag);
    SpectralSlab(const ExchangeGeometry& geom, SpectralTag tag, std::vector<Complex> data);

    std::size_t offset(std::size_t j, std::size_t r, std::size_t k) const
    {
        return spectral_offset(geom, tag, j, r, k);
    }
    Complex& at(std::size_t j, std::size_t r, std::size_t k) { return data[offset(j, r, k)]; }
    const Complex& at(std::size_t j, std::size_t r, std::size_t k) const
    {
        return data[offset(j, r, k)];
    }

    /// Logical view in (j, r, k) row-major order, independent of tag.
    std::vector<Complex> logical() const;
};

} // namespace tfft
