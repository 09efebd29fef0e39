#include "tfft/layout.hpp"

#include "tfft/errors.hpp"

#include <string>

namespace tfft {

namespace {

void check_axis(std::size_t n, const char* name)
{
    if (n < 2 || !is_power_of_two(n))
        throw ConfigError(std::string(name) + " = " + std::to_string(n) +
                          " is not a power of two >= 2");
}

void check_index(std::size_t value, std::size_t extent, const char* name)
{
    if (value >= extent)
        throw BoundsError(std::string(name) + " = " + std::to_string(value) +
                          " out of range [0, " + std::to_string(extent) + ")");
}

} // namespace

void validate(const GlobalGrid& grid, std::size_t p)
{
    if (p < 1) throw ConfigError("process count must be at least 1");
    check_axis(grid.n0, "n0");
    check_axis(grid.n1, "n1");
    check_axis(grid.n2, "n2");
    if (grid.n0 % p != 0)
        throw ConfigError("p does not divide n0 (p = " + std::to_string(p) +
                          ", n0 = " + std::to_string(grid.n0) + ")");
    if (grid.n1 % p != 0)
        throw ConfigError("p does not divide n1 (p = " + std::to_string(p) +
                          ", n1 = " + std::to_string(grid.n1) + ")");
}

SlabLayout SlabLayout::make(const GlobalGrid& grid, std::size_t p, std::size_t rank,
                            DistAxis axis)
{
    validate(grid, p);
    if (rank >= p)
        throw ConfigError("rank " + std::to_string(rank) + " outside [0, " +
                          std::to_string(p) + ")");
    return SlabLayout{grid, p, rank, axis};
}

OwnedRange owned_range(const SlabLayout& layout)
{
    const std::size_t extent =
        layout.axis == DistAxis::RealAxis0 ? layout.grid.n0 : layout.grid.n1;
    const std::size_t length = extent / layout.p;
    return {layout.rank * length, length};
}

ExchangeGeometry ExchangeGeometry::make(std::size_t n0, std::size_t n1, std::size_t n2c,
                                        std::size_t p, std::size_t rank)
{
    if (p < 1) throw ConfigError("process count must be at least 1");
    if (n0 == 0 || n1 == 0 || n2c == 0) throw ConfigError("empty exchange geometry");
    if (n0 % p != 0) throw ConfigError("p does not divide n0");
    if (n1 % p != 0) throw ConfigError("p does not divide n1");
    if (rank >= p) throw ConfigError("rank outside [0, p)");
    return ExchangeGeometry{n0, n1, n2c, p, rank};
}

ExchangeGeometry ExchangeGeometry::from(const SlabLayout& layout)
{
    return make(layout.grid.n0, layout.grid.n1, layout.grid.n2c(), layout.p, layout.rank);
}

const char* to_string(SpectralTag tag) noexcept
{
    return tag == SpectralTag::ContiguousFlipped ? "contiguous-flipped" : "strided-inplace";
}

std::size_t spectral_offset(const ExchangeGeometry& geom, SpectralTag tag, std::size_t j,
                            std::size_t r, std::size_t k)
{
    check_index(j, geom.local_n1(), "j");
    check_index(r, geom.n0, "r");
    check_index(k, geom.n2c, "k");
    if (tag == SpectralTag::ContiguousFlipped) return (j * geom.n0 + r) * geom.n2c + k;
    const std::size_t ln0 = geom.local_n0();
    return (r % ln0) * (geom.n1 * geom.n2c) + (r / ln0) * (geom.local_n1() * geom.n2c) +
           j * geom.n2c + k;
}

TwoLevelStride column_descriptor(const ExchangeGeometry& geom, SpectralTag tag, std::size_t j,
                                 std::size_t k)
{
    check_index(j, geom.local_n1(), "j");
    check_index(k, geom.n2c, "k");
    if (tag == SpectralTag::ContiguousFlipped)
        return TwoLevelStride::simple(geom.n0, static_cast<std::ptrdiff_t>(geom.n2c),
                                      static_cast<std::ptrdiff_t>(j * geom.n0 * geom.n2c + k));
    return TwoLevelStride{
        geom.local_n0(),
        static_cast<std::ptrdiff_t>(geom.n1 * geom.n2c),
        geom.p,
        static_cast<std::ptrdiff_t>(geom.local_n1() * geom.n2c),
        static_cast<std::ptrdiff_t>(j * geom.n2c + k),
    };
}

TwoLevelStride column_stride_descriptor(const ExchangeGeometry& geom, SpectralTag tag,
                                        std::size_t j, std::size_t k)
{
    if (tag != SpectralTag::StridedInplace)
        throw ContractError("column_stride_descriptor requires a strided-inplace slab");
    return column_descriptor(geom, tag, j, k);
}

RealSlab::RealSlab(const SlabLayout& layout_)
    : layout(layout_),
      data(layout_.grid.n0 / layout_.p * layout_.grid.n1 * layout_.grid.n2)
{
    if (layout.axis != DistAxis::RealAxis0)
        throw ContractError("real slabs are distributed along axis 0");
}

double& RealSlab::at(std::size_t i, std::size_t j, std::size_t k)
{
    return data[(i * layout.grid.n1 + j) * layout.grid.n2 + k];
}

double RealSlab::at(std::size_t i, std::size_t j, std::size_t k) const
{
    return data[(i * layout.grid.n1 + j) * layout.grid.n2 + k];
}

PlaneSlab::PlaneSlab(const ExchangeGeometry& geom_) : geom(geom_), data(geom_.local_size()) {}

PlaneSlab::PlaneSlab(const ExchangeGeometry& geom_, std::vector<Complex> data_)
    : geom(geom_), data(std::move(data_))
{
    if (data.size() != geom.local_size())
        throw ContractError("plane slab buffer has " + std::to_string(data.size()) +
                            " elements, expected " + std::to_string(geom.local_size()));
}

Complex& PlaneSlab::at(std::size_t i, std::size_t c, std::size_t k)
{
    return data[(i * geom.n1 + c) * geom.n2c + k];
}

const Complex& PlaneSlab::at(std::size_t i, std::size_t c, std::size_t k) const
{
    return data[(i * geom.n1 + c) * geom.n2c + k];
}

SpectralSlab::SpectralSlab(const ExchangeGeometry& geom_, SpectralTag tag_)
    : geom(geom_), tag(tag_), data(geom_.local_size())
{
}

SpectralSlab::SpectralSlab(const ExchangeGeometry& geom_, SpectralTag tag_,
                           std::vector<Complex> data_)
    : geom(geom_), tag(tag_), data(std::move(data_))
{
    if (data.size() != geom.local_size())
        throw ContractError("spectral slab buffer has " + std::to_string(data.size()) +
                            " elements, expected " + std::to_string(geom.local_size()));
}

std::vector<Complex> SpectralSlab::logical() const
{
    std::vector<Complex> out;
    out.reserve(data.size());
    for (std::size_t j = 0; j < geom.local_n1(); ++j)
        for (std::size_t r = 0; r < geom.n0; ++r)
            for (std::size_t k = 0; k < geom.n2c; ++k) out.push_back(at(j, r, k));
    return out;
}

} // namespace tfft
