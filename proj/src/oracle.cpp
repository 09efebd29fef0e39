#include "tfft/oracle.hpp"

#include "tfft/errors.hpp"

#include <cmath>
#include <numbers>

namespace tfft::oracle {

namespace {

// exp(sign * 2 pi i * num / den) with num reduced modulo den first, so the
// angle stays small and accurate.
Complex root(std::size_t num, std::size_t den, double sign)
{
    const double angle =
        sign * 2.0 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

} // namespace

std::vector<Complex> dft1d_naive(std::span<const Complex> x, Direction dir)
{
    const std::size_t n = x.size();
    const double sign = dir == Direction::Forward ? -1.0 : 1.0;
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex sum{};
        for (std::size_t j = 0; j < n; ++j) sum += x[j] * root(j * k, n, sign);
        out[k] = sum;
    }
    return out;
}

std::vector<Complex> dft3d_r2c_naive(std::span<const double> field, const GlobalGrid& grid)
{
    const std::size_t n0 = grid.n0, n1 = grid.n1, n2 = grid.n2, n2c = grid.n2c();
    if (field.size() != grid.real_size()) throw SizeError("field size does not match grid");

    // A single common denominator keeps each phase an exact integer ratio.
    const std::size_t total = n0 * n1 * n2;
    std::vector<Complex> roots(total);
    for (std::size_t m = 0; m < total; ++m) roots[m] = root(m, total, -1.0);

    std::vector<Complex> out(n0 * n1 * n2c);
    for (std::size_t a = 0; a < n0; ++a)
        for (std::size_t b = 0; b < n1; ++b)
            for (std::size_t c = 0; c < n2c; ++c) {
                Complex sum{};
                for (std::size_t i = 0; i < n0; ++i)
                    for (std::size_t j = 0; j < n1; ++j)
                        for (std::size_t k = 0; k < n2; ++k) {
                            const std::size_t phase =
                                (a * i % n0) * (n1 * n2) + (b * j % n1) * (n0 * n2) +
                                (c * k % n2) * (n0 * n1);
                            sum += field[(i * n1 + j) * n2 + k] * roots[phase % total];
                        }
                out[(a * n1 + b) * n2c + c] = sum;
            }
    return out;
}

std::vector<std::vector<Complex>> global_exchange_reference(std::span<const Complex> global,
                                                            std::size_t n0, std::size_t n1,
                                                            std::size_t n2c, std::size_t p)
{
    if (p == 0 || n0 % p != 0 || n1 % p != 0) throw ConfigError("p must divide n0 and n1");
    if (global.size() != n0 * n1 * n2c) throw SizeError("array size does not match shape");
    const std::size_t ln1 = n1 / p;
    std::vector<std::vector<Complex>> views(p, std::vector<Complex>(ln1 * n0 * n2c));
    for (std::size_t q = 0; q < p; ++q)
        for (std::size_t j = 0; j < ln1; ++j)
            for (std::size_t r = 0; r < n0; ++r)
                for (std::size_t k = 0; k < n2c; ++k)
                    views[q][(j * n0 + r) * n2c + k] = global[(r * n1 + q * ln1 + j) * n2c + k];
    return views;
}

} // namespace tfft::oracle
