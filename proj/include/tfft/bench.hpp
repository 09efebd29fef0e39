#pragma once

// Benchmark and verification harness behind the `tfft` command line tool.

#include "tfft/dfft.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfft::bench {

struct BenchConfig {
    GlobalGrid grid{16, 16, 16};
    std::size_t p = 1;
    Strategy strategy = Strategy::Strided;
    CommPattern pattern = CommPattern::Pairwise;
    FabricMode mode = FabricMode::Threaded;
    std::size_t iters = 1;
    std::size_t warmup = 0;
    std::uint64_t seed = 0;
};

/// One forward + inverse pair. Times are the slowest rank's, in
/// microseconds; byte counts are summed over ranks.
struct BenchRow {
    GlobalGrid grid;
    std::size_t p = 1;
    Strategy strategy = Strategy::Strided;
    CommPattern pattern = CommPattern::Pairwise;
    std::size_t iter = 0;
    double t_total_us = 0.0;
    double t_stage1_us = 0.0;
    double t_exchange_us = 0.0;
    double t_stage3_us = 0.0;
    std::uint64_t bytes_packed = 0;
    std::uint64_t bytes_wire = 0;
    std::uint64_t bytes_unpacked = 0;
};

std::string_view csv_header();
std::string to_csv(const BenchRow& row);
/// Throws std::invalid_argument on a malformed line.
BenchRow parse_csv_row(std::string_view line);

struct BenchResult {
    BenchConfig config;
    std::vector<BenchRow> rows;
    std::vector<Complex> spectrum;    // gathered forward output of the last iteration
    double roundtrip_rel_rms = 0.0;   // last iteration
    double max_c2r_residue = 0.0;
    bool passed = false;              // round trip within 1e-12 relative rms
};

/// Uniform [-1, 1) field, generated globally so it does not depend on p.
std::vector<double> random_field(const GlobalGrid& grid, std::uint64_t seed);

double median(std::vector<double> values);
double rel_rms(std::span<const double> got, std::span<const double> want);

BenchResult run_bench(const BenchConfig& config);

struct CompareResult {
    BenchResult transpose;
    BenchResult strided;
    double median_total_transpose_us = 0.0;
    double median_total_strided_us = 0.0;
    double median_exchange_transpose_us = 0.0;
    double median_exchange_strided_us = 0.0;
    /// (transpose - strided) / transpose * 100, on median totals.
    double percent_faster = 0.0;
    /// Exchange copy bytes, transpose over strided. Empty when the strided
    /// exchange moved nothing (p = 1).
    std::optional<double> copy_ratio;
    bool spectra_equal = false;

    bool passed() const { return spectra_equal && transpose.passed && strided.passed; }
};

/// Runs both strategies on identical input. `config.strategy` is ignored.
CompareResult run_compare(const BenchConfig& config);

struct VerifyConfig {
    std::size_t max_size = 8;
    std::vector<std::size_t> procs{1, 2, 4};
    std::vector<Strategy> strategies{Strategy::Transpose, Strategy::Strided};
    CommPattern pattern = CommPattern::Pairwise;
    FabricMode mode = FabricMode::Threaded;
    std::uint64_t seed = 1;
};

struct CheckResult {
    GlobalGrid grid;
    std::size_t p = 1;
    std::string strategy; // "transpose", "strided" or "both"
    std::string check;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Oracle, round-trip, strategy-equivalence and permutation-purity checks
/// over cubic grids 2^3 ... max_size^3 crossed with `procs`. Rank counts
/// that do not divide a smaller grid skip it. ConfigError if max_size is
/// not a power of two in [2, 32] or a rank count fails the largest grid.
std::vector<CheckResult> run_verify(const VerifyConfig& config);

} // namespace tfft::bench
