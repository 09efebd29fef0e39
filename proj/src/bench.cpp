#include "tfft/bench.hpp"

#include "tfft/errors.hpp"
#include "tfft/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tfft::bench {

namespace {

constexpr std::string_view kHeader =
    "grid_n0,grid_n1,grid_n2,p,strategy,comm_pattern,iter,t_total_us,t_stage1_us,"
    "t_exchange_us,t_stage3_us,bytes_packed,bytes_wire,bytes_unpacked";

template <typename T>
T parse_number(std::string_view field)
{
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("bad numeric CSV field '" + std::string(field) + "'");
    return value;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool bitwise_equal(std::span<const Complex> a, std::span<const Complex> b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](Complex x, Complex y) {
               return x.real() == y.real() && x.imag() == y.imag();
           });
}

bool by_value(Complex a, Complex b)
{
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

} // namespace

std::string_view csv_header() { return kHeader; }

static std::string shortest(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string to_csv(const BenchRow& row)
{
    std::ostringstream os;
    os << row.grid.n0 << ',' << row.grid.n1 << ',' << row.grid.n2 << ',' << row.p << ','
       << to_string(row.strategy) << ',' << to_string(row.pattern) << ',' << row.iter << ','
       << shortest(row.t_total_us) << ',' << shortest(row.t_stage1_us) << ','
       << shortest(row.t_exchange_us) << ',' << shortest(row.t_stage3_us) << ',' << row.bytes_packed << ',' << row.bytes_wire << ','
       << row.bytes_unpacked;
    return os.str();
}

BenchRow parse_csv_row(std::string_view line)
{
    std::vector<std::string_view> fields;
    while (true) {
        const auto comma = line.find(',');
        fields.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    if (fields.size() != 14)
        throw std::invalid_argument("expected 14 CSV fields, got " + std::to_string(fields.size()));

    BenchRow row;
    row.grid = {parse_number<std::size_t>(fields[0]), parse_number<std::size_t>(fields[1]),
                parse_number<std::size_t>(fields[2])};
    row.p = parse_number<std::size_t>(fields[3]);
    if (fields[4] == "strided")
        row.strategy = Strategy::Strided;
    else if (fields[4] == "transpose")
        row.strategy = Strategy::Transpose;
    else
        throw std::invalid_argument("unknown strategy '" + std::string(fields[4]) + "'");
    if (fields[5] == "pairwise")
        row.pattern = CommPattern::Pairwise;
    else if (fields[5] == "collective")
        row.pattern = CommPattern::Collective;
    else
        throw std::invalid_argument("unknown comm pattern '" + std::string(fields[5]) + "'");
    row.iter = parse_number<std::size_t>(fields[6]);
    row.t_total_us = parse_number<double>(fields[7]);
    row.t_stage1_us = parse_number<double>(fields[8]);
    row.t_exchange_us = parse_number<double>(fields[9]);
    row.t_stage3_us = parse_number<double>(fields[10]);
    row.bytes_packed = parse_number<std::uint64_t>(fields[11]);
    row.bytes_wire = parse_number<std::uint64_t>(fields[12]);
    row.bytes_unpacked = parse_number<std::uint64_t>(fields[13]);
    return row;
}

std::vector<double> random_field(const GlobalGrid& grid, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> field(grid.real_size());
    for (auto& x : field) x = dist(rng);
    return field;
}

double median(std::vector<double> values)
{
    if (values.empty()) return 0.0;
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double rel_rms(std::span<const double> got, std::span<const double> want)
{
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        err += (got[i] - want[i]) * (got[i] - want[i]);
        ref += want[i] * want[i];
    }
    return ref == 0.0 ? std::sqrt(err) : std::sqrt(err / ref);
}

BenchResult run_bench(const BenchConfig& config)
{
    validate(config.grid, config.p);
    if (config.iters < 1) throw ConfigError("--iters must be at least 1");

    const std::size_t p = config.p;
    const std::size_t total_iters = config.warmup + config.iters;
    const auto field = random_field(config.grid, config.seed);
    auto inputs = scatter_real(field, config.grid, p);

    struct Sample {
        StageTimes times;
        CopyCounter copies;
    };
    std::vector<std::vector<Sample>> samples(p, std::vector<Sample>(config.iters));
    std::vector<SpectralSlab> final_spectra;
    std::vector<RealSlab> outputs;
    std::vector<double> residues(p, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        final_spectra.emplace_back(ExchangeGeometry::from(inputs[r].layout),
                                   spectral_tag_for(config.strategy));
        outputs.emplace_back(inputs[r].layout);
    }

    Fabric fabric(p, FabricOptions{config.mode});
    fabric.run([&](Communicator& comm) {
        const auto r = comm.rank();
        FftPlan plan(config.grid, p, r, config.strategy, config.pattern);
        auto spec = plan.make_spectral();
        for (std::size_t it = 0; it < total_iters; ++it) {
            comm.barrier(comm.next_tag());
            plan.reset_stats();
            plan.forward(inputs[r], spec, comm);
            if (it + 1 == total_iters) final_spectra[r].data = spec.data;
            plan.inverse_inplace(spec, outputs[r], comm);
            if (it >= config.warmup) {
                samples[r][it - config.warmup] = {plan.stats().times, plan.stats().copies};
                residues[r] = std::max(residues[r], plan.stats().max_c2r_residue);
            }
        }
    });

    BenchResult result;
    result.config = config;
    for (std::size_t it = 0; it < config.iters; ++it) {
        BenchRow row;
        row.grid = config.grid;
        row.p = p;
        row.strategy = config.strategy;
        row.pattern = config.pattern;
        row.iter = it;
        CopyCounter copies;
        for (std::size_t r = 0; r < p; ++r) {
            const auto& s = samples[r][it];
            row.t_total_us = std::max(row.t_total_us, s.times.total_us);
            row.t_stage1_us = std::max(row.t_stage1_us, s.times.stage1_us);
            row.t_exchange_us = std::max(row.t_exchange_us, s.times.exchange_us);
            row.t_stage3_us = std::max(row.t_stage3_us, s.times.stage3_us);
            copies += s.copies;
        }
        row.bytes_packed = copies.bytes_packed;
        row.bytes_wire = copies.bytes_wire;
        row.bytes_unpacked = copies.bytes_unpacked;
        result.rows.push_back(row);
    }
    result.spectrum = gather_spectral(final_spectra);
    result.roundtrip_rel_rms = rel_rms(gather_real(outputs), field);
    result.max_c2r_residue = *std::max_element(residues.begin(), residues.end());
    result.passed = result.roundtrip_rel_rms <= 1e-12;
    return result;
}

CompareResult run_compare(const BenchConfig& config)
{
    auto cfg = config;
    CompareResult out;
    cfg.strategy = Strategy::Transpose;
    out.transpose = run_bench(cfg);
    cfg.strategy = Strategy::Strided;
    out.strided = run_bench(cfg);

    auto column = [](const BenchResult& b, double BenchRow::*field) {
        std::vector<double> v;
        for (const auto& row : b.rows) v.push_back(row.*field);
        return median(std::move(v));
    };
    out.median_total_transpose_us = column(out.transpose, &BenchRow::t_total_us);
    out.median_total_strided_us = column(out.strided, &BenchRow::t_total_us);
    out.median_exchange_transpose_us = column(out.transpose, &BenchRow::t_exchange_us);
    out.median_exchange_strided_us = column(out.strided, &BenchRow::t_exchange_us);
    if (out.median_total_transpose_us > 0.0)
        out.percent_faster = (out.median_total_transpose_us - out.median_total_strided_us) /
                             out.median_total_transpose_us * 100.0;

    const auto& t = out.transpose.rows.back();
    const auto& s = out.strided.rows.back();
    const auto t_bytes = t.bytes_packed + t.bytes_wire + t.bytes_unpacked;
    const auto s_bytes = s.bytes_packed + s.bytes_wire + s.bytes_unpacked;
    if (s_bytes > 0) out.copy_ratio = static_cast<double>(t_bytes) / static_cast<double>(s_bytes);
    out.spectra_equal = bitwise_equal(out.transpose.spectrum, out.strided.spectrum);
    return out;
}

std::vector<CheckResult> run_verify(const VerifyConfig& config)
{
    if (config.max_size < 2 || config.max_size > 32 || !is_power_of_two(config.max_size))
        throw ConfigError("--max-size must be a power of two in [2, 32]");
    if (config.procs.empty()) throw ConfigError("no process counts given");
    const GlobalGrid largest{config.max_size, config.max_size, config.max_size};
    for (const auto p : config.procs) validate(largest, p);

    const FabricOptions fabric{config.mode};
    std::vector<CheckResult> checks;
    for (std::size_t n = 2; n <= config.max_size; n *= 2) {
        const GlobalGrid grid{n, n, n};
        const auto field = random_field(grid, config.seed + n);
        const auto reference = oracle::dft3d_r2c_naive(field, grid);

        for (const auto p : config.procs) {
            if (n % p != 0) continue;
            std::vector<std::vector<Complex>> spectra;
            for (const auto strategy : config.strategies) {
                const auto res = run_distributed(field, grid, p, strategy, config.pattern, fabric);
                const double oracle_err = max_abs_diff(res.spectrum, reference);
                checks.push_back({grid, p, to_string(strategy), "oracle", oracle_err, 1e-10,
                                  oracle_err <= 1e-10});
                const double rt = rel_rms(res.roundtrip, field);
                checks.push_back({grid, p, to_string(strategy), "roundtrip", rt, 1e-12, rt <= 1e-12});
                spectra.push_back(res.spectrum);
            }
            if (spectra.size() >= 2) {
                double diff = 0.0;
                bool same = true;
                for (std::size_t s = 1; s < spectra.size(); ++s) {
                    diff = std::max(diff, max_abs_diff(spectra[0], spectra[s]));
                    same = same && bitwise_equal(spectra[0], spectra[s]);
                }
                checks.push_back({grid, p, "both", "strategy_equivalence", diff, 0.0, same});
            }

            // Exchange alone on the reference spectrum: must be a pure permutation
            // matching the global index arithmetic.
            const auto planes = scatter_planes(reference, n, n, grid.n2c(), p);
            const auto expected = oracle::global_exchange_reference(reference, n, n, grid.n2c(), p);
            for (const auto strategy : config.strategies) {
                std::vector<std::vector<Complex>> views(p);
                std::vector<std::vector<Complex>> restored(p);
                Fabric fab(p, fabric);
                fab.run([&](Communicator& comm) {
                    const auto r = comm.rank();
                    if (strategy == Strategy::Strided) {
                        auto spec = exchange_strided_forward(planes[r], comm, config.pattern);
                        views[r] = spec.logical();
                        restored[r] = exchange_strided_inverse(std::move(spec), comm, config.pattern).data;
                    } else {
                        auto spec = exchange_transpose_forward(planes[r], comm, config.pattern);
                        views[r] = spec.logical();
                        restored[r] = exchange_transpose_inverse(spec, comm, config.pattern).data;
                    }
                });
                std::vector<Complex> before = reference, after;
                for (const auto& v : views) after.insert(after.end(), v.begin(), v.end());
                std::sort(before.begin(), before.end(), by_value);
                std::sort(after.begin(), after.end(), by_value);
                bool ok = bitwise_equal(before, after);
                double err = 0.0;
                for (std::size_t r = 0; r < p; ++r) {
                    ok = ok && bitwise_equal(views[r], expected[r]) &&
                         bitwise_equal(restored[r], planes[r].data);
                    err = std::max(err, max_abs_diff(views[r], expected[r]));
                }
                checks.push_back({grid, p, to_string(strategy), "permutation_purity", err, 0.0, ok});
            }
        }
    }
    return checks;
}

} // namespace tfft::bench
