// tfft: verification suites and exchange-strategy benchmarks for the
// slab-decomposed distributed FFT.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage or
// configuration error.

#include "tfft/bench.hpp"
#include "tfft/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::vector<std::size_t> size{64, 64, 64};
    std::vector<std::size_t> procs{1, 2, 4};
    std::string strategy = "both";
    tfft::CommPattern comm = tfft::CommPattern::Pairwise;
    tfft::FabricMode mode = tfft::FabricMode::Threaded;
    std::size_t iters = 5;
    std::size_t warmup = 1;
    std::size_t max_size = 8;
    std::string output;
    std::uint64_t seed = 1;
};

std::vector<tfft::Strategy> strategies(const std::string& name)
{
    if (name == "strided") return {tfft::Strategy::Strided};
    if (name == "transpose") return {tfft::Strategy::Transpose};
    return {tfft::Strategy::Transpose, tfft::Strategy::Strided};
}

tfft::GlobalGrid grid_of(const Options& o) { return {o.size[0], o.size[1], o.size[2]}; }

std::string grid_str(const tfft::GlobalGrid& g)
{
    return std::to_string(g.n0) + "x" + std::to_string(g.n1) + "x" + std::to_string(g.n2);
}

int cmd_verify(const Options& o)
{
    tfft::bench::VerifyConfig cfg;
    cfg.max_size = o.max_size;
    cfg.procs = o.procs;
    cfg.strategies = strategies(o.strategy);
    cfg.pattern = o.comm;
    cfg.mode = o.mode;
    cfg.seed = o.seed;
    const auto checks = tfft::bench::run_verify(cfg);

    std::size_t failed = 0;
    for (const auto& c : checks) {
        std::printf("%s grid=%s p=%zu strategy=%s check=%s max_error=%.3e tol=%.1e\n",
                    c.passed ? "PASS" : "FAIL", grid_str(c.grid).c_str(), c.p, c.strategy.c_str(),
                    c.check.c_str(), c.max_error, c.tolerance);
        failed += c.passed ? 0 : 1;
    }
    std::printf("%zu checks, %zu failed\n", checks.size(), failed);
    return failed == 0 ? kExitPass : kExitCheckFailed;
}

int cmd_bench(const Options& o)
{
    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw std::runtime_error("cannot open output file '" + o.output + "'");
    }
    std::ostream& csv = o.output.empty() ? std::cout : file;
    // Keep stdout machine-readable when the CSV goes there.
    std::FILE* summary = o.output.empty() ? stderr : stdout;

    csv << tfft::bench::csv_header() << '\n';
    bool ok = true;
    for (const auto p : o.procs) {
        tfft::bench::BenchConfig cfg{grid_of(o), p, tfft::Strategy::Strided, o.comm, o.mode,
                                     o.iters, o.warmup, o.seed};
        std::map<tfft::Strategy, tfft::bench::BenchResult> results;
        for (const auto s : strategies(o.strategy)) {
            cfg.strategy = s;
            auto res = tfft::bench::run_bench(cfg);
            for (const auto& row : res.rows) csv << tfft::bench::to_csv(row) << '\n';

            std::vector<double> totals, exchanges;
            for (const auto& row : res.rows) {
                totals.push_back(row.t_total_us);
                exchanges.push_back(row.t_exchange_us);
            }
            std::fprintf(summary,
                         "%s p=%zu %-9s median total %.1f us, median exchange %.1f us, "
                         "roundtrip rel rms %.2e %s\n",
                         grid_str(cfg.grid).c_str(), p, tfft::to_string(s),
                         tfft::bench::median(totals), tfft::bench::median(exchanges),
                         res.roundtrip_rel_rms, res.passed ? "ok" : "FAILED");
            ok = ok && res.passed;
            results.emplace(s, std::move(res));
        }
        if (results.size() == 2) {
            const auto& t = results.at(tfft::Strategy::Transpose);
            const auto& s = results.at(tfft::Strategy::Strided);
            const auto& tr = t.rows.back();
            const auto& sr = s.rows.back();
            const auto tb = tr.bytes_packed + tr.bytes_wire + tr.bytes_unpacked;
            const auto sb = sr.bytes_packed + sr.bytes_wire + sr.bytes_unpacked;
            if (sb > 0)
                std::fprintf(summary, "%s p=%zu copy-byte ratio transpose/strided = %.3f\n",
                             grid_str(cfg.grid).c_str(), p,
                             static_cast<double>(tb) / static_cast<double>(sb));
            const bool same = t.spectrum == s.spectrum;
            if (!same) std::fprintf(summary, "spectra of the two strategies differ\n");
            ok = ok && same;
        }
    }
    csv.flush();
    return ok ? kExitPass : kExitCheckFailed;
}

int cmd_compare(const Options& o)
{
    bool ok = true;
    std::printf("%-14s %4s %14s %14s %14s %14s %9s %11s %6s\n", "grid", "p", "transpose_us",
                "strided_us", "xchg_T_us", "xchg_S_us", "faster_%", "copy_ratio", "check");
    for (const auto p : o.procs) {
        tfft::bench::BenchConfig cfg{grid_of(o), p, tfft::Strategy::Strided, o.comm, o.mode,
                                     o.iters, o.warmup, o.seed};
        const auto r = tfft::bench::run_compare(cfg);
        const std::string ratio = r.copy_ratio ? std::to_string(*r.copy_ratio) : "n/a";
        std::printf("%-14s %4zu %14.1f %14.1f %14.1f %14.1f %9.2f %11s %6s\n",
                    grid_str(cfg.grid).c_str(), p, r.median_total_transpose_us,
                    r.median_total_strided_us, r.median_exchange_transpose_us,
                    r.median_exchange_strided_us, r.percent_faster, ratio.c_str(),
                    r.passed() ? "ok" : "FAIL");
        ok = ok && r.passed();
    }
    std::printf("wall-clock differences are informational; copy_ratio counts pack+wire+unpack "
                "bytes\n");
    return ok ? kExitPass : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Slab-decomposed distributed FFT: verification and exchange benchmarks"};
    app.require_subcommand(1);
    Options o;

    const std::map<std::string, tfft::CommPattern> comm_map{
        {"pairwise", tfft::CommPattern::Pairwise}, {"collective", tfft::CommPattern::Collective}};
    const std::map<std::string, tfft::FabricMode> mode_map{
        {"threaded", tfft::FabricMode::Threaded}, {"serial", tfft::FabricMode::Serial}};

    auto common = [&](CLI::App* sub) {
        sub->add_option("--procs", o.procs, "Comma-separated rank counts")->delimiter(',');
        sub->add_option("--comm", o.comm, "pairwise|collective")
            ->transform(CLI::CheckedTransformer(comm_map, CLI::ignore_case));
        sub->add_option("--mode", o.mode, "threaded|serial")
            ->transform(CLI::CheckedTransformer(mode_map, CLI::ignore_case));
        sub->add_option("--seed", o.seed, "Input generation seed");
    };
    auto timing = [&](CLI::App* sub) {
        sub->add_option("--size", o.size, "Grid as n0,n1,n2")->delimiter(',')->expected(3);
        sub->add_option("--iters", o.iters, "Timed iterations")->check(CLI::PositiveNumber);
        sub->add_option("--warmup", o.warmup, "Untimed iterations");
    };

    auto* verify = app.add_subcommand("verify", "Run oracle and exchange checks");
    verify->add_option("--max-size", o.max_size, "Largest cubic grid edge (<= 32)");
    verify->add_option("--strategy", o.strategy, "strided|transpose|both")
        ->check(CLI::IsMember({"strided", "transpose", "both"}));
    common(verify);

    auto* bench = app.add_subcommand("bench", "Time forward+inverse pairs, emit CSV");
    bench->add_option("--strategy", o.strategy, "strided|transpose|both")
        ->check(CLI::IsMember({"strided", "transpose", "both"}));
    bench->add_option("--output", o.output, "CSV output path (default stdout)");
    common(bench);
    timing(bench);

    auto* compare = app.add_subcommand("compare", "Run both strategies side by side");
    common(compare);
    timing(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*verify) return cmd_verify(o);
        if (*bench) return cmd_bench(o);
        if (*compare) return cmd_compare(o);
    } catch (const tfft::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitUsage;
    } catch (const tfft::Error& e) {
        std::fprintf(stderr, "check failed: %s\n", e.what());
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
