#include "rsdsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "rsdsim/benchkit.hpp"
#include "rsdsim/core/core.hpp"
#include "rsdsim/kanata.hpp"
#include "rsdsim/stats.hpp"

namespace rsdsim {

int exit_code_for(ErrKind kind) {
    switch (kind) {
    case ErrKind::ConfigError: return 2;
    case ErrKind::Divergence: return 11;
    case ErrKind::Deadlock: return 12;
    case ErrKind::CycleLimit: return 13;
    case ErrKind::TraceInvalid: return 14;
    case ErrKind::BenchMismatch: return 15;
    case ErrKind::MalformedImage: return 16;
    case ErrKind::IllegalInstruction:
    case ErrKind::MisalignedAccess:
    case ErrKind::OutOfImageAccess:
    case ErrKind::UnsupportedSyscall: return 17;
    case ErrKind::StaleCheckpoint:
    case ErrKind::Internal: return 70;
    }
    return 70;
}

const char* err_kind_name(ErrKind kind) {
    switch (kind) {
    case ErrKind::IllegalInstruction: return "illegal-instruction";
    case ErrKind::MisalignedAccess: return "misaligned-access";
    case ErrKind::OutOfImageAccess: return "out-of-image-access";
    case ErrKind::UnsupportedSyscall: return "unsupported-syscall";
    case ErrKind::MalformedImage: return "malformed-image";
    case ErrKind::ConfigError: return "config-error";
    case ErrKind::Divergence: return "divergence";
    case ErrKind::Deadlock: return "deadlock";
    case ErrKind::CycleLimit: return "cycle-limit";
    case ErrKind::TraceInvalid: return "trace-invalid";
    case ErrKind::BenchMismatch: return "benchmark-mismatch";
    case ErrKind::StaleCheckpoint: return "stale-checkpoint";
    case ErrKind::Internal: return "internal";
    }
    return "internal";
}

namespace {

struct RunTarget {
    std::string name;
    Program prog;
    const Benchmark* meta = nullptr; // null for external images
};

struct OneRun {
    std::string name;
    int code = 0;
    std::string error;
    bool have_stats = false;
    RunStats stats;
    uint32_t guest_exit = 0;
    std::string guest_output;
};

Program load_external(const RunRequest& rq) {
    std::ifstream f(rq.program_path, std::ios::binary);
    if (!f)
        throw SimError(ErrKind::MalformedImage,
                       "cannot open " + rq.program_path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    ImageFormat fmt;
    if (rq.format == "elf") {
        fmt = ImageFormat::Elf32;
    } else if (rq.format == "flat") {
        fmt = ImageFormat::FlatBinary;
    } else {
        bool elf = bytes.size() >= 4 && bytes[0] == 0x7f && bytes[1] == 'E' &&
                   bytes[2] == 'L' && bytes[3] == 'F';
        fmt = elf ? ImageFormat::Elf32 : ImageFormat::FlatBinary;
    }
    return load_program(bytes, fmt, rq.flat_base, rq.flat_entry);
}

OneRun run_one(const RunTarget& t, const CoreConfig& cfg,
               const RunRequest& rq) {
    OneRun r;
    r.name = t.name;
    try {
        RunOptions o;
        o.cosim = rq.cosim;
        o.check_invariants = rq.check_invariants;
        TraceWriter tw;
        if (!rq.trace_out.empty()) {
            tw.open(rq.trace_out);
            o.trace = &tw;
            o.trace_start = rq.trace_start;
            o.trace_end = rq.trace_end;
        }
        Core core(t.prog, cfg, o);
        RunResult res = core.run();
        r.stats = res.stats;
        r.stats.benchmark = t.name;
        r.have_stats = true;
        r.guest_exit = res.guest_exit;
        r.guest_output = res.guest_output;
        if (t.meta) {
            if (res.guest_exit != t.meta->expected_exit) {
                std::ostringstream os;
                os << t.name << ": guest exited with " << res.guest_exit
                   << ", expected " << t.meta->expected_exit;
                r.code = 10;
                r.error = os.str();
            } else if (t.meta->expected_result &&
                       !t.meta->expected_result(res.final_state)) {
                r.code = 15;
                r.error = t.name + ": expected-result predicate failed";
            }
        } else if (res.guest_exit != 0) {
            std::ostringstream os;
            os << t.name << ": guest exited with " << res.guest_exit;
            r.code = 10;
            r.error = os.str();
        }
    } catch (const SimError& e) {
        r.code = exit_code_for(e.kind());
        r.error = t.name + ": " + err_kind_name(e.kind()) + ": " + e.what();
    } catch (const std::exception& e) {
        r.code = 70;
        r.error = t.name + ": internal: " + e.what();
    }
    return r;
}

std::string summary_line(const OneRun& r) {
    std::ostringstream os;
    os << r.name << ": exit=" << r.guest_exit
       << " cycles=" << r.stats.cycles << " committed=" << r.stats.committed;
    char buf[96];
    std::snprintf(buf, sizeof buf, " ipc=%.3f", r.stats.ipc());
    os << buf;
    if (r.stats.committed > 0) {
        std::snprintf(buf, sizeof buf, " mpki=%.2f maki=%.2f",
                      mpki(r.stats.branch_mispredictions, r.stats.committed),
                      maki(r.stats.loads + r.stats.stores, r.stats.committed));
        os << buf;
    }
    return os.str();
}

} // namespace

int cmd_run(const RunRequest& rq, std::ostream& out, std::ostream& err) {
    try {
        if (rq.benches.empty() == rq.program_path.empty()) {
            throw SimError(ErrKind::ConfigError,
                           "exactly one program source required: --bench "
                           "or --program");
        }

        CoreConfig cfg;
        if (!rq.config_path.empty()) cfg = parse_config_file(rq.config_path);
        if (rq.max_cycles_override) cfg.max_cycles = rq.max_cycles_override;
        cfg.validate();

        // Resolve targets in canonical benchmark order.
        std::vector<Benchmark> metas;
        std::vector<RunTarget> targets;
        if (!rq.benches.empty()) {
            std::set<std::string> want;
            for (const std::string& n : rq.benches) {
                if (n == "all") {
                    for (const std::string& b : bench_list()) want.insert(b);
                } else {
                    (void)bench_get(n); // throws BenchMismatch on unknowns
                    want.insert(n);
                }
            }
            metas.reserve(want.size());
            for (const std::string& n : bench_list()) {
                if (!want.count(n)) continue;
                metas.push_back(bench_get(n));
            }
            for (const Benchmark& b : metas)
                targets.push_back({b.name, b.program, &b});
        } else {
            RunTarget t;
            t.name = std::filesystem::path(rq.program_path).stem().string();
            t.prog = load_external(rq);
            targets.push_back(std::move(t));
        }

        if (!rq.trace_out.empty() && targets.size() != 1)
            throw SimError(ErrKind::ConfigError,
                           "--trace-out requires a single benchmark or "
                           "program");

        // Fan out: one isolated core per target, merged by target order.
        std::vector<OneRun> results(targets.size());
        unsigned hw = std::thread::hardware_concurrency();
        unsigned workers = rq.threads ? rq.threads : (hw ? hw : 1);
        workers = std::min<unsigned>(workers, (unsigned)targets.size());
        if (workers <= 1) {
            for (size_t i = 0; i < targets.size(); ++i)
                results[i] = run_one(targets[i], cfg, rq);
        } else {
            std::atomic<size_t> next{0};
            auto pump = [&]() {
                for (size_t i = next.fetch_add(1); i < targets.size();
                     i = next.fetch_add(1))
                    results[i] = run_one(targets[i], cfg, rq);
            };
            std::vector<std::future<void>> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.push_back(std::async(std::launch::async, pump));
            for (auto& f : pool) f.get();
        }

        // Deterministic merge.
        int rc = 0;
        std::vector<RunStats> stats;
        for (const OneRun& r : results) {
            if (!r.guest_output.empty()) out << r.guest_output;
            if (r.have_stats) {
                out << summary_line(r) << "\n";
                stats.push_back(r.stats);
            }
            if (r.code != 0) {
                err << "error: " << r.error << "\n";
                if (rc == 0) rc = r.code;
            }
        }
        if (!rq.stats_out.empty()) write_stats_file(rq.stats_out, stats);
        return rc;
    } catch (const SimError& e) {
        err << "error: " << err_kind_name(e.kind()) << ": " << e.what()
            << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 70;
    }
}

int cmd_compare(const std::vector<std::string>& a_paths,
                const std::vector<std::string>& b_paths,
                const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    try {
        std::vector<StatsRecord> a, b;
        for (const std::string& p : a_paths)
            for (StatsRecord& r : read_stats_file(p)) a.push_back(std::move(r));
        for (const std::string& p : b_paths)
            for (StatsRecord& r : read_stats_file(p)) b.push_back(std::move(r));
        RatioReport rep = compare(a, b);
        std::string text = render_report(rep);
        if (!out_path.empty()) {
            std::ofstream f(out_path, std::ios::binary);
            if (!f)
                throw SimError(ErrKind::ConfigError,
                               "cannot write " + out_path);
            f << text;
        } else {
            out << text;
        }
        return 0;
    } catch (const SimError& e) {
        err << "error: " << err_kind_name(e.kind()) << ": " << e.what()
            << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 70;
    }
}

int cmd_bench_list(std::ostream& out) {
    for (const std::string& n : bench_list()) out << n << "\n";
    return 0;
}

int cmd_bench_export(const std::string& name, const std::string& out_path,
                     std::ostream& out, std::ostream& err) {
    try {
        FlatImage img = bench_export_flat(name);
        std::string path = out_path.empty() ? name + ".bin" : out_path;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw SimError(ErrKind::ConfigError, "cannot write " + path);
        f.write((const char*)img.bytes.data(), (std::streamsize)img.bytes.size());
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      " (%zu bytes, base 0x%08X, entry 0x%08X)\n",
                      img.bytes.size(), img.base, img.entry);
        out << "wrote " << path << buf;
        return 0;
    } catch (const SimError& e) {
        err << "error: " << err_kind_name(e.kind()) << ": " << e.what()
            << "\n";
        return exit_code_for(e.kind());
    }
}

int cmd_validate_trace(const std::string& path, std::ostream& out,
                       std::ostream& err) {
    TraceReport rep = validate_trace_file(path);
    if (rep.ok) {
        out << "ok: " << rep.instructions << " instructions, " << rep.commits
            << " commits, " << rep.flushes << " flushes\n";
        return 0;
    }
    if (rep.line_no)
        err << path << ":" << rep.line_no << ": " << rep.message << "\n";
    else
        err << path << ": " << rep.message << "\n";
    return 1;
}

namespace {

uint64_t parse_number(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos, 0);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SimError(ErrKind::ConfigError,
                       std::string("bad value for ") + what + ": " + s);
    }
}

uint32_t parse_addr(const std::string& s, const char* what) {
    uint64_t v = parse_number(s, what);
    if (v > 0xFFFFFFFFull)
        throw SimError(ErrKind::ConfigError,
                       std::string(what) + " does not fit in 32 bits: " + s);
    return (uint32_t)v;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"rsdsim: cycle-level model of an out-of-order RV32I core"};
    app.require_subcommand(1);

    RunRequest rq;
    std::string base_s, entry_s, trace_end_s, max_cycles_s;
    bool no_cosim = false, no_invariants = false;
    auto* run = app.add_subcommand("run", "Run embedded benchmarks or a program image");
    run->add_option("--bench", rq.benches,
                    "Embedded benchmark name, repeatable ('all' runs the suite)");
    run->add_option("--program", rq.program_path,
                    "External program image (elf32 or flat binary)");
    run->add_option("--format", rq.format, "Image format: auto, elf or flat")
        ->check(CLI::IsMember({"auto", "elf", "flat"}));
    run->add_option("--base", base_s, "Flat image load address (default 0x80000000)");
    run->add_option("--entry", entry_s, "Flat image entry point (default 0x80000000)");
    run->add_option("--config", rq.config_path, "Config file (section.key = value)");
    run->add_option("--stats-out", rq.stats_out, "Write NDJSON run statistics here");
    run->add_option("--trace-out", rq.trace_out, "Write a Kanata pipeline trace here");
    run->add_option("--trace-start", rq.trace_start,
                    "First cycle of the trace birth window");
    run->add_option("--trace-end", trace_end_s,
                    "End of the trace birth window (exclusive)");
    run->add_flag("--no-cosim", no_cosim, "Disable the lockstep functional oracle");
    run->add_flag("--no-invariants", no_invariants,
                  "Disable per-cycle structural invariant checks");
    run->add_option("--max-cycles", max_cycles_s, "Override the cycle budget");
    run->add_option("--threads", rq.threads,
                    "Worker threads for multi-benchmark runs (0 = auto)");

    std::string cmp_a1, cmp_b1, cmp_out;
    std::vector<std::string> cmp_a_extra, cmp_b_extra;
    auto* cmp = app.add_subcommand("compare",
                                   "Side-by-side ratio report of two stats sets");
    cmp->add_option("a", cmp_a1, "Baseline stats file (side A)")->required();
    cmp->add_option("b", cmp_b1, "Subject stats file (side B)")->required();
    cmp->add_option("--a-extra", cmp_a_extra, "Additional side-A stats files");
    cmp->add_option("--b-extra", cmp_b_extra, "Additional side-B stats files");
    cmp->add_option("--out", cmp_out, "Write the report here instead of stdout");

    auto* bench = app.add_subcommand("bench", "Embedded benchmark utilities");
    bench->require_subcommand(1);
    auto* bench_ls = bench->add_subcommand("list", "List embedded benchmarks");
    std::string exp_name, exp_out;
    auto* bench_exp =
        bench->add_subcommand("export", "Export a benchmark as a flat binary");
    bench_exp->add_option("name", exp_name, "Benchmark name")->required();
    bench_exp->add_option("--out", exp_out, "Output path (default <name>.bin)");

    std::string vt_path;
    auto* vt = app.add_subcommand("validate-trace", "Check a Kanata trace file");
    vt->add_option("path", vt_path, "Trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run)) {
            if (!base_s.empty()) rq.flat_base = parse_addr(base_s, "--base");
            if (!entry_s.empty()) rq.flat_entry = parse_addr(entry_s, "--entry");
            if (!trace_end_s.empty())
                rq.trace_end = parse_number(trace_end_s, "--trace-end");
            if (!max_cycles_s.empty())
                rq.max_cycles_override =
                    parse_number(max_cycles_s, "--max-cycles");
            rq.cosim = !no_cosim;
            rq.check_invariants = !no_invariants;
            return cmd_run(rq, std::cout, std::cerr);
        }
        if (app.got_subcommand(cmp)) {
            std::vector<std::string> a{cmp_a1}, b{cmp_b1};
            a.insert(a.end(), cmp_a_extra.begin(), cmp_a_extra.end());
            b.insert(b.end(), cmp_b_extra.begin(), cmp_b_extra.end());
            return cmd_compare(a, b, cmp_out, std::cout, std::cerr);
        }
        if (app.got_subcommand(bench)) {
            if (bench->got_subcommand(bench_ls)) return cmd_bench_list(std::cout);
            if (bench->got_subcommand(bench_exp))
                return cmd_bench_export(exp_name, exp_out, std::cout, std::cerr);
        }
        if (app.got_subcommand(vt))
            return cmd_validate_trace(vt_path, std::cout, std::cerr);
    } catch (const SimError& e) {
        std::cerr << "error: " << err_kind_name(e.kind()) << ": " << e.what()
                  << "\n";
        return exit_code_for(e.kind());
    }
    return 2;
}

} // namespace rsdsim
