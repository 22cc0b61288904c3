#include "rsdsim/stats.hpp"
#include "rsdsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace rsdsim {

using ordered_json = nlohmann::ordered_json;

double mpki(uint64_t mispredictions, uint64_t committed) {
    if (committed == 0)
        throw SimError(ErrKind::ConfigError, "mpki: zero committed instructions");
    return (double)mispredictions / ((double)committed / 1000.0);
}

double maki(uint64_t memory_accesses, uint64_t committed) {
    if (committed == 0)
        throw SimError(ErrKind::ConfigError, "maki: zero committed instructions");
    return (double)memory_accesses / ((double)committed / 1000.0);
}

Means means(const std::vector<double>& values) {
    if (values.empty())
        throw SimError(ErrKind::ConfigError, "means: empty input");
    double sum = 0, log_sum = 0, inv_sum = 0;
    for (double v : values) {
        if (!(v > 0))
            throw SimError(ErrKind::ConfigError, "means: non-positive value");
        sum += v;
        log_sum += std::log(v);
        inv_sum += 1.0 / v;
    }
    double n = (double)values.size();
    return {sum / n, std::exp(log_sum / n), n / inv_sum};
}

RatioReport compare(const std::vector<StatsRecord>& a,
                    const std::vector<StatsRecord>& b) {
    std::map<std::string, const StatsRecord*> bm_a, bm_b;
    for (auto& r : a) bm_a[r.s.benchmark] = &r;
    for (auto& r : b) bm_b[r.s.benchmark] = &r;

    std::string missing;
    for (auto& [name, _] : bm_a)
        if (!bm_b.count(name)) missing += " " + name + "(side B)";
    for (auto& [name, _] : bm_b)
        if (!bm_a.count(name)) missing += " " + name + "(side A)";
    if (!missing.empty())
        throw SimError(ErrKind::BenchMismatch, "benchmark sets differ:" + missing);
    if (bm_a.empty())
        throw SimError(ErrKind::BenchMismatch, "no benchmarks to compare");

    RatioReport rep;
    std::vector<double> cycle_ratios, inst_ratios;
    for (auto& [name, ra] : bm_a) {
        const StatsRecord* rb = bm_b.at(name);
        if (ra->s.cycles == 0 || rb->s.cycles == 0 ||
            ra->s.committed == 0 || rb->s.committed == 0)
            throw SimError(ErrKind::ConfigError,
                           "compare: zero cycles/instructions for " + name);
        RatioRow row;
        row.benchmark = name;
        row.cycle_ratio = (double)ra->s.cycles / (double)rb->s.cycles;
        row.instruction_ratio =
            (double)ra->s.committed / (double)rb->s.committed;
        if (ra->has_wall_clock && rb->has_wall_clock &&
            ra->s.wall_clock_seconds > 0 && rb->s.wall_clock_seconds > 0)
            row.speedup = rb->s.wall_clock_seconds / ra->s.wall_clock_seconds;
        if (ra->has_branch_fields)
            row.mpki_a = mpki(ra->s.branch_mispredictions, ra->s.committed);
        if (rb->has_branch_fields)
            row.mpki_b = mpki(rb->s.branch_mispredictions, rb->s.committed);
        if (ra->has_memory_fields)
            row.maki_a = maki(ra->s.loads + ra->s.stores, ra->s.committed);
        if (rb->has_memory_fields)
            row.maki_b = maki(rb->s.loads + rb->s.stores, rb->s.committed);
        cycle_ratios.push_back(row.cycle_ratio);
        inst_ratios.push_back(row.instruction_ratio);
        rep.rows.push_back(std::move(row));
    }
    rep.cycle_means = means(cycle_ratios);
    rep.instruction_means = means(inst_ratios);
    return rep;
}

namespace {

std::string fmt_f(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_f(*v) : "n/a";
}

std::string fmt_divergence(double ratio) {
    double pct = (ratio - 1.0) * 100.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.0f%%", pct);
    return buf;
}

void put(std::string& out, const std::string& cell, size_t width) {
    out += cell;
    if (cell.size() < width) out.append(width - cell.size(), ' ');
    out += "  ";
}

} // namespace

std::string render_report(const RatioReport& rep) {
    static const char* hdr[] = {"benchmark",  "cycle-ratio", "divergence",
                                "inst-ratio", "speedup",     "mpki-a",
                                "mpki-b",     "maki-a",      "maki-b"};
    std::vector<std::vector<std::string>> rows;
    for (auto& r : rep.rows)
        rows.push_back({r.benchmark, fmt_f(r.cycle_ratio),
                        fmt_divergence(r.cycle_ratio), fmt_f(r.instruction_ratio),
                        fmt_opt(r.speedup), fmt_opt(r.mpki_a), fmt_opt(r.mpki_b),
                        fmt_opt(r.maki_a), fmt_opt(r.maki_b)});

    std::vector<size_t> w(9);
    for (size_t c = 0; c < 9; c++) w[c] = std::strlen(hdr[c]);
    for (auto& r : rows)
        for (size_t c = 0; c < 9; c++) w[c] = std::max(w[c], r[c].size());

    std::string out;
    out += "ratio report (A/B per benchmark; ideal ratio = 1.0)\n";
    std::string head;
    for (size_t c = 0; c < 9; c++) put(head, hdr[c], w[c]);
    out += head + "\n";
    out += std::string(head.size(), '-') + "\n";
    for (auto& r : rows) {
        std::string ln;
        for (size_t c = 0; c < 9; c++) put(ln, r[c], w[c]);
        out += ln + "\n";
    }
    auto mean_line = [&](const char* what, const Means& m) {
        return std::string(what) + ": arithmetic " + fmt_f(m.arithmetic) +
               "  geometric " + fmt_f(m.geometric) + "  harmonic " +
               fmt_f(m.harmonic) + "\n";
    };
    out += mean_line("cycle-ratio means", rep.cycle_means);
    out += mean_line("instruction-ratio means", rep.instruction_means);
    return out;
}

std::string stats_to_json_line(const RunStats& s) {
    ordered_json j;
    j["benchmark"] = s.benchmark;
    j["config-fingerprint"] = s.config_fingerprint;
    j["cycles"] = s.cycles;
    j["committed-instructions"] = s.committed;
    j["branch-predictions"] = s.branch_predictions;
    j["branch-mispredictions"] = s.branch_mispredictions;
    j["icache-accesses"] = s.icache_accesses;
    j["icache-misses"] = s.icache_misses;
    j["dcache-accesses"] = s.dcache_accesses;
    j["dcache-misses"] = s.dcache_misses;
    j["mshr-allocations"] = s.mshr_allocations;
    j["mshr-merges"] = s.mshr_merges;
    j["mshr-structural-stalls"] = s.mshr_structural_stalls;
    j["loads"] = s.loads;
    j["stores"] = s.stores;
    j["pipeline-flushes-mispredict"] = s.flushes_mispredict;
    j["pipeline-flushes-memory-violation"] = s.flushes_memory_violation;
    j["squashed-instructions"] = s.squashed_instructions;
    j["squashed-branch-predictions"] = s.squashed_branch_predictions;
    j["squashed-memory-accesses"] = s.squashed_memory_accesses;
    j["wall-clock-seconds"] = s.wall_clock_seconds;
    return j.dump();
}

StatsRecord stats_from_json_line(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const std::exception& e) {
        throw SimError(ErrKind::ConfigError,
                       std::string("bad stats record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("benchmark") || !j.contains("cycles") ||
        !j.contains("committed-instructions"))
        throw SimError(ErrKind::ConfigError,
                       "stats record missing benchmark/cycles/"
                       "committed-instructions");
    StatsRecord r;
    RunStats& s = r.s;
    s.benchmark = j["benchmark"].get<std::string>();
    s.cycles = j["cycles"].get<uint64_t>();
    s.committed = j["committed-instructions"].get<uint64_t>();
    auto opt_u64 = [&](const char* k, uint64_t& out) {
        if (!j.contains(k)) return false;
        out = j[k].get<uint64_t>();
        return true;
    };
    if (j.contains("config-fingerprint"))
        s.config_fingerprint = j["config-fingerprint"].get<std::string>();
    bool bp = opt_u64("branch-predictions", s.branch_predictions);
    bool bm = opt_u64("branch-mispredictions", s.branch_mispredictions);
    r.has_branch_fields = bp && bm;
    opt_u64("icache-accesses", s.icache_accesses);
    opt_u64("icache-misses", s.icache_misses);
    opt_u64("dcache-accesses", s.dcache_accesses);
    opt_u64("dcache-misses", s.dcache_misses);
    opt_u64("mshr-allocations", s.mshr_allocations);
    opt_u64("mshr-merges", s.mshr_merges);
    opt_u64("mshr-structural-stalls", s.mshr_structural_stalls);
    bool ld = opt_u64("loads", s.loads);
    bool st = opt_u64("stores", s.stores);
    r.has_memory_fields = ld && st;
    opt_u64("pipeline-flushes-mispredict", s.flushes_mispredict);
    opt_u64("pipeline-flushes-memory-violation", s.flushes_memory_violation);
    opt_u64("squashed-instructions", s.squashed_instructions);
    opt_u64("squashed-branch-predictions", s.squashed_branch_predictions);
    opt_u64("squashed-memory-accesses", s.squashed_memory_accesses);
    if (j.contains("wall-clock-seconds")) {
        s.wall_clock_seconds = j["wall-clock-seconds"].get<double>();
        r.has_wall_clock = true;
    }
    return r;
}

void write_stats_file(const std::string& path,
                      const std::vector<RunStats>& runs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SimError(ErrKind::ConfigError, "cannot write " + path);
    for (auto& s : runs) f << stats_to_json_line(s) << "\n";
}

std::vector<StatsRecord> read_stats_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SimError(ErrKind::ConfigError, "cannot read " + path);
    std::vector<StatsRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        out.push_back(stats_from_json_line(line));
    }
    return out;
}

} // namespace rsdsim
