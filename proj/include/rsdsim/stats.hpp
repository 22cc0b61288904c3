#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsdsim {

struct RunStats {
    std::string benchmark;
    std::string config_fingerprint;
    uint64_t cycles = 0;
    uint64_t committed = 0;
    uint64_t branch_predictions = 0;    // committed control instructions
    uint64_t branch_mispredictions = 0; // committed flush-causing predictions
    uint64_t icache_accesses = 0;
    uint64_t icache_misses = 0;
    uint64_t dcache_accesses = 0;
    uint64_t dcache_misses = 0;
    uint64_t mshr_allocations = 0;
    uint64_t mshr_merges = 0;
    uint64_t mshr_structural_stalls = 0;
    uint64_t loads = 0;  // committed
    uint64_t stores = 0; // committed
    uint64_t flushes_mispredict = 0;
    uint64_t flushes_memory_violation = 0;
    // Squashed-path activity, kept out of MPKI/MAKI by design.
    uint64_t squashed_instructions = 0;
    uint64_t squashed_branch_predictions = 0;
    uint64_t squashed_memory_accesses = 0;
    double wall_clock_seconds = 0.0;

    double ipc() const { return cycles ? (double)committed / (double)cycles : 0.0; }
};

// One parsed stats record; presence flags cover fields external tools
// may legitimately omit (rendered as "n/a" in reports).
struct StatsRecord {
    RunStats s;
    bool has_wall_clock = false;
    bool has_branch_fields = false; // predictions + mispredictions
    bool has_memory_fields = false; // loads + stores
};

double mpki(uint64_t mispredictions, uint64_t committed); // throws on 0
double maki(uint64_t memory_accesses, uint64_t committed);

struct Means {
    double arithmetic = 0, geometric = 0, harmonic = 0;
};
Means means(const std::vector<double>& values); // throws on non-positive

struct RatioRow {
    std::string benchmark;
    double cycle_ratio = 0;
    double instruction_ratio = 0;
    std::optional<double> speedup; // wall_b / wall_a
    std::optional<double> mpki_a, mpki_b;
    std::optional<double> maki_a, maki_b;
};

struct RatioReport {
    std::vector<RatioRow> rows; // sorted by benchmark name
    Means cycle_means;
    Means instruction_means;
};

RatioReport compare(const std::vector<StatsRecord>& a,
                    const std::vector<StatsRecord>& b);

// Fixed-width table with the 1.0 ideal line, signed-percent divergence
// and per-benchmark MPKI/MAKI columns; "n/a" for missing fields.
std::string render_report(const RatioReport& report);

// NDJSON interchange: one object per line, field names as documented.
std::string stats_to_json_line(const RunStats& s);
StatsRecord stats_from_json_line(const std::string& line);
void write_stats_file(const std::string& path, const std::vector<RunStats>& runs);
std::vector<StatsRecord> read_stats_file(const std::string& path);

} // namespace rsdsim
