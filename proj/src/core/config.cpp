#include "rsdsim/core/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rsdsim/errors.hpp"

namespace rsdsim {
namespace {

struct KeySpec {
    const char* name;
    uint64_t (*get)(const CoreConfig&);
    void (*set)(CoreConfig&, uint64_t);
};

// Single source of truth for the config-file grammar: parser, canonical
// serialization and the fingerprint all walk this table in order.
const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        {"core.fetch-width",
         [](const CoreConfig& c) { return (uint64_t)c.fetch_width; },
         [](CoreConfig& c, uint64_t v) { c.fetch_width = (unsigned)v; }},
        {"core.rename-width",
         [](const CoreConfig& c) { return (uint64_t)c.rename_width; },
         [](CoreConfig& c, uint64_t v) { c.rename_width = (unsigned)v; }},
        {"core.commit-width",
         [](const CoreConfig& c) { return (uint64_t)c.commit_width; },
         [](CoreConfig& c, uint64_t v) { c.commit_width = (unsigned)v; }},
        {"core.writeback-width",
         [](const CoreConfig& c) { return (uint64_t)c.writeback_width; },
         [](CoreConfig& c, uint64_t v) { c.writeback_width = (unsigned)v; }},
        {"core.rob-entries",
         [](const CoreConfig& c) { return (uint64_t)c.rob_entries; },
         [](CoreConfig& c, uint64_t v) { c.rob_entries = (unsigned)v; }},
        {"core.prf-entries",
         [](const CoreConfig& c) { return (uint64_t)c.prf_entries; },
         [](CoreConfig& c, uint64_t v) { c.prf_entries = (unsigned)v; }},
        {"core.iq-entries",
         [](const CoreConfig& c) { return (uint64_t)c.iq_entries; },
         [](CoreConfig& c, uint64_t v) { c.iq_entries = (unsigned)v; }},
        {"core.lq-entries",
         [](const CoreConfig& c) { return (uint64_t)c.lq_entries; },
         [](CoreConfig& c, uint64_t v) { c.lq_entries = (unsigned)v; }},
        {"core.sq-entries",
         [](const CoreConfig& c) { return (uint64_t)c.sq_entries; },
         [](CoreConfig& c, uint64_t v) { c.sq_entries = (unsigned)v; }},
        {"core.int-issue-ports",
         [](const CoreConfig& c) { return (uint64_t)c.int_issue_ports; },
         [](CoreConfig& c, uint64_t v) { c.int_issue_ports = (unsigned)v; }},
        {"core.mem-issue-ports",
         [](const CoreConfig& c) { return (uint64_t)c.mem_issue_ports; },
         [](CoreConfig& c, uint64_t v) { c.mem_issue_ports = (unsigned)v; }},
        {"core.store-ports",
         [](const CoreConfig& c) { return (uint64_t)c.store_ports; },
         [](CoreConfig& c, uint64_t v) { c.store_ports = (unsigned)v; }},
        {"bpred.pht-entries",
         [](const CoreConfig& c) { return (uint64_t)c.bpred.pht_entries; },
         [](CoreConfig& c, uint64_t v) { c.bpred.pht_entries = (uint32_t)v; }},
        {"bpred.history-bits",
         [](const CoreConfig& c) { return (uint64_t)c.bpred.history_bits; },
         [](CoreConfig& c, uint64_t v) { c.bpred.history_bits = (uint32_t)v; }},
        {"bpred.btb-entries",
         [](const CoreConfig& c) { return (uint64_t)c.bpred.btb_entries; },
         [](CoreConfig& c, uint64_t v) { c.bpred.btb_entries = (uint32_t)v; }},
        {"bpred.mdp-entries",
         [](const CoreConfig& c) { return (uint64_t)c.mdp_entries; },
         [](CoreConfig& c, uint64_t v) { c.mdp_entries = (unsigned)v; }},
        {"icache.size-bytes",
         [](const CoreConfig& c) { return (uint64_t)c.icache.size_bytes; },
         [](CoreConfig& c, uint64_t v) { c.icache.size_bytes = (uint32_t)v; }},
        {"icache.associativity",
         [](const CoreConfig& c) { return (uint64_t)c.icache.associativity; },
         [](CoreConfig& c, uint64_t v) { c.icache.associativity = (uint32_t)v; }},
        {"icache.line-bytes",
         [](const CoreConfig& c) { return (uint64_t)c.icache.line_bytes; },
         [](CoreConfig& c, uint64_t v) { c.icache.line_bytes = (uint32_t)v; }},
        {"icache.hit-latency",
         [](const CoreConfig& c) { return (uint64_t)c.icache.hit_latency; },
         [](CoreConfig& c, uint64_t v) { c.icache.hit_latency = (uint32_t)v; }},
        {"icache.miss-latency",
         [](const CoreConfig& c) { return (uint64_t)c.icache.miss_latency; },
         [](CoreConfig& c, uint64_t v) { c.icache.miss_latency = (uint32_t)v; }},
        {"icache.mshr-entries",
         [](const CoreConfig& c) { return (uint64_t)c.icache.mshr_count; },
         [](CoreConfig& c, uint64_t v) { c.icache.mshr_count = (uint32_t)v; }},
        {"dcache.size-bytes",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.size_bytes; },
         [](CoreConfig& c, uint64_t v) { c.dcache.size_bytes = (uint32_t)v; }},
        {"dcache.associativity",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.associativity; },
         [](CoreConfig& c, uint64_t v) { c.dcache.associativity = (uint32_t)v; }},
        {"dcache.line-bytes",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.line_bytes; },
         [](CoreConfig& c, uint64_t v) { c.dcache.line_bytes = (uint32_t)v; }},
        {"dcache.hit-latency",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.hit_latency; },
         [](CoreConfig& c, uint64_t v) { c.dcache.hit_latency = (uint32_t)v; }},
        {"dcache.miss-latency",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.miss_latency; },
         [](CoreConfig& c, uint64_t v) { c.dcache.miss_latency = (uint32_t)v; }},
        {"dcache.mshr-entries",
         [](const CoreConfig& c) { return (uint64_t)c.dcache.mshr_count; },
         [](CoreConfig& c, uint64_t v) { c.dcache.mshr_count = (uint32_t)v; }},
        {"mem.ram-base",
         [](const CoreConfig& c) { return (uint64_t)c.ram_base; },
         [](CoreConfig& c, uint64_t v) { c.ram_base = (uint32_t)v; }},
        {"mem.ram-size",
         [](const CoreConfig& c) { return (uint64_t)c.ram_size; },
         [](CoreConfig& c, uint64_t v) { c.ram_size = (uint32_t)v; }},
        {"sim.max-cycles",
         [](const CoreConfig& c) { return c.max_cycles; },
         [](CoreConfig& c, uint64_t v) { c.max_cycles = v; }},
        {"sim.deadlock-cycles",
         [](const CoreConfig& c) { return c.deadlock_cycles; },
         [](CoreConfig& c, uint64_t v) { c.deadlock_cycles = v; }},
    };
    return table;
}

bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

[[noreturn]] void bad(const std::string& what) {
    throw SimError(ErrKind::ConfigError, what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void CoreConfig::validate() const {
    if (fetch_width < 1 || fetch_width > 8) bad("core.fetch-width must be 1..8");
    if (rename_width < 1 || rename_width > 8) bad("core.rename-width must be 1..8");
    if (commit_width < 1 || commit_width > 8) bad("core.commit-width must be 1..8");
    if (writeback_width < 1) bad("core.writeback-width must be >= 1");
    if (rob_entries < rename_width) bad("core.rob-entries smaller than rename width");
    if (prf_entries < 32 + rename_width)
        bad("core.prf-entries must exceed 32 architectural registers");
    if (iq_entries < 1) bad("core.iq-entries must be >= 1");
    if (lq_entries < 1 || sq_entries < 1) bad("load/store queues must be >= 1");
    if (int_issue_ports < 1) bad("core.int-issue-ports must be >= 1");
    if (mem_issue_ports < 1) bad("core.mem-issue-ports must be >= 1");
    if (store_ports < 1 || store_ports > mem_issue_ports)
        bad("core.store-ports must be 1..mem-issue-ports");
    if (!is_pow2(bpred.pht_entries)) bad("bpred.pht-entries must be a power of two");
    if (bpred.history_bits < 1 || bpred.history_bits > 31)
        bad("bpred.history-bits must be 1..31");
    if (!is_pow2(bpred.btb_entries)) bad("bpred.btb-entries must be a power of two");
    if (!is_pow2(mdp_entries)) bad("bpred.mdp-entries must be a power of two");
    for (const CacheConfig* c : {&icache, &dcache}) {
        const char* which = (c == &icache) ? "icache" : "dcache";
        if (!is_pow2(c->line_bytes) || c->line_bytes < 4)
            bad(std::string(which) + ".line-bytes must be a power of two >= 4");
        if (c->associativity < 1)
            bad(std::string(which) + ".associativity must be >= 1");
        if (c->size_bytes == 0 ||
            c->size_bytes % (c->associativity * c->line_bytes) != 0)
            bad(std::string(which) + ".size-bytes not divisible into sets");
        if (!is_pow2(c->sets()))
            bad(std::string(which) + " set count must be a power of two");
        if (c->hit_latency < 1) bad(std::string(which) + ".hit-latency must be >= 1");
        if (c->miss_latency < c->hit_latency)
            bad(std::string(which) + ".miss-latency must be >= hit latency");
        if (c->mshr_count < 1) bad(std::string(which) + ".mshr-entries must be >= 1");
    }
    if (ram_size == 0 || ram_size % 4096 != 0) bad("mem.ram-size must be a multiple of 4096");
    if (ram_base % 4096 != 0) bad("mem.ram-base must be 4096-aligned");
    if ((uint64_t)ram_base + ram_size > (1ull << 32)) bad("RAM window exceeds the 32-bit space");
    if (max_cycles < 1) bad("sim.max-cycles must be >= 1");
    if (deadlock_cycles < 1) bad("sim.deadlock-cycles must be >= 1");
}

std::string CoreConfig::canonical_text() const {
    std::ostringstream out;
    for (const auto& k : key_table())
        out << k.name << " = " << k.get(*this) << "\n";
    return out.str();
}

std::string CoreConfig::fingerprint() const {
    uint64_t h = 1469598103934665603ull; // FNV offset basis
    for (unsigned char ch : canonical_text()) {
        h ^= ch;
        h *= 1099511628211ull; // FNV prime
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

CoreConfig parse_config_text(const std::string& text) {
    CoreConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            bad("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            bad("config line " + std::to_string(line_no) + ": empty key or value");

        const KeySpec* spec = nullptr;
        for (const auto& k : key_table())
            if (key == k.name) { spec = &k; break; }
        if (!spec)
            bad("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");

        uint64_t v = 0;
        try {
            size_t pos = 0;
            v = std::stoull(value, &pos, 0); // decimal or 0x hex
            if (pos != value.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            bad("config line " + std::to_string(line_no) + ": bad value '" + value +
                "' for " + key);
        }
        spec->set(cfg, v);
    }
    cfg.validate();
    return cfg;
}

CoreConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError(ErrKind::ConfigError, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace rsdsim
