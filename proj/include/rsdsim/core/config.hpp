#pragma once
#include <cstdint>
#include <string>

#include "rsdsim/bpred.hpp"
#include "rsdsim/cache.hpp"

namespace rsdsim {

// All microarchitectural parameters of the modeled core plus simulator
// policy knobs. Defaults reproduce the reference configuration verbatim.
struct CoreConfig {
    // Pipeline widths.
    unsigned fetch_width = 2;
    unsigned rename_width = 2; // decode/rename/dispatch width
    unsigned commit_width = 2;
    unsigned writeback_width = 5;

    // Window sizes.
    unsigned rob_entries = 64;
    unsigned prf_entries = 64; // physical integer registers, total
    unsigned iq_entries = 32;
    unsigned lq_entries = 16;
    unsigned sq_entries = 16;

    // Issue ports: 3 integer + 2 memory, of which 1 may issue stores.
    unsigned int_issue_ports = 3;
    unsigned mem_issue_ports = 2;
    unsigned store_ports = 1;

    // Predictors.
    BpredConfig bpred{}; // gshare 2048 x 2-bit, 11-bit GHR, 1024-entry BTB
    unsigned mdp_entries = 1024;

    // Caches (identical I/D geometry by default).
    CacheConfig icache{};
    CacheConfig dcache{};

    // Guest memory window.
    uint32_t ram_base = 0x80000000u;
    uint32_t ram_size = 16u << 20;

    // Simulator policy.
    uint64_t max_cycles = 50'000'000;
    uint64_t deadlock_cycles = 10'000; // no-commit watchdog window

    void validate() const; // throws ConfigError on nonsense

    // Stable one-line-per-key serialization of the effective parameters
    // (simulator policy knobs included; formatting-independent).
    std::string canonical_text() const;

    // FNV-1a 64 over canonical_text, as 16 lowercase hex digits.
    std::string fingerprint() const;
};

// Parse `section.key = value` overrides on top of the defaults.
// `#` starts a comment; blank lines are skipped; unknown keys and
// malformed values raise ConfigError with the offending line number.
CoreConfig parse_config_text(const std::string& text);
CoreConfig parse_config_file(const std::string& path);

} // namespace rsdsim
