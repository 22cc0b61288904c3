#pragma once
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsdsim/bpred.hpp"
#include "rsdsim/cache.hpp"
#include "rsdsim/core/config.hpp"
#include "rsdsim/isa/executor.hpp"
#include "rsdsim/isa/program.hpp"
#include "rsdsim/kanata.hpp"
#include "rsdsim/stats.hpp"

namespace rsdsim {

struct RunOptions {
    bool cosim = true;            // lockstep-check every commit
    bool check_invariants = true; // per-cycle structural asserts
    TraceWriter* trace = nullptr; // optional Kanata sink
    // Birth window: instructions fetched in [trace_start, trace_end) are
    // traced from birth to retirement; others are omitted entirely.
    uint64_t trace_start = 0;
    uint64_t trace_end = UINT64_MAX;
    // Testing hook: co-simulate against a different program image to
    // provoke a divergence deliberately.
    const Program* oracle_program = nullptr;
};

// Per-cycle activity snapshot, for structural-invariant checks.
struct CycleReport {
    uint64_t cycle = 0;
    unsigned commits = 0;
    unsigned writebacks = 0;
    unsigned issues = 0;
    unsigned fetched = 0; // fetch slots opened this cycle
    unsigned rob_live = 0;
    unsigned lq_live = 0;
    unsigned sq_live = 0;
    unsigned free_pregs = 0;
    unsigned inflight_pregs = 0; // live ROB destinations
    unsigned mapped_pregs = 0;   // committed map (x0..x31)
};

struct RunResult {
    RunStats stats;
    uint32_t guest_exit = 0;
    std::string guest_output;
    ArchState final_state; // committed registers + memory image
};

// The cycle-level out-of-order core. One instance per run; strictly
// single-threaded. tick() advances one cycle in reverse pipeline order;
// run() loops until the guest exits or a policy limit fires.
class Core {
public:
    Core(const Program& prog, const CoreConfig& cfg, const RunOptions& opt = {});
    ~Core();

    CycleReport tick();
    RunResult run(); // ticks to completion; call once

    bool exited() const;
    uint32_t guest_exit() const;
    uint64_t cycle() const;
    const RunStats& stats() const;
    // Committed architectural state (registers + memory), for predicates.
    RunResult take_result(); // valid after exit

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace rsdsim
