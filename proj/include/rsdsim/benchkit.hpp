#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsdsim/isa/executor.hpp"
#include "rsdsim/isa/program.hpp"

namespace rsdsim {

// One embedded micro-benchmark: a self-contained RV32I program plus a
// verifiable post-condition over the final architectural state.
struct Benchmark {
    std::string name;
    std::string description;
    Program program;
    // Expected guest exit code (argument of the final exit syscall).
    uint32_t expected_exit = 0;
    // Nominal committed-instruction range (sanity band, not a pin).
    uint64_t min_committed = 0;
    uint64_t max_committed = 0;
    // Post-condition over the final architectural state.
    std::function<bool(const ArchState&)> expected_result;
};

// Names of all embedded benchmarks, in canonical order.
std::vector<std::string> bench_list();

// Materialize one benchmark by name; throws BenchMismatch for unknown names.
Benchmark bench_get(const std::string& name);

// Flat-binary image of a benchmark: contiguous bytes starting at `base`
// (gaps between segments zero-filled), suitable for the raw loader.
struct FlatImage {
    uint32_t base = 0;
    uint32_t entry = 0;
    std::vector<uint8_t> bytes;
};
FlatImage bench_export_flat(const std::string& name);

} // namespace rsdsim
