#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsdsim/errors.hpp"

namespace rsdsim {

// Process exit code for a simulator failure kind. The contract:
//   0  success              2  usage / bad config
//   10 unexpected guest exit code        11 co-simulation divergence
//   12 deadlock             13 cycle limit        14 invalid trace
//   15 benchmark mismatch   16 bad program image  17 guest runtime fault
//   70 internal invariant failure
int exit_code_for(ErrKind kind);
const char* err_kind_name(ErrKind kind);

// Everything `run` needs; exactly one program source must be set
// (one or more embedded benchmark names, or one external image path).
struct RunRequest {
    std::vector<std::string> benches; // embedded names; "all" = whole suite
    std::string program_path;         // external elf32 / flat image
    std::string format = "auto";      // auto | elf | flat
    uint32_t flat_base = 0x80000000u;
    uint32_t flat_entry = 0x80000000u;
    std::string config_path;          // empty = shipped defaults
    std::string stats_out;
    std::string trace_out;            // single-run only
    uint64_t trace_start = 0;
    uint64_t trace_end = UINT64_MAX;
    bool cosim = true;
    bool check_invariants = true;
    uint64_t max_cycles_override = 0; // 0 = keep config value
    unsigned threads = 0;             // 0 = one per benchmark, capped
};

int cmd_run(const RunRequest& rq, std::ostream& out, std::ostream& err);
int cmd_compare(const std::vector<std::string>& a_paths,
                const std::vector<std::string>& b_paths,
                const std::string& out_path, std::ostream& out,
                std::ostream& err);
int cmd_bench_list(std::ostream& out);
int cmd_bench_export(const std::string& name, const std::string& out_path,
                     std::ostream& out, std::ostream& err);
int cmd_validate_trace(const std::string& path, std::ostream& out,
                       std::ostream& err);

// Full argv dispatcher used by the rsdsim binary (and by tests).
int cli_main(int argc, const char* const* argv);

} // namespace rsdsim
