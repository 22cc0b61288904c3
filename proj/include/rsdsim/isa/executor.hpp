#pragma once
#include <array>
#include <cstdint>
#include <string>

#include "rsdsim/isa/inst.hpp"
#include "rsdsim/isa/mem.hpp"
#include "rsdsim/isa/program.hpp"

namespace rsdsim {

struct ArchState {
    uint32_t pc = 0;
    std::array<uint32_t, 32> xregs{}; // x0 reads handled by reg()
    SparseMemory memory;

    uint32_t reg(int i) const { return i == 0 ? 0 : xregs[i]; }
    void set_reg(int i, uint32_t v) { if (i != 0) xregs[i] = v; }
};

struct SyscallEffect {
    enum Kind { None, Exit, Write } kind = None;
    uint32_t exit_code = 0;
    uint32_t fd = 0;
    std::string bytes; // write payload

    bool operator==(const SyscallEffect&) const = default;
};

struct CommitRecord {
    uint32_t pc = 0;
    uint32_t raw = 0;
    bool has_rd = false;
    uint8_t rd = 0;
    uint32_t rd_value = 0;
    bool has_store = false;
    bool is_load = false;
    uint32_t mem_addr = 0;
    uint8_t mem_width = 0;
    uint32_t store_data = 0;
    uint32_t next_pc = 0;
    bool is_syscall = false;
    SyscallEffect syscall;

    bool operator==(const CommitRecord&) const = default;
};

// One architectural step: fetch at state.pc, decode, execute, advance.
// Throws IllegalInstruction / MisalignedAccess / OutOfImageAccess /
// UnsupportedSyscall. ECALL effects (including exit) are applied to state
// and reported in the record; the caller decides when to stop.
CommitRecord step(ArchState& state);

// Pure RV32I datapath pieces shared by the ISS and the timing model, so
// both sides compute results from a single definition.
uint32_t alu_value(const DecodedInst& d, uint32_t pc, uint32_t rs1,
                   uint32_t rs2); // rd value of any non-memory, non-system op
bool branch_taken(const DecodedInst& d, uint32_t rs1, uint32_t rs2);
uint32_t ctrl_target(const DecodedInst& d, uint32_t pc, uint32_t rs1);
uint32_t load_extend(Op op, uint32_t raw); // sign/zero-extend a sized load
unsigned mem_width(Op op);                 // 1, 2 or 4 bytes

// ECALL given current register state; reads write() payloads from memory
// and applies the a0 side effect. Exposed separately for direct testing.
SyscallEffect handle_ecall(ArchState& state);

// Convenience wrapper: a Program loaded into a fresh ArchState, stepped
// until exit. Used standalone and as the timing model's lockstep oracle.
class Executor {
public:
    Executor(const Program& prog, uint32_t ram_base = 0x80000000u,
             uint32_t ram_size = 16u << 20);

    CommitRecord step_once(); // throws if already exited
    bool exited() const { return exited_; }
    uint32_t exit_code() const { return exit_code_; }
    const std::string& output() const { return output_; }
    uint64_t steps() const { return steps_; }
    ArchState& state() { return state_; }
    const ArchState& state() const { return state_; }

    // Run to exit; throws CycleLimit-kind error after max_steps.
    void run(uint64_t max_steps);

private:
    ArchState state_;
    bool exited_ = false;
    uint32_t exit_code_ = 0;
    std::string output_;
    uint64_t steps_ = 0;
};

} // namespace rsdsim
