#include "rsdsim/isa/executor.hpp"
#include "rsdsim/errors.hpp"

#include <cstdio>

namespace rsdsim {

namespace {

[[noreturn]] void misaligned(const char* what, uint32_t addr) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s at 0x%08X", what, addr);
    throw SimError(ErrKind::MisalignedAccess, buf);
}

} // namespace

uint32_t load_extend(Op op, uint32_t v) {
    switch (op) {
    case Op::LB: return (uint32_t)(int32_t)(int8_t)v;
    case Op::LH: return (uint32_t)(int32_t)(int16_t)v;
    default: return v; // LW/LBU/LHU already sized by width
    }
}

unsigned mem_width(Op op) {
    switch (op) {
    case Op::LB: case Op::LBU: case Op::SB: return 1;
    case Op::LH: case Op::LHU: case Op::SH: return 2;
    default: return 4;
    }
}

uint32_t alu_value(const DecodedInst& d, uint32_t pc, uint32_t r1, uint32_t r2) {
    uint32_t imm = (uint32_t)d.imm;
    switch (d.op) {
    case Op::LUI:   return imm;
    case Op::AUIPC: return pc + imm;
    case Op::JAL: case Op::JALR: return pc + 4; // link value
    case Op::ADDI:  return r1 + imm;
    case Op::SLTI:  return (int32_t)r1 < (int32_t)imm;
    case Op::SLTIU: return r1 < imm;
    case Op::XORI:  return r1 ^ imm;
    case Op::ORI:   return r1 | imm;
    case Op::ANDI:  return r1 & imm;
    case Op::SLLI:  return r1 << (imm & 31);
    case Op::SRLI:  return r1 >> (imm & 31);
    case Op::SRAI:  return (uint32_t)((int32_t)r1 >> (imm & 31));
    case Op::ADD:   return r1 + r2;
    case Op::SUB:   return r1 - r2;
    case Op::SLL:   return r1 << (r2 & 31);
    case Op::SLT:   return (int32_t)r1 < (int32_t)r2;
    case Op::SLTU:  return r1 < r2;
    case Op::XOR:   return r1 ^ r2;
    case Op::SRL:   return r1 >> (r2 & 31);
    case Op::SRA:   return (uint32_t)((int32_t)r1 >> (r2 & 31));
    case Op::OR:    return r1 | r2;
    case Op::AND:   return r1 & r2;
    default:        return 0; // FENCE and friends produce nothing
    }
}

bool branch_taken(const DecodedInst& d, uint32_t r1, uint32_t r2) {
    switch (d.op) {
    case Op::BEQ:  return r1 == r2;
    case Op::BNE:  return r1 != r2;
    case Op::BLT:  return (int32_t)r1 < (int32_t)r2;
    case Op::BGE:  return (int32_t)r1 >= (int32_t)r2;
    case Op::BLTU: return r1 < r2;
    case Op::BGEU: return r1 >= r2;
    default:       return true; // JAL/JALR always redirect
    }
}

uint32_t ctrl_target(const DecodedInst& d, uint32_t pc, uint32_t r1) {
    if (d.op == Op::JALR) return (r1 + (uint32_t)d.imm) & ~1u;
    return pc + (uint32_t)d.imm; // branches and JAL
}

SyscallEffect handle_ecall(ArchState& s) {
    SyscallEffect eff;
    uint32_t num = s.reg(17); // a7
    if (num == 93) {
        eff.kind = SyscallEffect::Exit;
        eff.exit_code = s.reg(10);
        return eff;
    }
    if (num == 64) {
        eff.kind = SyscallEffect::Write;
        eff.fd = s.reg(10);
        uint32_t base = s.reg(11), len = s.reg(12);
        auto bytes = s.memory.read_bytes(base, len);
        eff.bytes.assign(bytes.begin(), bytes.end());
        s.set_reg(10, len); // write returns the byte count in a0
        return eff;
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "unsupported syscall %u", num);
    throw SimError(ErrKind::UnsupportedSyscall, buf);
}

CommitRecord step(ArchState& s) {
    if (s.pc % 4 != 0) misaligned("instruction fetch", s.pc);
    uint32_t raw = s.memory.load(s.pc, 4);
    DecodedInst d = decode(raw);

    CommitRecord rec;
    rec.pc = s.pc;
    rec.raw = raw;
    uint32_t r1 = s.reg(d.rs1), r2 = s.reg(d.rs2);
    uint32_t next = s.pc + 4;
    bool wr = d.writes_rd();
    uint32_t val = 0;

    if (d.is_branch()) {
        if (branch_taken(d, r1, r2)) next = ctrl_target(d, s.pc, r1);
    } else if (d.is_jump()) {
        val = alu_value(d, s.pc, r1, r2);
        next = ctrl_target(d, s.pc, r1);
    } else if (d.is_load()) {
        unsigned w = mem_width(d.op);
        uint32_t addr = r1 + (uint32_t)d.imm;
        if (addr % w != 0) misaligned("load", addr);
        val = load_extend(d.op, s.memory.load(addr, w));
        rec.is_load = true;
        rec.mem_addr = addr;
        rec.mem_width = (uint8_t)w;
    } else if (d.is_store()) {
        unsigned w = mem_width(d.op);
        uint32_t addr = r1 + (uint32_t)d.imm;
        if (addr % w != 0) misaligned("store", addr);
        s.memory.store(addr, w, r2);
        rec.has_store = true;
        rec.mem_addr = addr;
        rec.mem_width = (uint8_t)w;
        rec.store_data = w == 4 ? r2 : (r2 & ((1u << (8 * w)) - 1));
    } else if (d.op == Op::ECALL) {
        rec.is_syscall = true;
        rec.syscall = handle_ecall(s);
        if (rec.syscall.kind == SyscallEffect::Write) {
            rec.has_rd = true;
            rec.rd = 10;
            rec.rd_value = s.reg(10);
        }
    } else if (d.op == Op::EBREAK) {
        throw SimError(ErrKind::IllegalInstruction, "ebreak trap");
    } else {
        val = alu_value(d, s.pc, r1, r2); // ALU ops and FENCE (no-op)
    }

    if (wr) {
        s.set_reg(d.rd, val);
        rec.has_rd = true;
        rec.rd = d.rd;
        rec.rd_value = s.reg(d.rd); // x0 writes read back as 0
    }
    s.pc = next;
    rec.next_pc = next;
    return rec;
}

Executor::Executor(const Program& prog, uint32_t ram_base, uint32_t ram_size) {
    state_.memory = SparseMemory(ram_base, ram_size);
    prog.map_into(state_.memory);
    state_.pc = prog.entry;
    uint32_t sp = prog.initial_sp ? prog.initial_sp : ram_base + ram_size;
    state_.set_reg(2, sp);
    for (auto& [idx, v] : prog.initial_regs)
        state_.set_reg(idx, v);
}

CommitRecord Executor::step_once() {
    if (exited_)
        throw SimError(ErrKind::Internal, "step after exit");
    CommitRecord rec = step(state_);
    steps_++;
    if (rec.is_syscall) {
        if (rec.syscall.kind == SyscallEffect::Exit) {
            exited_ = true;
            exit_code_ = rec.syscall.exit_code;
        } else if (rec.syscall.kind == SyscallEffect::Write) {
            output_ += rec.syscall.bytes;
        }
    }
    return rec;
}

void Executor::run(uint64_t max_steps) {
    while (!exited_) {
        if (steps_ >= max_steps)
            throw SimError(ErrKind::CycleLimit, "functional step limit reached");
        step_once();
    }
}

} // namespace rsdsim
