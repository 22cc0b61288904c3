#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsdsim/errors.hpp"
#include "rsdsim/isa/inst.hpp"

namespace rsdsim {

// Register aliases for readability in embedded programs.
enum Reg : int {
    x0 = 0, ra = 1, sp = 2, gp = 3, tp = 4,
    t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9,
    a0 = 10, a1 = 11, a2 = 12, a3 = 13, a4 = 14, a5 = 15, a6 = 16, a7 = 17,
    s2 = 18, s3 = 19, s4 = 20, s5 = 21, s6 = 22, s7 = 23, s8 = 24, s9 = 25,
    s10 = 26, s11 = 27, t3 = 28, t4 = 29, t5 = 30, t6 = 31,
};

// Tiny in-process assembler: sequential emission, labels, branch/jump
// fixups. Used by benchkit and by pipeline tests that need programs.
class Asm {
public:
    explicit Asm(uint32_t base) : base_(base) {}

    uint32_t pc() const { return base_ + 4u * (uint32_t)words_.size(); }

    void label(const std::string& name) {
        if (!labels_.emplace(name, pc()).second)
            throw SimError(ErrKind::Internal, "duplicate label " + name);
    }

    void raw(uint32_t w) { words_.push_back(w); }

    void op_r(Op op, int rd, int rs1, int rs2) { emit(op, rd, rs1, rs2, 0); }
    void op_i(Op op, int rd, int rs1, int32_t imm) { emit(op, rd, rs1, 0, imm); }
    void load(Op op, int rd, int32_t off, int base) { emit(op, rd, base, 0, off); }
    void store(Op op, int rs2, int32_t off, int base) { emit(op, 0, base, rs2, off); }
    void jalr(int rd, int rs1, int32_t imm) { emit(Op::JALR, rd, rs1, 0, imm); }
    void ret() { jalr(x0, ra, 0); }
    void mv(int rd, int rs1) { op_i(Op::ADDI, rd, rs1, 0); }
    void ecall() { emit(Op::ECALL, 0, 0, 0, 0); }

    void branch(Op op, int rs1, int rs2, const std::string& target) {
        DecodedInst d = make(op, 0, rs1, rs2, 0);
        fixups_.push_back({words_.size(), target, d});
        words_.push_back(0x13);
    }
    void jal(int rd, const std::string& target) {
        DecodedInst d = make(Op::JAL, rd, 0, 0, 0);
        fixups_.push_back({words_.size(), target, d});
        words_.push_back(0x13);
    }

    // Materialize a 32-bit constant (1 or 2 instructions).
    void li(int rd, uint32_t value) {
        int32_t sv = (int32_t)value;
        if (sv >= -2048 && sv <= 2047) {
            op_i(Op::ADDI, rd, x0, sv);
            return;
        }
        uint32_t hi = (value + 0x800u) & 0xFFFFF000u;
        int32_t lo = (int32_t)(value - hi);
        emit(Op::LUI, rd, 0, 0, (int32_t)hi);
        if (lo != 0) op_i(Op::ADDI, rd, rd, lo);
    }

    std::vector<uint32_t> finalize() {
        for (auto& fx : fixups_) {
            auto it = labels_.find(fx.target);
            if (it == labels_.end())
                throw SimError(ErrKind::Internal, "undefined label " + fx.target);
            int64_t off = (int64_t)it->second - (base_ + 4 * (int64_t)fx.index);
            bool is_jal = fx.proto.op == Op::JAL;
            int64_t lim = is_jal ? (1 << 20) : (1 << 12);
            if (off % 2 != 0 || off < -lim || off >= lim)
                throw SimError(ErrKind::Internal,
                               "branch target out of range: " + fx.target);
            fx.proto.imm = (int32_t)off;
            words_[fx.index] = encode(fx.proto);
        }
        fixups_.clear();
        return words_;
    }

    std::vector<uint8_t> finalize_bytes() {
        std::vector<uint8_t> out;
        for (uint32_t w : finalize()) {
            out.push_back((uint8_t)w);
            out.push_back((uint8_t)(w >> 8));
            out.push_back((uint8_t)(w >> 16));
            out.push_back((uint8_t)(w >> 24));
        }
        return out;
    }

private:
    struct Fixup {
        size_t index;
        std::string target;
        DecodedInst proto;
    };

    static DecodedInst make(Op op, int rd, int rs1, int rs2, int32_t imm) {
        DecodedInst d;
        d.op = op;
        d.rd = (uint8_t)rd;
        d.rs1 = (uint8_t)rs1;
        d.rs2 = (uint8_t)rs2;
        d.imm = imm;
        return d;
    }

    void emit(Op op, int rd, int rs1, int rs2, int32_t imm) {
        words_.push_back(encode(make(op, rd, rs1, rs2, imm)));
    }

    uint32_t base_;
    std::vector<uint32_t> words_;
    std::map<std::string, uint32_t> labels_;
    std::vector<Fixup> fixups_;
};

} // namespace rsdsim
