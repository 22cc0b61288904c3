#include "rsdsim/isa/inst.hpp"
#include "rsdsim/errors.hpp"

#include <array>
#include <cstdio>

namespace rsdsim {

namespace {

constexpr uint32_t bits(uint32_t w, int hi, int lo) {
    return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

int32_t imm_i(uint32_t w) { return (int32_t)w >> 20; }
int32_t imm_s(uint32_t w) {
    return (int32_t)(((int32_t)w >> 20) & ~0x1F) | (int32_t)bits(w, 11, 7);
}
int32_t imm_b(uint32_t w) {
    uint32_t v = (bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) |
                 (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1);
    return (int32_t)(v << 19) >> 19;
}
int32_t imm_u(uint32_t w) { return (int32_t)(w & 0xFFFFF000u); }
int32_t imm_j(uint32_t w) {
    uint32_t v = (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) |
                 (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1);
    return (int32_t)(v << 11) >> 11;
}

} // namespace

const char* op_name(Op op) {
    static const char* names[] = {
        "lui", "auipc", "jal", "jalr",
        "beq", "bne", "blt", "bge", "bltu", "bgeu",
        "lb", "lh", "lw", "lbu", "lhu",
        "sb", "sh", "sw",
        "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
        "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
        "fence", "ecall", "ebreak",
    };
    return names[(int)op];
}

std::optional<DecodedInst> try_decode(uint32_t w) {
    DecodedInst d;
    d.raw = w;
    d.rd = (uint8_t)bits(w, 11, 7);
    d.rs1 = (uint8_t)bits(w, 19, 15);
    d.rs2 = (uint8_t)bits(w, 24, 20);
    uint32_t opcode = bits(w, 6, 0);
    uint32_t f3 = bits(w, 14, 12);
    uint32_t f7 = bits(w, 31, 25);

    switch (opcode) {
    case 0x37: d.op = Op::LUI;   d.imm = imm_u(w); d.rs1 = d.rs2 = 0; return d;
    case 0x17: d.op = Op::AUIPC; d.imm = imm_u(w); d.rs1 = d.rs2 = 0; return d;
    case 0x6F: d.op = Op::JAL;   d.imm = imm_j(w); d.rs1 = d.rs2 = 0; return d;
    case 0x67:
        if (f3 != 0) return std::nullopt;
        d.op = Op::JALR; d.imm = imm_i(w); d.rs2 = 0; return d;
    case 0x63: {
        static const Op ops[8] = {Op::BEQ, Op::BNE, Op::BEQ, Op::BEQ,
                                  Op::BLT, Op::BGE, Op::BLTU, Op::BGEU};
        if (f3 == 2 || f3 == 3) return std::nullopt;
        d.op = ops[f3]; d.imm = imm_b(w); d.rd = 0; return d;
    }
    case 0x03: {
        static const Op ops[8] = {Op::LB, Op::LH, Op::LW, Op::LB,
                                  Op::LBU, Op::LHU, Op::LB, Op::LB};
        if (f3 == 3 || f3 >= 6) return std::nullopt; // LD / LWU are RV64
        d.op = ops[f3]; d.imm = imm_i(w); d.rs2 = 0; return d;
    }
    case 0x23: {
        static const Op ops[4] = {Op::SB, Op::SH, Op::SW, Op::SB};
        if (f3 >= 3) return std::nullopt; // SD is RV64
        d.op = ops[f3]; d.imm = imm_s(w); d.rd = 0; return d;
    }
    case 0x13: {
        static const Op ops[8] = {Op::ADDI, Op::SLLI, Op::SLTI, Op::SLTIU,
                                  Op::XORI, Op::SRLI, Op::ORI, Op::ANDI};
        d.op = ops[f3];
        d.rs2 = 0;
        if (f3 == 1) { // SLLI: upper 7 bits must be zero on RV32
            if (f7 != 0x00) return std::nullopt;
            d.imm = (int32_t)bits(w, 24, 20);
        } else if (f3 == 5) { // SRLI / SRAI
            if (f7 == 0x20) d.op = Op::SRAI;
            else if (f7 != 0x00) return std::nullopt;
            d.imm = (int32_t)bits(w, 24, 20);
        } else {
            d.imm = imm_i(w);
        }
        return d;
    }
    case 0x33: {
        static const Op base[8] = {Op::ADD, Op::SLL, Op::SLT, Op::SLTU,
                                   Op::XOR, Op::SRL, Op::OR, Op::AND};
        d.imm = 0;
        if (f7 == 0x00) { d.op = base[f3]; return d; }
        if (f7 == 0x20) { // only SUB and SRA live in the 0x20 plane
            if (f3 == 0) { d.op = Op::SUB; return d; }
            if (f3 == 5) { d.op = Op::SRA; return d; }
        }
        return std::nullopt; // covers M-extension (f7 == 1) and reserved
    }
    case 0x0F:
        if (f3 != 0) return std::nullopt; // FENCE.I is Zifencei, not base
        d.op = Op::FENCE; d.imm = 0; d.rd = d.rs1 = d.rs2 = 0; return d;
    case 0x73:
        // Base RV32I carries only ECALL/EBREAK; CSR accesses (f3 != 0) and
        // other funct12 values are rejected.
        if (f3 != 0 || d.rd != 0 || d.rs1 != 0) return std::nullopt;
        if (w >> 20 == 0) { d.op = Op::ECALL; d.rs2 = 0; d.imm = 0; return d; }
        if (w >> 20 == 1) { d.op = Op::EBREAK; d.rs2 = 0; d.imm = 0; return d; }
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

DecodedInst decode(uint32_t w) {
    auto d = try_decode(w);
    if (!d) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "illegal instruction 0x%08X", w);
        throw SimError(ErrKind::IllegalInstruction, buf);
    }
    return *d;
}

uint32_t encode(const DecodedInst& d) {
    auto r = [&](uint32_t opcode, uint32_t f3, uint32_t f7) {
        return opcode | ((uint32_t)d.rd << 7) | (f3 << 12) |
               ((uint32_t)d.rs1 << 15) | ((uint32_t)d.rs2 << 20) | (f7 << 25);
    };
    auto i_type = [&](uint32_t opcode, uint32_t f3) {
        return opcode | ((uint32_t)d.rd << 7) | (f3 << 12) |
               ((uint32_t)d.rs1 << 15) | ((uint32_t)(d.imm & 0xFFF) << 20);
    };
    auto s_type = [&](uint32_t f3) {
        uint32_t imm = (uint32_t)d.imm & 0xFFF;
        return 0x23u | ((imm & 0x1F) << 7) | (f3 << 12) |
               ((uint32_t)d.rs1 << 15) | ((uint32_t)d.rs2 << 20) |
               ((imm >> 5) << 25);
    };
    auto b_type = [&](uint32_t f3) {
        uint32_t imm = (uint32_t)d.imm;
        return 0x63u | (bits(imm, 11, 11) << 7) | (bits(imm, 4, 1) << 8) |
               (f3 << 12) | ((uint32_t)d.rs1 << 15) | ((uint32_t)d.rs2 << 20) |
               (bits(imm, 10, 5) << 25) | (bits(imm, 12, 12) << 31);
    };
    auto u_type = [&](uint32_t opcode) {
        return opcode | ((uint32_t)d.rd << 7) | ((uint32_t)d.imm & 0xFFFFF000u);
    };
    auto sh_type = [&](uint32_t f3, uint32_t f7) {
        return 0x13u | ((uint32_t)d.rd << 7) | (f3 << 12) |
               ((uint32_t)d.rs1 << 15) | (((uint32_t)d.imm & 0x1F) << 20) |
               (f7 << 25);
    };

    switch (d.op) {
    case Op::LUI:   return u_type(0x37);
    case Op::AUIPC: return u_type(0x17);
    case Op::JAL: {
        uint32_t imm = (uint32_t)d.imm;
        return 0x6Fu | ((uint32_t)d.rd << 7) | (bits(imm, 19, 12) << 12) |
               (bits(imm, 11, 11) << 20) | (bits(imm, 10, 1) << 21) |
               (bits(imm, 20, 20) << 31);
    }
    case Op::JALR:  return i_type(0x67, 0);
    case Op::BEQ:   return b_type(0);
    case Op::BNE:   return b_type(1);
    case Op::BLT:   return b_type(4);
    case Op::BGE:   return b_type(5);
    case Op::BLTU:  return b_type(6);
    case Op::BGEU:  return b_type(7);
    case Op::LB:    return i_type(0x03, 0);
    case Op::LH:    return i_type(0x03, 1);
    case Op::LW:    return i_type(0x03, 2);
    case Op::LBU:   return i_type(0x03, 4);
    case Op::LHU:   return i_type(0x03, 5);
    case Op::SB:    return s_type(0);
    case Op::SH:    return s_type(1);
    case Op::SW:    return s_type(2);
    case Op::ADDI:  return i_type(0x13, 0);
    case Op::SLTI:  return i_type(0x13, 2);
    case Op::SLTIU: return i_type(0x13, 3);
    case Op::XORI:  return i_type(0x13, 4);
    case Op::ORI:   return i_type(0x13, 6);
    case Op::ANDI:  return i_type(0x13, 7);
    case Op::SLLI:  return sh_type(1, 0x00);
    case Op::SRLI:  return sh_type(5, 0x00);
    case Op::SRAI:  return sh_type(5, 0x20);
    case Op::ADD:   return r(0x33, 0, 0x00);
    case Op::SUB:   return r(0x33, 0, 0x20);
    case Op::SLL:   return r(0x33, 1, 0x00);
    case Op::SLT:   return r(0x33, 2, 0x00);
    case Op::SLTU:  return r(0x33, 3, 0x00);
    case Op::XOR:   return r(0x33, 4, 0x00);
    case Op::SRL:   return r(0x33, 5, 0x00);
    case Op::SRA:   return r(0x33, 5, 0x20);
    case Op::OR:    return r(0x33, 6, 0x00);
    case Op::AND:   return r(0x33, 7, 0x00);
    case Op::FENCE: return 0x0FF0000Fu;
    case Op::ECALL: return 0x00000073u;
    case Op::EBREAK: return 0x00100073u;
    }
    throw SimError(ErrKind::Internal, "encode: bad op");
}

std::string disassemble(const DecodedInst& d) {
    char buf[64];
    const char* n = op_name(d.op);
    switch (d.op) {
    case Op::LUI:
    case Op::AUIPC:
        std::snprintf(buf, sizeof buf, "%s x%d,0x%x", n, d.rd,
                      (uint32_t)d.imm >> 12);
        break;
    case Op::JAL:
        std::snprintf(buf, sizeof buf, "%s x%d,%d", n, d.rd, d.imm);
        break;
    case Op::JALR:
        std::snprintf(buf, sizeof buf, "%s x%d,x%d,%d", n, d.rd, d.rs1, d.imm);
        break;
    case Op::BEQ: case Op::BNE: case Op::BLT:
    case Op::BGE: case Op::BLTU: case Op::BGEU:
        std::snprintf(buf, sizeof buf, "%s x%d,x%d,%d", n, d.rs1, d.rs2, d.imm);
        break;
    case Op::LB: case Op::LH: case Op::LW: case Op::LBU: case Op::LHU:
        std::snprintf(buf, sizeof buf, "%s x%d,%d(x%d)", n, d.rd, d.imm, d.rs1);
        break;
    case Op::SB: case Op::SH: case Op::SW:
        std::snprintf(buf, sizeof buf, "%s x%d,%d(x%d)", n, d.rs2, d.imm, d.rs1);
        break;
    case Op::SLLI: case Op::SRLI: case Op::SRAI:
        std::snprintf(buf, sizeof buf, "%s x%d,x%d,%d", n, d.rd, d.rs1, d.imm);
        break;
    case Op::ADDI: case Op::SLTI: case Op::SLTIU:
    case Op::XORI: case Op::ORI: case Op::ANDI:
        std::snprintf(buf, sizeof buf, "%s x%d,x%d,%d", n, d.rd, d.rs1, d.imm);
        break;
    case Op::FENCE: case Op::ECALL: case Op::EBREAK:
        std::snprintf(buf, sizeof buf, "%s", n);
        break;
    default: // R-type
        std::snprintf(buf, sizeof buf, "%s x%d,x%d,x%d", n, d.rd, d.rs1, d.rs2);
        break;
    }
    return buf;
}

} // namespace rsdsim
