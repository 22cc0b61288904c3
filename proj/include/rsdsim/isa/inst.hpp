#pragma once
#include <cstdint>
#include <optional>
#include <string>

namespace rsdsim {

enum class Op : uint8_t {
    LUI, AUIPC, JAL, JALR,
    BEQ, BNE, BLT, BGE, BLTU, BGEU,
    LB, LH, LW, LBU, LHU,
    SB, SH, SW,
    ADDI, SLTI, SLTIU, XORI, ORI, ANDI, SLLI, SRLI, SRAI,
    ADD, SUB, SLL, SLT, SLTU, XOR, SRL, SRA, OR, AND,
    FENCE, ECALL, EBREAK,
};

const char* op_name(Op op);

struct DecodedInst {
    Op op = Op::ADDI;
    uint8_t rd = 0;
    uint8_t rs1 = 0;
    uint8_t rs2 = 0;
    int32_t imm = 0;
    uint32_t raw = 0x13; // nop

    bool is_branch() const { return op >= Op::BEQ && op <= Op::BGEU; }
    bool is_jump() const { return op == Op::JAL || op == Op::JALR; }
    bool is_load() const { return op >= Op::LB && op <= Op::LHU; }
    bool is_store() const { return op >= Op::SB && op <= Op::SW; }
    bool is_mem() const { return is_load() || is_store(); }
    bool is_system() const { return op == Op::ECALL || op == Op::EBREAK; }
    // Control flow that can redirect the front end.
    bool is_ctrl() const { return is_branch() || is_jump(); }

    bool has_rd() const {
        return !(is_branch() || is_store() || op == Op::FENCE || is_system());
    }
    bool writes_rd() const { return has_rd() && rd != 0; }
    bool uses_rs1() const {
        return !(op == Op::LUI || op == Op::AUIPC || op == Op::JAL ||
                 op == Op::FENCE || is_system());
    }
    bool uses_rs2() const {
        return is_branch() || is_store() || (op >= Op::ADD && op <= Op::AND);
    }

    bool operator==(const DecodedInst&) const = default;
};

// Strict RV32I decode: anything outside the base integer set (CSR, FENCE.I,
// RV64 widths, reserved funct encodings, shamt bit 25) is rejected.
std::optional<DecodedInst> try_decode(uint32_t word);
DecodedInst decode(uint32_t word); // throws SimError(IllegalInstruction)

// Reassemble a decoded instruction; inverse of decode for every legal word
// (FENCE encodes canonically as 0x0FF0000F).
uint32_t encode(const DecodedInst& inst);

std::string disassemble(const DecodedInst& inst);

} // namespace rsdsim
