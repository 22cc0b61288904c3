#pragma once
// Shared scaffolding for the test suites: a tiny RV32I assembler on top of
// encode(), program builders, a Kanata trace dissector and temp-file plumbing.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rsdsim/isa/inst.hpp"
#include "rsdsim/isa/program.hpp"

namespace testutil {

using rsdsim::DecodedInst;
using rsdsim::Op;

inline uint32_t enc(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2, int32_t imm) {
    DecodedInst d;
    d.op = op;
    d.rd = rd;
    d.rs1 = rs1;
    d.rs2 = rs2;
    d.imm = imm;
    return rsdsim::encode(d);
}

inline uint32_t addi(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::ADDI, rd, rs1, 0, imm); }
inline uint32_t add(uint8_t rd, uint8_t rs1, uint8_t rs2) { return enc(Op::ADD, rd, rs1, rs2, 0); }
inline uint32_t sub(uint8_t rd, uint8_t rs1, uint8_t rs2) { return enc(Op::SUB, rd, rs1, rs2, 0); }
inline uint32_t xor_(uint8_t rd, uint8_t rs1, uint8_t rs2) { return enc(Op::XOR, rd, rs1, rs2, 0); }
inline uint32_t slli(uint8_t rd, uint8_t rs1, int32_t sh) { return enc(Op::SLLI, rd, rs1, 0, sh); }
inline uint32_t srli(uint8_t rd, uint8_t rs1, int32_t sh) { return enc(Op::SRLI, rd, rs1, 0, sh); }
inline uint32_t lui(uint8_t rd, uint32_t imm_hi) { return enc(Op::LUI, rd, 0, 0, (int32_t)(imm_hi << 12)); }
inline uint32_t lw(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::LW, rd, rs1, 0, imm); }
inline uint32_t lh(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::LH, rd, rs1, 0, imm); }
inline uint32_t lb(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::LB, rd, rs1, 0, imm); }
inline uint32_t lbu(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::LBU, rd, rs1, 0, imm); }
inline uint32_t lhu(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::LHU, rd, rs1, 0, imm); }
inline uint32_t sw(uint8_t rs2, uint8_t rs1, int32_t imm) { return enc(Op::SW, 0, rs1, rs2, imm); }
inline uint32_t sh(uint8_t rs2, uint8_t rs1, int32_t imm) { return enc(Op::SH, 0, rs1, rs2, imm); }
inline uint32_t sb(uint8_t rs2, uint8_t rs1, int32_t imm) { return enc(Op::SB, 0, rs1, rs2, imm); }
inline uint32_t beq(uint8_t rs1, uint8_t rs2, int32_t off) { return enc(Op::BEQ, 0, rs1, rs2, off); }
inline uint32_t bne(uint8_t rs1, uint8_t rs2, int32_t off) { return enc(Op::BNE, 0, rs1, rs2, off); }
inline uint32_t blt(uint8_t rs1, uint8_t rs2, int32_t off) { return enc(Op::BLT, 0, rs1, rs2, off); }
inline uint32_t jal(uint8_t rd, int32_t off) { return enc(Op::JAL, rd, 0, 0, off); }
inline uint32_t jalr(uint8_t rd, uint8_t rs1, int32_t imm) { return enc(Op::JALR, rd, rs1, 0, imm); }
inline uint32_t ecall() { return 0x00000073u; }
inline uint32_t ebreak() { return 0x00100073u; }

inline std::vector<uint8_t> to_bytes(const std::vector<uint32_t>& words) {
    std::vector<uint8_t> b;
    b.reserve(words.size() * 4);
    for (uint32_t w : words) {
        b.push_back((uint8_t)(w & 0xFF));
        b.push_back((uint8_t)((w >> 8) & 0xFF));
        b.push_back((uint8_t)((w >> 16) & 0xFF));
        b.push_back((uint8_t)((w >> 24) & 0xFF));
    }
    return b;
}

inline rsdsim::Program
make_prog(const std::vector<uint32_t>& words,
          std::vector<std::pair<int, uint32_t>> regs = {},
          uint32_t base = 0x80000000u) {
    rsdsim::Program p;
    p.segments.push_back({base, to_bytes(words)});
    p.entry = base;
    p.initial_regs = std::move(regs);
    p.validate();
    return p;
}

inline void add_data(rsdsim::Program& p, uint32_t base,
                     const std::vector<uint32_t>& words) {
    p.segments.push_back({base, to_bytes(words)});
    p.validate();
}

// --- Kanata trace dissection -------------------------------------------
// Replays C deltas and collects, per instruction id, the begin cycle of
// every stage plus the retire cycle/type. Assumes the trace already passed
// validate_trace; this is a convenience view, not a checker.
struct TraceView {
    struct Inst {
        std::string label;
        std::map<std::string, uint64_t> stage_begin;
        std::map<std::string, uint64_t> stage_end;
        uint64_t retire_cycle = 0;
        uint64_t retire_id = 0;
        int retire_type = -1; // 0 commit, 1 flush, -1 none
    };
    std::map<uint64_t, Inst> insts;
};

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> f;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            f.push_back(line.substr(start));
            break;
        }
        f.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return f;
}

inline TraceView parse_trace(const std::string& text) {
    TraceView v;
    std::istringstream in(text);
    std::string line;
    uint64_t cycle = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f[0] == "C=") {
            cycle = std::stoull(f[1]);
        } else if (f[0] == "C") {
            cycle += std::stoull(f[1]);
        } else if (f[0] == "I") {
            v.insts[std::stoull(f[1])];
        } else if (f[0] == "L") {
            v.insts[std::stoull(f[1])].label = f[3];
        } else if (f[0] == "S") {
            v.insts[std::stoull(f[1])].stage_begin[f[3]] = cycle;
        } else if (f[0] == "E") {
            v.insts[std::stoull(f[1])].stage_end[f[3]] = cycle;
        } else if (f[0] == "R") {
            auto& i = v.insts[std::stoull(f[1])];
            i.retire_cycle = cycle;
            i.retire_id = std::stoull(f[2]);
            i.retire_type = std::stoi(f[3]);
        }
    }
    return v;
}

// --- temp files ----------------------------------------------------------
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& tag) {
        static int counter = 0;
        path = "/tmp/rsdsim_test_" + tag + "_" + std::to_string(++counter);
    }
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& text) const {
        std::ofstream f(path, std::ios::binary);
        f << text;
    }
    void write_bytes(const std::vector<uint8_t>& bytes) const {
        std::ofstream f(path, std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                (std::streamsize)bytes.size());
    }
    std::string read() const {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

} // namespace testutil
