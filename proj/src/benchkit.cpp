#include "rsdsim/benchkit.hpp"

#include <algorithm>
#include <cstring>

#include "rsdsim/errors.hpp"
#include "rsdsim/isa/asm.hpp"

namespace rsdsim {
namespace {

constexpr uint32_t kCodeBase = 0x80000000u;
constexpr uint32_t kDataBase = 0x80004000u; // initialized data (when any)
constexpr uint32_t kBufBase = 0x80008000u;  // zero-initialized scratch

// LCG step: x = (1103515245*x + 12345) mod 2^31, no multiply instruction in
// RV32I so the product is built by shift-add over the multiplier's set bits.
// Clobbers t5/t6; `c_reg` must already hold 12345. 33 instructions.
void emit_lcg_step(Asm& a, int xreg, int c_reg) {
    a.mv(t6, xreg); // bit 0 of 0x41C64E6D
    for (int b : {2, 3, 5, 6, 9, 10, 11, 14, 17, 18, 22, 23, 24, 30}) {
        a.op_i(Op::SLLI, t5, xreg, b);
        a.op_r(Op::ADD, t6, t6, t5);
    }
    a.op_r(Op::ADD, t6, t6, c_reg);
    a.op_i(Op::SLLI, t6, t6, 1); // keep the low 31 bits
    a.op_i(Op::SRLI, t6, t6, 1);
    a.mv(xreg, t6);
}

void emit_exit(Asm& a, uint32_t code) {
    a.li(a0, code);
    a.li(a7, 93);
    a.ecall();
}

Program with_code(Asm& a) {
    Program p;
    p.entry = kCodeBase;
    p.segments.push_back({kCodeBase, a.finalize_bytes()});
    return p;
}

// --- BubblesortAsm: sort 250 descending words in place -------------------

Benchmark make_bubblesort() {
    Asm a(kCodeBase);
    a.li(a1, kDataBase);   // array base
    a.op_i(Op::ADDI, t0, x0, 249); // i = n-1
    a.label("outer");
    a.li(t1, 0);           // j
    a.mv(t2, a1);          // &arr[j]
    a.label("inner");
    a.load(Op::LW, t3, 0, t2);
    a.load(Op::LW, t4, 4, t2);
    a.branch(Op::BGE, t4, t3, "noswap"); // in order already
    a.store(Op::SW, t4, 0, t2);
    a.store(Op::SW, t3, 4, t2);
    a.label("noswap");
    a.op_i(Op::ADDI, t1, t1, 1);
    a.op_i(Op::ADDI, t2, t2, 4);
    a.branch(Op::BLT, t1, t0, "inner");
    a.op_i(Op::ADDI, t0, t0, -1);
    a.branch(Op::BNE, t0, x0, "outer");
    emit_exit(a, 0);

    Program p = with_code(a);
    std::vector<uint8_t> data(250 * 4);
    for (uint32_t k = 0; k < 250; ++k) {
        uint32_t v = 250 - k; // descending 250..1
        std::memcpy(&data[4 * k], &v, 4);
    }
    p.segments.push_back({kDataBase, std::move(data)});

    Benchmark b;
    b.name = "BubblesortAsm";
    b.description = "in-place bubble sort of 250 descending words";
    b.program = std::move(p);
    b.expected_exit = 0;
    b.min_committed = 200000;
    b.max_committed = 500000;
    b.expected_result = [](const ArchState& st) {
        for (uint32_t k = 0; k < 250; ++k)
            if (st.memory.peek(kDataBase + 4 * k, 4) != k + 1) return false;
        return st.reg(a0) == 0;
    };
    return b;
}

// --- MemoryRandom: pseudo-random loads/stores over a 64 KiB buffer -------

Benchmark make_memory_random() {
    Asm a(kCodeBase);
    a.li(s1, 1);         // lcg state
    a.li(s2, 0);         // checksum
    a.li(s3, kBufBase);  // buffer (zero-initialized RAM)
    a.li(s4, 4096);      // iterations
    a.li(s5, 12345);     // lcg addend, hoisted
    a.label("loop");
    emit_lcg_step(a, s1, s5);
    // i1 = x & 0x3FFF, as a byte offset: (x << 18) >> 16 == (x & 0x3FFF) * 4
    a.op_i(Op::SLLI, t0, s1, 18);
    a.op_i(Op::SRLI, t0, t0, 16);
    a.op_r(Op::ADD, t0, t0, s3);
    a.load(Op::LW, t1, 0, t0); // v1
    // i2 = (x >> 16) & 0x3FFF
    a.op_i(Op::SRLI, t2, s1, 16);
    a.op_i(Op::SLLI, t2, t2, 18);
    a.op_i(Op::SRLI, t2, t2, 16);
    a.op_r(Op::ADD, t2, t2, s3);
    a.load(Op::LW, t3, 0, t2); // v2
    // chk = chk + v1 + x; chk ^= v2
    a.op_r(Op::ADD, s2, s2, t1);
    a.op_r(Op::ADD, s2, s2, s1);
    a.op_r(Op::XOR, s2, s2, t3);
    // i3 = (x >> 8) & 0x3FFF; mem[i3] = chk
    a.op_i(Op::SRLI, t4, s1, 8);
    a.op_i(Op::SLLI, t4, t4, 18);
    a.op_i(Op::SRLI, t4, t4, 16);
    a.op_r(Op::ADD, t4, t4, s3);
    a.store(Op::SW, s2, 0, t4);
    a.op_i(Op::ADDI, s4, s4, -1);
    a.branch(Op::BNE, s4, x0, "loop");
    emit_exit(a, 0);

    Benchmark b;
    b.name = "MemoryRandom";
    b.description = "4096 pseudo-random load/load/store rounds over 64 KiB";
    b.program = with_code(a);
    b.expected_exit = 0;
    b.min_committed = 180000;
    b.max_committed = 260000;
    b.expected_result = [](const ArchState& st) {
        return st.reg(s2) == 0x76FEFEE8u && st.reg(a0) == 0;
    };
    return b;
}

// --- FibSlow: naive recursive fib(20), result returned as exit code ------

Benchmark make_fib_slow() {
    Asm a(kCodeBase);
    a.li(a0, 20);
    a.jal(ra, "fib");
    a.li(a7, 93);
    a.ecall(); // exit(fib(20)) == exit(6765)
    a.label("fib");
    a.op_i(Op::ADDI, t0, x0, 3);
    a.branch(Op::BLT, a0, t0, "base");
    a.op_i(Op::ADDI, sp, sp, -12);
    a.store(Op::SW, ra, 8, sp);
    a.store(Op::SW, s0, 4, sp);
    a.mv(s0, a0);
    a.op_i(Op::ADDI, a0, s0, -1);
    a.jal(ra, "fib");
    a.store(Op::SW, a0, 0, sp);
    a.op_i(Op::ADDI, a0, s0, -2);
    a.jal(ra, "fib");
    a.load(Op::LW, t1, 0, sp);
    a.op_r(Op::ADD, a0, a0, t1);
    a.load(Op::LW, s0, 4, sp);
    a.load(Op::LW, ra, 8, sp);
    a.op_i(Op::ADDI, sp, sp, 12);
    a.ret();
    a.label("base");
    a.li(a0, 1);
    a.ret();

    Benchmark b;
    b.name = "FibSlow";
    b.description = "naive recursive fib(20); guest exit code is the result";
    b.program = with_code(a);
    b.expected_exit = 6765;
    b.min_committed = 100000;
    b.max_committed = 200000;
    b.expected_result = [](const ArchState& st) { return st.reg(a0) == 6765; };
    return b;
}

// --- FibFast: iterative fib, first 45 terms stored to memory -------------

Benchmark make_fib_fast() {
    Asm a(kCodeBase);
    a.li(t0, 1);          // fib(k)
    a.li(t1, 1);          // fib(k+1)
    a.li(t2, kDataBase);  // output cursor
    a.li(t3, 45);
    a.li(t4, 1); // k
    a.label("loop");
    a.store(Op::SW, t0, 0, t2);
    a.op_r(Op::ADD, t5, t0, t1);
    a.mv(t0, t1);
    a.mv(t1, t5);
    a.op_i(Op::ADDI, t2, t2, 4);
    a.op_i(Op::ADDI, t4, t4, 1);
    a.branch(Op::BGE, t3, t4, "loop");
    emit_exit(a, 0);

    Benchmark b;
    b.name = "FibFast";
    b.description = "iterative Fibonacci, terms 1..45 stored to memory";
    b.program = with_code(a);
    b.expected_exit = 0;
    b.min_committed = 250;
    b.max_committed = 500;
    b.expected_result = [](const ArchState& st) {
        uint32_t fa = 1, fb = 1;
        for (uint32_t k = 0; k < 45; ++k) {
            if (st.memory.peek(kDataBase + 4 * k, 4) != fa) return false;
            uint32_t next = fa + fb;
            fa = fb;
            fb = next;
        }
        return st.reg(a0) == 0;
    };
    return b;
}

// --- IntegerStress: pure ALU mix, no memory traffic ----------------------

Benchmark make_integer_stress() {
    Asm a(kCodeBase);
    a.li(s2, 0);     // acc
    a.li(t0, 1);     // i
    a.li(t1, 50000); // bound
    a.label("loop");
    a.op_r(Op::ADD, s2, s2, t0);  // acc += i
    a.op_r(Op::XOR, s2, s2, t0);  // acc ^= i
    a.op_i(Op::SLLI, t2, t0, 3);
    a.op_r(Op::ADD, s2, s2, t2);  // acc += i << 3
    a.op_i(Op::SRLI, t2, t0, 1);
    a.op_r(Op::SUB, s2, s2, t2);  // acc -= i >> 1
    a.op_i(Op::ANDI, t2, t0, 255);
    a.op_r(Op::OR, s2, s2, t2);   // acc |= i & 255
    a.op_i(Op::ADDI, t0, t0, 1);
    a.branch(Op::BLT, t0, t1, "loop");
    emit_exit(a, 0);

    Benchmark b;
    b.name = "IntegerStress";
    b.description = "ALU-only arithmetic mix, 49999 iterations, no loads/stores";
    b.program = with_code(a);
    b.expected_exit = 0;
    b.min_committed = 450000;
    b.max_committed = 550000;
    b.expected_result = [](const ArchState& st) {
        return st.reg(s2) == 0x79E482FFu && st.reg(a0) == 0;
    };
    return b;
}

// --- BranchMisNever: one perfectly predictable loop branch ---------------

Benchmark make_branch_never() {
    Asm a(kCodeBase);
    a.li(t0, 0);
    a.li(t2, 0);
    a.li(t3, 100000);
    a.label("loop");
    a.op_i(Op::ADDI, t0, t0, 1);
    a.op_i(Op::ADDI, t2, t2, 2);
    a.branch(Op::BLT, t0, t3, "loop");
    emit_exit(a, 0);

    Benchmark b;
    b.name = "BranchMisNever";
    b.description = "tight counted loop; the only branch is near-always taken";
    b.program = with_code(a);
    b.expected_exit = 0;
    b.min_committed = 280000;
    b.max_committed = 320000;
    b.expected_result = [](const ArchState& st) {
        return st.reg(t0) == 100000 && st.reg(t2) == 200000 && st.reg(a0) == 0;
    };
    return b;
}

// --- BranchMisRandom: data-dependent branches on LCG bits ----------------

Benchmark make_branch_random() {
    Asm a(kCodeBase);
    a.li(s1, 1);     // lcg state
    a.li(s2, 0);     // popcount of sampled bits
    a.li(s4, 20000); // iterations
    a.li(s5, 12345); // lcg addend, hoisted
    a.label("loop");
    emit_lcg_step(a, s1, s5);
    a.op_i(Op::SRLI, t0, s1, 30);
    a.op_i(Op::ANDI, t0, t0, 1);
    a.branch(Op::BEQ, t0, x0, "skip1"); // taken when bit 30 clear
    a.op_i(Op::ADDI, s2, s2, 1);
    a.label("skip1");
    a.op_i(Op::SRLI, t1, s1, 18);
    a.op_i(Op::ANDI, t1, t1, 1);
    a.branch(Op::BEQ, t1, x0, "skip2"); // taken when bit 18 clear
    a.op_i(Op::ADDI, s2, s2, 1);
    a.label("skip2");
    a.op_i(Op::ADDI, s4, s4, -1);
    a.branch(Op::BNE, s4, x0, "loop");
    emit_exit(a, 0);

    Benchmark b;
    b.name = "BranchMisRandom";
    b.description = "20000 rounds of branches on pseudo-random bits 30 and 18";
    b.program = with_code(a);
    b.expected_exit = 0;
    b.min_committed = 700000;
    b.max_committed = 950000;
    b.expected_result = [](const ArchState& st) {
        return st.reg(s2) == 20242 && st.reg(a0) == 0;
    };
    return b;
}

} // namespace

std::vector<std::string> bench_list() {
    return {"BubblesortAsm", "MemoryRandom",   "FibSlow",        "FibFast",
            "IntegerStress", "BranchMisNever", "BranchMisRandom"};
}

Benchmark bench_get(const std::string& name) {
    if (name == "BubblesortAsm") return make_bubblesort();
    if (name == "MemoryRandom") return make_memory_random();
    if (name == "FibSlow") return make_fib_slow();
    if (name == "FibFast") return make_fib_fast();
    if (name == "IntegerStress") return make_integer_stress();
    if (name == "BranchMisNever") return make_branch_never();
    if (name == "BranchMisRandom") return make_branch_random();
    throw SimError(ErrKind::BenchMismatch, "unknown benchmark: " + name);
}

FlatImage bench_export_flat(const std::string& name) {
    Benchmark b = bench_get(name);
    const auto& segs = b.program.segments;
    uint32_t lo = UINT32_MAX, hi = 0;
    for (const auto& s : segs) {
        lo = std::min(lo, s.base);
        hi = std::max(hi, s.base + (uint32_t)s.bytes.size());
    }
    FlatImage img;
    img.base = lo;
    img.entry = b.program.entry;
    img.bytes.assign(hi - lo, 0);
    for (const auto& s : segs)
        std::copy(s.bytes.begin(), s.bytes.end(), img.bytes.begin() + (s.base - lo));
    return img;
}

} // namespace rsdsim
