#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <string>
#include <vector>

#include "rsdsim/benchkit.hpp"
#include "rsdsim/errors.hpp"
#include "rsdsim/isa/executor.hpp"
#include "rsdsim/isa/program.hpp"

using namespace rsdsim;

namespace {

// The LCG all pseudo-random benchmarks share: x = (1103515245 x + 12345)
// mod 2^31, seeded with 1. First draws frozen from the reference script.
const uint32_t kLcgDraws[5] = {1103527590u, 377401575u, 662824084u,
                               1147902781u, 2035015474u};

uint32_t lcg_next(uint32_t x) {
    return (uint32_t)((1103515245ull * x + 12345ull) & 0x7FFFFFFFull);
}

} // namespace

TEST_CASE("bench_list: the seven canonical names, in canonical order") {
    std::vector<std::string> want = {
        "BubblesortAsm", "MemoryRandom",   "FibSlow",        "FibFast",
        "IntegerStress", "BranchMisNever", "BranchMisRandom"};
    CHECK(bench_list() == want);
}

TEST_CASE("bench_get: unknown names raise BenchMismatch") {
    try {
        bench_get("NoSuchBench");
        FAIL("unknown benchmark accepted");
    } catch (const SimError& e) {
        CHECK(e.kind() == ErrKind::BenchMismatch);
        CHECK(std::string(e.what()).find("NoSuchBench") != std::string::npos);
    }
}

TEST_CASE("LCG reference draws are frozen") {
    uint32_t x = 1;
    for (uint32_t want : kLcgDraws) {
        x = lcg_next(x);
        CHECK(x == want);
    }
}

TEST_CASE("every benchmark passes its own functional oracle") {
    for (const std::string& name : bench_list()) {
        CAPTURE(name);
        Benchmark b = bench_get(name);
        CHECK(b.name == name);
        CHECK_FALSE(b.description.empty());
        CHECK(b.min_committed < b.max_committed);
        b.program.validate();

        Executor ex(b.program);
        ex.run(2'000'000);
        REQUIRE(ex.exited());
        CHECK(ex.exit_code() == b.expected_exit);
        CHECK(ex.steps() >= b.min_committed);
        CHECK(ex.steps() <= b.max_committed);
        REQUIRE(b.expected_result);
        CHECK(b.expected_result(ex.state()));
    }
}

TEST_CASE("expected exits: FibSlow returns fib(20), the rest return 0") {
    for (const std::string& name : bench_list()) {
        Benchmark b = bench_get(name);
        if (name == "FibSlow")
            CHECK(b.expected_exit == 6765);
        else
            CHECK(b.expected_exit == 0);
    }
}

TEST_CASE("predicates actually discriminate: tampered state fails") {
    SUBCASE("FibSlow checks a0 == 6765") {
        Benchmark b = bench_get("FibSlow");
        Executor ex(b.program);
        ex.run(2'000'000);
        REQUIRE(b.expected_result(ex.state()));
        ex.state().set_reg(10, 6764);
        CHECK_FALSE(b.expected_result(ex.state()));
    }
    SUBCASE("MemoryRandom checks the frozen checksum") {
        Benchmark b = bench_get("MemoryRandom");
        Executor ex(b.program);
        ex.run(2'000'000);
        REQUIRE(b.expected_result(ex.state()));
        CHECK(ex.state().reg(18) == 0x76FEFEE8u); // s2
        ex.state().set_reg(18, 0x76FEFEE9u);
        CHECK_FALSE(b.expected_result(ex.state()));
    }
    SUBCASE("BubblesortAsm checks the sorted array in memory") {
        Benchmark b = bench_get("BubblesortAsm");
        Executor ex(b.program);
        ex.run(2'000'000);
        REQUIRE(b.expected_result(ex.state()));
        // Swap two sorted words back: the predicate must notice.
        uint32_t lo = ex.state().memory.load(0x80004000u, 4);
        uint32_t hi = ex.state().memory.load(0x80004004u, 4);
        ex.state().memory.store(0x80004000u, 4, hi);
        ex.state().memory.store(0x80004004u, 4, lo);
        CHECK_FALSE(b.expected_result(ex.state()));
    }
    SUBCASE("BranchMisRandom checks the frozen taken-count") {
        Benchmark b = bench_get("BranchMisRandom");
        Executor ex(b.program);
        ex.run(2'000'000);
        REQUIRE(ex.state().reg(18) == 20242); // s2 = taken count
        ex.state().set_reg(18, 20243);
        CHECK_FALSE(b.expected_result(ex.state()));
    }
}

TEST_CASE("flat export round-trips through the raw loader") {
    for (const std::string& name : bench_list()) {
        CAPTURE(name);
        Benchmark b = bench_get(name);
        FlatImage img = bench_export_flat(name);
        CHECK(img.base != 0);
        CHECK_FALSE(img.bytes.empty());

        Program p = load_program(img.bytes, ImageFormat::FlatBinary, img.base,
                                 img.entry);
        Executor flat(p);
        flat.run(2'000'000);

        Executor direct(b.program);
        direct.run(2'000'000);

        CHECK(flat.exit_code() == direct.exit_code());
        CHECK(flat.steps() == direct.steps());
        CHECK(b.expected_result(flat.state()));
    }
    CHECK_THROWS_AS(bench_export_flat("NoSuchBench"), SimError);
}

TEST_CASE("benchmark programs are self-contained: no initial registers") {
    // Flat export cannot carry register presets, so the embedded programs
    // must not rely on any (the sp default is applied by the Executor).
    for (const std::string& name : bench_list()) {
        Benchmark b = bench_get(name);
        CHECK(b.program.initial_regs.empty());
    }
}
