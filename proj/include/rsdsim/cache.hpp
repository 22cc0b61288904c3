#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace rsdsim {

struct CacheConfig {
    uint32_t size_bytes = 4096;
    uint32_t associativity = 2;
    uint32_t line_bytes = 8;
    uint32_t hit_latency = 1;
    uint32_t miss_latency = 100;
    uint32_t mshr_count = 2;

    uint32_t sets() const { return size_bytes / (associativity * line_bytes); }
};

enum class AccessKind { Fetch, Load, Store };
enum class AccessOutcome { Hit, MissAllocated, MissMerged, StructuralStall };

struct AccessResult {
    AccessOutcome outcome = AccessOutcome::Hit;
    uint64_t ready_cycle = 0; // absent (0) for StructuralStall
};

// Timing-only L1: tags, validity and replacement state; data correctness
// lives in the functional memory image. Non-blocking via MSHRs.
class L1Cache {
public:
    explicit L1Cache(const CacheConfig& cfg = {});

    // One lookup. StructuralStall means both MSHRs busy on other lines;
    // the caller retries next cycle and the access is not counted.
    AccessResult access(uint32_t addr, AccessKind kind, uint64_t now,
                        uint64_t requester = 0);

    struct Fill {
        uint32_t line_addr;
        std::vector<uint64_t> requesters;
    };
    // Install every fill whose latency expires at `now`. Must be called
    // once per cycle, before that cycle's accesses.
    std::vector<Fill> tick(uint64_t now);

    // Victim the next fill into this set would take (invalid way first,
    // else the PLRU bit). Exposed for the replacement-policy oracle.
    uint32_t plru_victim(uint32_t set) const;
    bool line_valid(uint32_t addr) const;

    struct Counters {
        uint64_t accesses = 0, hits = 0, misses = 0;
        uint64_t mshr_allocations = 0, mshr_merges = 0, structural_stalls = 0;
    };
    const Counters& counters() const { return ctr_; }
    const CacheConfig& config() const { return cfg_; }

private:
    struct Way { bool valid = false; uint32_t tag = 0; };
    struct Set { std::vector<Way> ways; uint32_t plru = 0; };
    struct Mshr {
        bool valid = false;
        uint32_t line_addr = 0;
        uint64_t ready_cycle = 0;
        std::vector<uint64_t> requesters;
    };

    uint32_t line_of(uint32_t addr) const { return addr / cfg_.line_bytes; }
    void touch(Set& set, uint32_t way); // PLRU update after access/fill

    CacheConfig cfg_;
    std::vector<Set> sets_;
    std::vector<Mshr> mshrs_;
    Counters ctr_;
};

} // namespace rsdsim
