#include "rsdsim/cache.hpp"
#include "rsdsim/errors.hpp"

namespace rsdsim {

L1Cache::L1Cache(const CacheConfig& cfg) : cfg_(cfg) {
    if (cfg_.line_bytes == 0 || (cfg_.line_bytes & (cfg_.line_bytes - 1)))
        throw SimError(ErrKind::ConfigError, "line size must be a power of two");
    if (cfg_.associativity == 0 || cfg_.sets() == 0)
        throw SimError(ErrKind::ConfigError, "bad cache geometry");
    if (cfg_.sets() & (cfg_.sets() - 1))
        throw SimError(ErrKind::ConfigError, "set count must be a power of two");
    sets_.resize(cfg_.sets());
    for (auto& s : sets_) s.ways.resize(cfg_.associativity);
    mshrs_.resize(cfg_.mshr_count);
}

void L1Cache::touch(Set& set, uint32_t way) {
    // 2-way tree-PLRU degenerates to a single bit naming the next victim:
    // after touching way w the bit points at the other way.
    set.plru = way ^ 1u;
}

uint32_t L1Cache::plru_victim(uint32_t set_idx) const {
    const Set& set = sets_[set_idx];
    for (uint32_t w = 0; w < set.ways.size(); w++)
        if (!set.ways[w].valid) return w;
    return set.plru;
}

bool L1Cache::line_valid(uint32_t addr) const {
    uint32_t line = line_of(addr);
    const Set& set = sets_[line % cfg_.sets()];
    uint32_t tag = line / cfg_.sets();
    for (auto& w : set.ways)
        if (w.valid && w.tag == tag) return true;
    return false;
}

AccessResult L1Cache::access(uint32_t addr, AccessKind kind, uint64_t now,
                             uint64_t requester) {
    (void)kind; // write-allocate + write-back: stores time like loads
    uint32_t line = line_of(addr);
    Set& set = sets_[line % cfg_.sets()];
    uint32_t tag = line / cfg_.sets();

    for (uint32_t w = 0; w < set.ways.size(); w++) {
        if (set.ways[w].valid && set.ways[w].tag == tag) {
            touch(set, w);
            ctr_.accesses++;
            ctr_.hits++;
            return {AccessOutcome::Hit, now + cfg_.hit_latency};
        }
    }

    for (auto& m : mshrs_) {
        if (m.valid && m.line_addr == line) {
            m.requesters.push_back(requester);
            ctr_.accesses++;
            ctr_.misses++;
            ctr_.mshr_merges++;
            return {AccessOutcome::MissMerged, m.ready_cycle};
        }
    }

    for (auto& m : mshrs_) {
        if (!m.valid) {
            m.valid = true;
            m.line_addr = line;
            m.ready_cycle = now + cfg_.miss_latency;
            m.requesters = {requester};
            ctr_.accesses++;
            ctr_.misses++;
            ctr_.mshr_allocations++;
            return {AccessOutcome::MissAllocated, m.ready_cycle};
        }
    }

    ctr_.structural_stalls++;
    return {AccessOutcome::StructuralStall, 0};
}

std::vector<L1Cache::Fill> L1Cache::tick(uint64_t now) {
    std::vector<Fill> fills;
    for (auto& m : mshrs_) {
        if (!m.valid || m.ready_cycle != now) continue;
        uint32_t set_idx = m.line_addr % cfg_.sets();
        Set& set = sets_[set_idx];
        uint32_t victim = plru_victim(set_idx);
        set.ways[victim] = {true, m.line_addr / cfg_.sets()};
        touch(set, victim);
        fills.push_back({m.line_addr, std::move(m.requesters)});
        m = {};
    }
    return fills;
}

} // namespace rsdsim
