#include "rsdsim/isa/mem.hpp"
#include "rsdsim/errors.hpp"

#include <cstdio>

namespace rsdsim {

void SparseMemory::map_segment(uint32_t base, uint32_t size) {
    if (size) segments_.emplace_back(base, size);
}

bool SparseMemory::in_range(uint32_t addr, uint32_t len) const {
    if (len == 0) return true;
    uint32_t end = addr + len - 1;
    if (end < addr) return false; // wrap
    auto covers = [&](uint32_t b, uint32_t s) {
        return s != 0 && addr >= b && end <= b + (s - 1);
    };
    if (covers(ram_base_, ram_size_)) return true;
    for (auto& [b, s] : segments_)
        if (covers(b, s)) return true;
    return false;
}

uint8_t SparseMemory::rd8(uint32_t addr) const {
    auto it = pages_.find(addr >> kPageBits);
    if (it == pages_.end()) return 0;
    return it->second[addr & (kPageSize - 1)];
}

void SparseMemory::wr8(uint32_t addr, uint8_t v) {
    auto& page = pages_[addr >> kPageBits];
    if (page.empty()) page.resize(kPageSize, 0);
    page[addr & (kPageSize - 1)] = v;
}

uint32_t SparseMemory::load(uint32_t addr, unsigned width) const {
    if (!in_range(addr, width)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "load of %u bytes at 0x%08X", width, addr);
        throw SimError(ErrKind::OutOfImageAccess, buf);
    }
    return peek(addr, width);
}

uint32_t SparseMemory::peek(uint32_t addr, unsigned width) const {
    uint32_t v = 0;
    for (unsigned i = 0; i < width; i++)
        v |= (uint32_t)rd8(addr + i) << (8 * i);
    return v;
}

void SparseMemory::store(uint32_t addr, unsigned width, uint32_t value) {
    if (!in_range(addr, width)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "store of %u bytes at 0x%08X", width, addr);
        throw SimError(ErrKind::OutOfImageAccess, buf);
    }
    for (unsigned i = 0; i < width; i++)
        wr8(addr + i, (uint8_t)(value >> (8 * i)));
}

void SparseMemory::write_bytes(uint32_t addr, const uint8_t* data, size_t n) {
    for (size_t i = 0; i < n; i++)
        wr8(addr + (uint32_t)i, data[i]);
}

std::vector<uint8_t> SparseMemory::read_bytes(uint32_t addr, size_t n) const {
    if (n && !in_range(addr, (uint32_t)n)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "read of %zu bytes at 0x%08X", n, addr);
        throw SimError(ErrKind::OutOfImageAccess, buf);
    }
    std::vector<uint8_t> out(n);
    for (size_t i = 0; i < n; i++)
        out[i] = rd8(addr + (uint32_t)i);
    return out;
}

} // namespace rsdsim
