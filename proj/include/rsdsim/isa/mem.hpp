#pragma once
#include <cstdint>
#include <map>
#include <vector>

namespace rsdsim {

// Sparse little-endian byte-addressable image backed by 4 KiB pages.
// Legal address space = the RAM window plus any explicitly mapped segment.
class SparseMemory {
public:
    SparseMemory(uint32_t ram_base = 0x80000000u, uint32_t ram_size = 16u << 20)
        : ram_base_(ram_base), ram_size_(ram_size) {}

    void map_segment(uint32_t base, uint32_t size);
    bool in_range(uint32_t addr, uint32_t len) const;

    // Checked accessors: throw OutOfImageAccess outside the legal space.
    uint32_t load(uint32_t addr, unsigned width) const; // zero-extended
    void store(uint32_t addr, unsigned width, uint32_t value);

    // Unchecked peek for wrong-path fetch/loads: out-of-range reads 0.
    uint32_t peek(uint32_t addr, unsigned width) const;

    void write_bytes(uint32_t addr, const uint8_t* data, size_t n);
    std::vector<uint8_t> read_bytes(uint32_t addr, size_t n) const; // checked

    uint32_t ram_base() const { return ram_base_; }
    uint32_t ram_size() const { return ram_size_; }

private:
    uint8_t rd8(uint32_t addr) const;
    void wr8(uint32_t addr, uint8_t v);

    static constexpr uint32_t kPageBits = 12;
    static constexpr uint32_t kPageSize = 1u << kPageBits;

    uint32_t ram_base_, ram_size_;
    std::vector<std::pair<uint32_t, uint32_t>> segments_; // [base, base+size)
    std::map<uint32_t, std::vector<uint8_t>> pages_;      // page index -> bytes
};

} // namespace rsdsim
