#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rsdsim/isa/mem.hpp"

namespace rsdsim {

struct Program {
    struct Segment {
        uint32_t base = 0;
        std::vector<uint8_t> bytes;
    };
    std::vector<Segment> segments;
    uint32_t entry = 0;
    uint32_t initial_sp = 0; // 0 = top of the RAM window
    // Extra architectural presets applied after sp (reg index, value).
    std::vector<std::pair<int, uint32_t>> initial_regs;

    void validate() const; // non-overlap, entry inside a segment
    void map_into(SparseMemory& mem) const;
};

enum class ImageFormat { FlatBinary, Elf32 };

Program load_program(const std::vector<uint8_t>& bytes, ImageFormat format,
                     uint32_t flat_base = 0x80000000u,
                     uint32_t flat_entry = 0x80000000u);
Program load_program_file(const std::string& path, ImageFormat format,
                          uint32_t flat_base = 0x80000000u,
                          uint32_t flat_entry = 0x80000000u);

} // namespace rsdsim
