#include "rsdsim/isa/program.hpp"
#include "rsdsim/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace rsdsim {

namespace {

uint16_t rd16(const std::vector<uint8_t>& b, size_t off) {
    return (uint16_t)(b[off] | (b[off + 1] << 8));
}
uint32_t rd32(const std::vector<uint8_t>& b, size_t off) {
    return b[off] | ((uint32_t)b[off + 1] << 8) | ((uint32_t)b[off + 2] << 16) |
           ((uint32_t)b[off + 3] << 24);
}

[[noreturn]] void bad(const std::string& what) {
    throw SimError(ErrKind::MalformedImage, what);
}

Program load_elf32(const std::vector<uint8_t>& b) {
    if (b.size() < 52) bad("elf: truncated header");
    if (!(b[0] == 0x7F && b[1] == 'E' && b[2] == 'L' && b[3] == 'F'))
        bad("elf: bad magic");
    if (b[4] != 1) bad("elf: not 32-bit class");
    if (b[5] != 1) bad("elf: not little-endian");
    if (rd16(b, 18) != 243) bad("elf: machine is not RISC-V");
    uint32_t entry = rd32(b, 24);
    uint32_t phoff = rd32(b, 28);
    uint16_t phentsize = rd16(b, 42);
    uint16_t phnum = rd16(b, 44);
    if (phentsize < 32) bad("elf: bad program header size");

    Program p;
    p.entry = entry;
    for (uint16_t i = 0; i < phnum; i++) {
        size_t ph = (size_t)phoff + (size_t)i * phentsize;
        if (ph + 32 > b.size()) bad("elf: truncated program headers");
        uint32_t type = rd32(b, ph + 0);
        if (type != 1) continue; // PT_LOAD only
        uint32_t offset = rd32(b, ph + 4);
        uint32_t vaddr = rd32(b, ph + 8);
        uint32_t filesz = rd32(b, ph + 16);
        uint32_t memsz = rd32(b, ph + 20);
        if ((size_t)offset + filesz > b.size()) bad("elf: truncated segment");
        if (memsz < filesz) bad("elf: memsz < filesz");
        Program::Segment seg;
        seg.base = vaddr;
        seg.bytes.assign(b.begin() + offset, b.begin() + offset + filesz);
        seg.bytes.resize(memsz, 0); // BSS tail
        if (!seg.bytes.empty()) p.segments.push_back(std::move(seg));
    }
    if (p.segments.empty()) bad("elf: no loadable segments");
    p.validate();
    return p;
}

} // namespace

void Program::validate() const {
    std::vector<std::pair<uint64_t, uint64_t>> spans;
    for (auto& s : segments)
        spans.emplace_back(s.base, (uint64_t)s.base + s.bytes.size());
    std::sort(spans.begin(), spans.end());
    for (size_t i = 1; i < spans.size(); i++)
        if (spans[i].first < spans[i - 1].second)
            throw SimError(ErrKind::MalformedImage, "overlapping segments");
    for (auto& s : segments)
        if (entry >= s.base && entry < s.base + s.bytes.size()) return;
    throw SimError(ErrKind::MalformedImage, "entry outside all segments");
}

void Program::map_into(SparseMemory& mem) const {
    for (auto& s : segments) {
        mem.map_segment(s.base, (uint32_t)s.bytes.size());
        mem.write_bytes(s.base, s.bytes.data(), s.bytes.size());
    }
}

Program load_program(const std::vector<uint8_t>& bytes, ImageFormat format,
                     uint32_t flat_base, uint32_t flat_entry) {
    if (format == ImageFormat::Elf32) return load_elf32(bytes);
    if (bytes.empty())
        throw SimError(ErrKind::MalformedImage, "flat: empty image");
    Program p;
    p.segments.push_back({flat_base, bytes});
    p.entry = flat_entry;
    p.validate();
    return p;
}

Program load_program_file(const std::string& path, ImageFormat format,
                          uint32_t flat_base, uint32_t flat_entry) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SimError(ErrKind::MalformedImage, "cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return load_program(bytes, format, flat_base, flat_entry);
}

} // namespace rsdsim
