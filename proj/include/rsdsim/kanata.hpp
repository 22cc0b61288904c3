#pragma once
#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>

namespace rsdsim {

// Serializer for the Kanata pipeline-trace text format (header version
// 0004), tab-separated commands, LF line endings. Stage intervals use
// begin/end boundary semantics: E at cycle c closes a stage begun at
// cycle b <= c, and back-to-back stages share the boundary cycle.
class TraceWriter {
public:
    TraceWriter() = default;

    void open(const std::string& path);
    void open(std::ostream& sink); // caller keeps ownership
    bool is_open() const { return sink_ != nullptr; }

    void advance_to(uint64_t cycle);
    void birth(uint64_t id, const std::string& label);
    void stage_begin(uint64_t id, const char* stage);
    void stage_end(uint64_t id, const char* stage);
    void retire(uint64_t id, uint64_t retire_id, bool flushed);
    void close();

    uint64_t cycle() const { return cycle_; }

private:
    void line(const std::string& s);

    std::ostream* sink_ = nullptr;
    std::unique_ptr<std::ofstream> file_;
    uint64_t cycle_ = 0;
    uint64_t pending_delta_ = 0; // C advance buffered until the next event
    uint64_t max_born_id_ = 0;
    bool born_any_ = false;
    bool header_written_ = false;
};

// Trace checker: header, command grammar, S/E alternation per
// (instruction, stage), single retire, and cycle monotonicity.
struct TraceReport {
    bool ok = true;
    uint64_t line_no = 0;   // first offending line (1-based)
    std::string message;    // empty when ok
    uint64_t instructions = 0;
    uint64_t commits = 0;   // R with type 0
    uint64_t flushes = 0;   // R with type 1
};

TraceReport validate_trace(const std::string& bytes);
TraceReport validate_trace_file(const std::string& path);

} // namespace rsdsim
