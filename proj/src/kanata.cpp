#include "rsdsim/kanata.hpp"
#include "rsdsim/errors.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <unordered_map>
#include <vector>

namespace rsdsim {

namespace {

const std::array<const char*, 10> kStages = {
    "F", "D", "Rn", "Ds", "Is", "RR", "X", "Ma", "Wb", "Cm",
};

int stage_index(const std::string& s) {
    for (size_t i = 0; i < kStages.size(); i++)
        if (s == kStages[i]) return (int)i;
    return -1;
}

} // namespace

void TraceWriter::open(const std::string& path) {
    if (sink_) throw SimError(ErrKind::ConfigError, "trace writer already open");
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) {
        file_.reset();
        throw SimError(ErrKind::ConfigError, "cannot open trace sink " + path);
    }
    open(*file_);
}

void TraceWriter::open(std::ostream& sink) {
    if (header_written_)
        throw SimError(ErrKind::ConfigError, "trace writer already open");
    sink_ = &sink;
    *sink_ << "Kanata\t0004\n" << "C=\t0\n";
    cycle_ = 0;
    header_written_ = true;
}

void TraceWriter::line(const std::string& s) {
    if (!sink_) throw SimError(ErrKind::Internal, "trace event before open");
    if (pending_delta_) {
        *sink_ << "C\t" << pending_delta_ << "\n";
        pending_delta_ = 0;
    }
    *sink_ << s << "\n";
}

void TraceWriter::advance_to(uint64_t cycle) {
    if (!sink_) throw SimError(ErrKind::Internal, "trace event before open");
    if (cycle < cycle_)
        throw SimError(ErrKind::Internal, "out-of-order trace cycle");
    pending_delta_ += cycle - cycle_;
    cycle_ = cycle;
}

void TraceWriter::birth(uint64_t id, const std::string& label) {
    if (born_any_ && id <= max_born_id_)
        throw SimError(ErrKind::Internal, "trace birth id not increasing");
    max_born_id_ = id;
    born_any_ = true;
    line("I\t" + std::to_string(id) + "\t" + std::to_string(id) + "\t0");
    line("L\t" + std::to_string(id) + "\t0\t" + label);
}

void TraceWriter::stage_begin(uint64_t id, const char* stage) {
    if (!born_any_ || id > max_born_id_)
        throw SimError(ErrKind::Internal, "trace stage event before birth");
    line("S\t" + std::to_string(id) + "\t0\t" + stage);
}

void TraceWriter::stage_end(uint64_t id, const char* stage) {
    if (!born_any_ || id > max_born_id_)
        throw SimError(ErrKind::Internal, "trace stage event before birth");
    line("E\t" + std::to_string(id) + "\t0\t" + stage);
}

void TraceWriter::retire(uint64_t id, uint64_t retire_id, bool flushed) {
    if (!born_any_ || id > max_born_id_)
        throw SimError(ErrKind::Internal, "trace retire before birth");
    line("R\t" + std::to_string(id) + "\t" + std::to_string(retire_id) + "\t" +
         (flushed ? "1" : "0"));
}

void TraceWriter::close() {
    if (file_) file_->flush();
    sink_ = nullptr;
    file_.reset();
}

namespace {

struct InstState {
    uint16_t open_mask = 0;
    bool retired = false;
};

bool parse_u64(const std::string& s, uint64_t& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

} // namespace

TraceReport validate_trace(const std::string& bytes) {
    TraceReport rep;
    auto fail = [&](uint64_t ln, const std::string& msg) {
        rep.ok = false;
        rep.line_no = ln;
        rep.message = msg;
        return rep;
    };

    if (bytes.empty()) return fail(0, "empty trace");

    std::unordered_map<uint64_t, InstState> insts;
    uint64_t cycle = 0;
    bool cycle_set = false;
    uint64_t line_no = 0;
    size_t pos = 0;

    while (pos < bytes.size()) {
        size_t nl = bytes.find('\n', pos);
        line_no++;
        if (nl == std::string::npos)
            return fail(line_no, "unexpected end of input");
        std::string ln = bytes.substr(pos, nl - pos);
        pos = nl + 1;

        std::vector<std::string> f;
        size_t start = 0;
        while (true) {
            size_t tab = ln.find('\t', start);
            if (tab == std::string::npos) { f.push_back(ln.substr(start)); break; }
            f.push_back(ln.substr(start, tab - start));
            start = tab + 1;
        }

        if (line_no == 1) {
            if (f.size() != 2 || f[0] != "Kanata" || f[1] != "0004")
                return fail(1, "bad header, expected Kanata\\t0004");
            continue;
        }
        if (f.empty() || f[0].empty())
            return fail(line_no, "empty command");

        const std::string& cmd = f[0];
        uint64_t a = 0, b = 0;

        if (cmd == "C=") {
            if (f.size() != 2 || !parse_u64(f[1], a))
                return fail(line_no, "malformed C= command");
            if (cycle_set && a < cycle)
                return fail(line_no, "cycle moved backwards");
            cycle = a;
            cycle_set = true;
        } else if (cmd == "C") {
            if (f.size() != 2 || !parse_u64(f[1], a))
                return fail(line_no, "malformed C command");
            if (!cycle_set) return fail(line_no, "C before C=");
            if (a == 0) return fail(line_no, "zero cycle advance");
            cycle += a;
        } else if (cmd == "I") {
            if (f.size() != 4 || !parse_u64(f[1], a) || !parse_u64(f[2], b))
                return fail(line_no, "malformed I command");
            if (insts.count(a)) return fail(line_no, "instruction born twice");
            insts.emplace(a, InstState{});
            rep.instructions++;
        } else if (cmd == "L") {
            if (f.size() != 4 || !parse_u64(f[1], a))
                return fail(line_no, "malformed L command");
            if (!insts.count(a)) return fail(line_no, "label before birth");
        } else if (cmd == "S" || cmd == "E") {
            if (f.size() != 4 || !parse_u64(f[1], a))
                return fail(line_no, "malformed stage command");
            auto it = insts.find(a);
            if (it == insts.end()) return fail(line_no, "stage event before birth");
            if (it->second.retired) return fail(line_no, "stage event after retire");
            int si = stage_index(f[3]);
            if (si < 0) return fail(line_no, "unknown stage label " + f[3]);
            uint16_t bit = (uint16_t)(1u << si);
            if (cmd == "S") {
                if (it->second.open_mask & bit)
                    return fail(line_no, "stage begun twice: " + f[3]);
                it->second.open_mask |= bit;
            } else {
                if (!(it->second.open_mask & bit))
                    return fail(line_no, "stage end without begin: " + f[3]);
                it->second.open_mask &= (uint16_t)~bit;
            }
        } else if (cmd == "R") {
            if (f.size() != 4 || !parse_u64(f[1], a) || !parse_u64(f[2], b))
                return fail(line_no, "malformed R command");
            auto it = insts.find(a);
            if (it == insts.end()) return fail(line_no, "retire before birth");
            if (it->second.retired) return fail(line_no, "retired twice");
            if (it->second.open_mask)
                return fail(line_no, "retire with open stage");
            if (f[3] != "0" && f[3] != "1")
                return fail(line_no, "bad retire type");
            it->second.retired = true;
            if (f[3] == "0") rep.commits++; else rep.flushes++;
        } else {
            return fail(line_no, "unknown command " + cmd);
        }
    }

    for (auto& [id, st] : insts) {
        if (!st.retired)
            return fail(line_no, "instruction " + std::to_string(id) +
                                     " never retired");
    }
    return rep;
}

TraceReport validate_trace_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        TraceReport rep;
        rep.ok = false;
        rep.message = "cannot open " + path;
        return rep;
    }
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    return validate_trace(bytes);
}

} // namespace rsdsim
