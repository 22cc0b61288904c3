#pragma once
#include <stdexcept>
#include <string>

namespace rsdsim {

// All simulator failures funnel through SimError so the CLI can map
// error kinds onto process exit codes without string matching.
enum class ErrKind {
    IllegalInstruction,   // decode rejected the word, or a trapping opcode retired
    MisalignedAccess,     // load/store address not a multiple of its width
    OutOfImageAccess,     // access outside loaded segments and the RAM window
    UnsupportedSyscall,   // ECALL with an a7 outside {64, 93}
    MalformedImage,       // program image unreadable / malformed
    ConfigError,          // bad config file, CLI usage, or invalid value
    Divergence,           // timing model and functional oracle disagree
    Deadlock,             // no commit inside the watchdog window
    CycleLimit,           // max-cycles exhausted
    TraceInvalid,         // trace validator rejected a file
    BenchMismatch,        // benchmark sets differ or benchmark unknown
    StaleCheckpoint,      // predictor recovery on a superseded checkpoint
    Internal,             // invariant breakage inside the model itself
};

class SimError : public std::runtime_error {
public:
    SimError(ErrKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrKind kind() const { return kind_; }
private:
    ErrKind kind_;
};

} // namespace rsdsim
