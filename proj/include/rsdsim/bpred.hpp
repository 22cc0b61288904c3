#pragma once
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace rsdsim {

struct BpredConfig {
    uint32_t pht_entries = 2048;
    uint32_t history_bits = 11; // log2(pht_entries)
    uint32_t btb_entries = 1024;
};

struct PredictorCheckpoint {
    uint32_t saved_ghr = 0;
    uint64_t tag = 0; // identifies the predicting branch
};

struct Prediction {
    bool taken = false;
    std::optional<uint32_t> target; // empty on BTB miss
    PredictorCheckpoint checkpoint;
};

// gshare + direct-mapped BTB with speculative global history and
// checkpoint recovery. The PHT is trained only at commit, in program
// order, against a separate retired history register.
class GshareBtb {
public:
    explicit GshareBtb(const BpredConfig& cfg = {});

    // Conditional branches only: speculatively shifts ghr and issues a
    // checkpoint. Unconditional flow uses btb_lookup instead.
    Prediction predict(uint32_t pc);
    std::optional<uint32_t> btb_lookup(uint32_t pc) const;

    // Commit-order training for a conditional branch.
    void update_commit(uint32_t pc, bool outcome, uint32_t target);
    // Commit of JAL/JALR: BTB target only, no direction state.
    void update_commit_jump(uint32_t pc, uint32_t target);

    // Mispredict recovery: ghr := checkpoint value with the actual
    // outcome shifted in; every younger checkpoint dies. Throws
    // StaleCheckpoint if the checkpoint was already superseded.
    void recover(const PredictorCheckpoint& cp, bool actual);

    // Non-branch flush point (e.g. memory violation): restore ghr
    // wholesale and drop checkpoints with tag >= from_tag.
    void restore_history(uint32_t ghr, uint64_t from_tag);

    // A predicted branch left the ROB without needing its checkpoint.
    void release(uint64_t tag);

    uint32_t ghr() const { return ghr_; }
    uint32_t pht_index(uint32_t pc, uint32_t history) const;
    uint8_t counter(uint32_t index) const { return pht_[index]; }
    uint64_t next_tag() const { return next_tag_; }

private:
    BpredConfig cfg_;
    uint32_t ghr_mask_;
    std::vector<uint8_t> pht_; // 2-bit counters, init 1 (weakly not-taken)
    struct BtbEntry { bool valid = false; uint32_t tag = 0; uint32_t target = 0; };
    std::vector<BtbEntry> btb_;
    uint32_t ghr_ = 0;         // speculative history
    uint32_t retired_ghr_ = 0; // commit-order history for PHT indexing
    uint64_t next_tag_ = 1;
    std::set<uint64_t> live_tags_;
};

} // namespace rsdsim
