#include "rsdsim/bpred.hpp"
#include "rsdsim/errors.hpp"

#include <cassert>

namespace rsdsim {

GshareBtb::GshareBtb(const BpredConfig& cfg) : cfg_(cfg) {
    if (cfg_.pht_entries == 0 || (cfg_.pht_entries & (cfg_.pht_entries - 1)))
        throw SimError(ErrKind::ConfigError, "pht entries must be a power of two");
    if (cfg_.btb_entries == 0 || (cfg_.btb_entries & (cfg_.btb_entries - 1)))
        throw SimError(ErrKind::ConfigError, "btb entries must be a power of two");
    if (cfg_.history_bits == 0 || cfg_.history_bits > 31)
        throw SimError(ErrKind::ConfigError, "bad history length");
    ghr_mask_ = (1u << cfg_.history_bits) - 1;
    pht_.assign(cfg_.pht_entries, 1); // weakly not-taken
    btb_.assign(cfg_.btb_entries, {});
}

uint32_t GshareBtb::pht_index(uint32_t pc, uint32_t history) const {
    uint32_t idx = ((pc >> 2) ^ history) & (cfg_.pht_entries - 1);
    assert(idx < cfg_.pht_entries);
    return idx;
}

Prediction GshareBtb::predict(uint32_t pc) {
    Prediction p;
    p.taken = pht_[pht_index(pc, ghr_)] >= 2;
    p.target = btb_lookup(pc);
    p.checkpoint = {ghr_, next_tag_++};
    live_tags_.insert(p.checkpoint.tag);
    ghr_ = ((ghr_ << 1) | (p.taken ? 1u : 0u)) & ghr_mask_;
    return p;
}

std::optional<uint32_t> GshareBtb::btb_lookup(uint32_t pc) const {
    uint32_t idx = (pc >> 2) & (cfg_.btb_entries - 1);
    assert(idx < cfg_.btb_entries);
    const BtbEntry& e = btb_[idx];
    if (e.valid && e.tag == pc >> 12) return e.target;
    return std::nullopt;
}

void GshareBtb::update_commit(uint32_t pc, bool outcome, uint32_t target) {
    uint8_t& ctr = pht_[pht_index(pc, retired_ghr_)];
    if (outcome) { if (ctr < 3) ctr++; }
    else         { if (ctr > 0) ctr--; }
    retired_ghr_ = ((retired_ghr_ << 1) | (outcome ? 1u : 0u)) & ghr_mask_;
    if (outcome) {
        uint32_t idx = (pc >> 2) & (cfg_.btb_entries - 1);
        btb_[idx] = {true, pc >> 12, target};
    }
}

void GshareBtb::update_commit_jump(uint32_t pc, uint32_t target) {
    uint32_t idx = (pc >> 2) & (cfg_.btb_entries - 1);
    btb_[idx] = {true, pc >> 12, target};
}

void GshareBtb::recover(const PredictorCheckpoint& cp, bool actual) {
    if (!live_tags_.count(cp.tag))
        throw SimError(ErrKind::StaleCheckpoint, "recovery on a dead checkpoint");
    ghr_ = ((cp.saved_ghr << 1) | (actual ? 1u : 0u)) & ghr_mask_;
    // The recovering branch's own checkpoint and everything younger die.
    live_tags_.erase(live_tags_.lower_bound(cp.tag), live_tags_.end());
}

void GshareBtb::restore_history(uint32_t ghr, uint64_t from_tag) {
    ghr_ = ghr & ghr_mask_;
    live_tags_.erase(live_tags_.lower_bound(from_tag), live_tags_.end());
}

void GshareBtb::release(uint64_t tag) {
    live_tags_.erase(tag);
}

} // namespace rsdsim
