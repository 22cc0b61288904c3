#include "rsdsim/core/core.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>
#include <utility>

#include "rsdsim/errors.hpp"

namespace rsdsim {

namespace {

// "Not scheduled" sentinel for wakeup/ready cycle stamps. Far below the
// uint64 ceiling so `stamp + small_k` can never wrap.
constexpr uint64_t kNever = std::numeric_limits<uint64_t>::max() / 4;

[[noreturn]] void misaligned_at(const char* what, uint32_t addr) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s at 0x%08X", what, addr);
    throw SimError(ErrKind::MisalignedAccess, buf);
}

uint32_t masked(uint32_t value, unsigned width) {
    return width == 4 ? value : (value & ((1u << (8 * width)) - 1));
}

bool ranges_overlap(uint32_t a, unsigned wa, uint32_t b, unsigned wb) {
    return a < b + wb && b < a + wa;
}

// [inner, inner+wi) fully inside [outer, outer+wo)
bool range_covers(uint32_t outer, unsigned wo, uint32_t inner, unsigned wi) {
    return outer <= inner && inner + wi <= outer + wo;
}

} // namespace

struct Core::Impl {
    // ------------------------------------------------------------------
    // In-flight record types
    // ------------------------------------------------------------------

    enum class St : uint8_t { Dispatched, Issued, Executed, Completed };

    // A fetched slot between the I-cache and rename.
    struct Slot {
        uint64_t seq = 0;
        uint32_t pc = 0;
        uint32_t raw = 0;
        bool fault = false; // misaligned / out-of-image / illegal / ebreak
        DecodedInst di{};   // valid iff !fault or the ebreak case

        // Prediction metadata stamped at pre-decode, before this slot's
        // own prediction (if any) mutates the speculative history.
        bool predicted_taken = false; // raw gshare direction, cond only
        uint32_t followed_next = 0;   // pc the front end fetched after this
        bool has_cp = false;
        PredictorCheckpoint cp{};
        uint32_t ghr_snap = 0;
        uint64_t tag_horizon = 0;

        // Fetch progress.
        bool access_granted = false;
        uint64_t fetch_ready = 0;
    };

    struct Group {
        std::vector<Slot> slots;
        bool predecoded = false;
    };

    struct Rob {
        uint64_t seq = 0;
        uint32_t pc = 0;
        uint32_t raw = 0;
        DecodedInst di{};
        bool fault = false;

        // Renaming.
        bool has_dest = false;
        uint8_t arch_rd = 0;
        uint16_t new_preg = 0;
        uint16_t old_preg = 0;
        int16_t ps1 = -1; // physical sources, -1 = not used
        int16_t ps2 = -1;

        St state = St::Dispatched;
        uint64_t issue_cycle = 0;

        bool is_load = false;
        bool is_store = false;
        bool is_ctrl = false;
        bool is_ecall = false;
        bool mem_port = false;

        // Control metadata (from the slot).
        bool predicted_taken = false;
        uint32_t followed_next = 0;
        bool has_cp = false;
        PredictorCheckpoint cp{};
        uint32_t ghr_snap = 0;
        uint64_t tag_horizon = 0;

        // Resolved at execute.
        bool taken = false;
        uint32_t actual_next = 0;
        uint32_t value = 0;       // rd payload for non-loads
        bool caused_flush = false; // this branch won a pipeline flush
    };

    struct Lq {
        uint64_t seq = 0;
        uint32_t pc = 0;
        Op op = Op::LW;
        bool addr_known = false;
        uint32_t addr = 0;
        unsigned width = 0;
        uint64_t addr_cycle = kNever; // cycle the address becomes visible
        bool value_captured = false;
        uint32_t value = 0;
        std::optional<uint64_t> fwd_from; // store seq that forwarded
        bool bypassed_unknown = false;    // speculated past an unknown store
        bool did_access = false;          // touched the D-cache
        uint64_t ready_cycle = kNever;
    };

    struct Sq {
        uint64_t seq = 0;
        uint32_t pc = 0;
        Op op = Op::SW;
        bool addr_known = false;
        uint32_t addr = 0;
        unsigned width = 0;
        uint64_t addr_cycle = kNever;
        uint32_t data = 0; // raw rs2, captured at the AGU
    };

    struct WbReq {
        uint64_t seq = 0;
        uint64_t ready = 0;
    };

    struct FlushReq {
        uint64_t kill_from = 0; // first seq to squash (inclusive)
        uint64_t src_seq = 0;
        uint32_t redirect = 0;
        bool mispredict = false; // else memory-order violation
        // Conditional-branch recovery goes through the checkpoint;
        // JALR / violation recovery restores a raw history snapshot.
        bool cond = false;
        PredictorCheckpoint cp{};
        bool actual = false;
        uint32_t ghr = 0;
        uint64_t horizon = 0;
        uint32_t victim_pc = 0; // violation: MDP training address
    };

    // ------------------------------------------------------------------
    // Kanata plumbing. The window gates births only: an instruction born
    // inside [start, end) is traced through retirement, everything else
    // is invisible to every method here.
    // ------------------------------------------------------------------
    struct Tracer {
        TraceWriter* w = nullptr;
        uint64_t start = 0;
        uint64_t end = UINT64_MAX;
        std::map<uint64_t, const char*> live; // seq -> current stage
        std::map<uint64_t, std::vector<std::pair<uint64_t, const char*>>> sched;
        std::map<uint64_t, std::vector<std::pair<uint64_t, uint64_t>>> retires;
        bool finalized = false;

        void born(uint64_t cyc, uint64_t seq, const std::string& label) {
            if (!w || cyc < start || cyc >= end) return;
            w->advance_to(cyc);
            w->birth(seq, label);
            w->stage_begin(seq, "F");
            live.emplace(seq, "F");
        }
        void move(uint64_t cyc, uint64_t seq, const char* stage) {
            auto it = live.find(seq);
            if (!w || it == live.end()) return;
            w->advance_to(cyc);
            w->stage_end(seq, it->second);
            w->stage_begin(seq, stage);
            it->second = stage;
        }
        void sched_move(uint64_t cyc, uint64_t seq, const char* stage) {
            if (!w || !live.count(seq)) return;
            sched[cyc].push_back({seq, stage});
        }
        // Close Cm and emit the retire one cycle after commit.
        void commit(uint64_t cyc, uint64_t seq, uint64_t commit_id) {
            auto it = live.find(seq);
            if (!w || it == live.end()) return;
            move(cyc, seq, "Cm");
            retires[cyc + 1].push_back({seq, commit_id});
        }
        void flush(uint64_t cyc, uint64_t seq) {
            auto it = live.find(seq);
            if (!w || it == live.end()) return;
            w->advance_to(cyc);
            w->stage_end(seq, it->second);
            w->retire(seq, 0, true);
            live.erase(it);
        }
        void drain(uint64_t cyc) {
            if (!w) return;
            if (auto it = sched.find(cyc); it != sched.end()) {
                auto moves = std::move(it->second);
                sched.erase(it);
                for (auto& [seq, stage] : moves) move(cyc, seq, stage);
            }
            if (auto it = retires.find(cyc); it != retires.end()) {
                auto done = std::move(it->second);
                retires.erase(it);
                for (auto& [seq, id] : done) {
                    auto l = live.find(seq);
                    if (l == live.end()) continue;
                    w->advance_to(cyc);
                    w->stage_end(seq, l->second);
                    w->retire(seq, id, false);
                    live.erase(l);
                }
            }
        }
        void finalize(uint64_t endcyc) {
            if (!w || finalized) return;
            finalized = true;
            while (!retires.empty())
                drain(retires.begin()->first); // ascending; erases as it goes
            uint64_t last = w->cycle() > endcyc ? w->cycle() : endcyc;
            for (auto& [seq, stage] : live) {
                w->advance_to(last);
                w->stage_end(seq, stage);
                w->retire(seq, 0, true);
            }
            live.clear();
            sched.clear();
            w->close();
        }
    };

    // ------------------------------------------------------------------
    // State
    // ------------------------------------------------------------------

    CoreConfig cfg;
    RunOptions opt;

    SparseMemory mem_;
    std::array<uint32_t, 32> creg_{}; // committed register file
    uint32_t committed_pc_ = 0;       // next pc after the last commit
    GshareBtb bp_;
    L1Cache ic_, dc_;
    std::vector<uint8_t> mdp_;
    std::optional<Executor> oracle_;

    // Renaming.
    std::array<uint16_t, 32> spec_map_{};
    std::deque<uint16_t> free_;
    std::vector<uint32_t> prf_;
    std::vector<uint64_t> wake_;  // earliest issue cycle for consumers
    std::vector<uint64_t> ready_; // cycle the value is readable at X

    // Front end.
    uint64_t next_seq_ = 0;
    uint32_t fetch_pc_ = 0;
    uint64_t fetch_valid_from_ = 0;
    std::optional<Group> group_;
    std::deque<Slot> dl_;      // decode latch (stage D)
    std::deque<Slot> rl_;      // rename latch (stage Rn)
    std::deque<uint64_t> dpl_; // dispatch latch (stage Ds), seqs in the ROB

    // Back end.
    std::deque<Rob> rob_;
    std::deque<uint64_t> iq_;
    std::deque<Lq> lq_;
    std::deque<Sq> sq_;
    std::map<uint64_t, std::vector<uint64_t>> xq_; // cycle -> seqs at X
    std::vector<WbReq> wb_;
    std::vector<FlushReq> flushes_;
    std::vector<uint64_t> viol_checks_; // stores AGU'd this cycle

    bool serialize_ = false; // renamed ECALL still in flight
    bool exited_ = false;
    uint32_t exit_code_ = 0;
    std::string output_;
    uint64_t cycle_ = 0;
    uint64_t commit_streak_ = 0;
    RunStats stats_;
    Tracer tr_;
    bool result_taken_ = false;

    // ------------------------------------------------------------------

    Impl(const Program& prog, const CoreConfig& c, const RunOptions& o)
        : cfg(c), opt(o), mem_(c.ram_base, c.ram_size), bp_(c.bpred),
          ic_(c.icache), dc_(c.dcache), mdp_(c.mdp_entries, 0),
          prf_(c.prf_entries, 0), wake_(c.prf_entries, kNever),
          ready_(c.prf_entries, kNever) {
        cfg.validate();
        prog.validate();
        prog.map_into(mem_);
        committed_pc_ = prog.entry;
        fetch_pc_ = prog.entry;
        uint32_t sp = prog.initial_sp ? prog.initial_sp : c.ram_base + c.ram_size;
        creg_[2] = sp;
        for (auto& [idx, v] : prog.initial_regs)
            if (idx != 0) creg_[idx] = v;
        creg_[0] = 0;
        // Committed map xi -> preg i, preg0 pinned to zero; the rest free.
        for (unsigned i = 0; i < 32; ++i) {
            spec_map_[i] = (uint16_t)i;
            prf_[i] = creg_[i];
            wake_[i] = 0;
            ready_[i] = 0;
        }
        for (unsigned p = 32; p < cfg.prf_entries; ++p)
            free_.push_back((uint16_t)p);
        if (opt.cosim)
            oracle_.emplace(opt.oracle_program ? *opt.oracle_program : prog,
                            cfg.ram_base, cfg.ram_size);
        stats_.config_fingerprint = cfg.fingerprint();
        tr_.w = opt.trace;
        tr_.start = opt.trace_start;
        tr_.end = opt.trace_end;
        if (tr_.w && !tr_.w->is_open())
            throw SimError(ErrKind::Internal, "trace sink is not open");
    }

    // ------------------------------------------------------------------
    // Lookups
    // ------------------------------------------------------------------

    Rob* rob_find(uint64_t seq) {
        auto it = std::lower_bound(
            rob_.begin(), rob_.end(), seq,
            [](const Rob& e, uint64_t s) { return e.seq < s; });
        return (it != rob_.end() && it->seq == seq) ? &*it : nullptr;
    }
    Lq* lq_find(uint64_t seq) {
        auto it = std::lower_bound(
            lq_.begin(), lq_.end(), seq,
            [](const Lq& e, uint64_t s) { return e.seq < s; });
        return (it != lq_.end() && it->seq == seq) ? &*it : nullptr;
    }
    Sq* sq_find(uint64_t seq) {
        auto it = std::lower_bound(
            sq_.begin(), sq_.end(), seq,
            [](const Sq& e, uint64_t s) { return e.seq < s; });
        return (it != sq_.end() && it->seq == seq) ? &*it : nullptr;
    }
    void iq_erase(uint64_t seq) {
        iq_.erase(std::remove(iq_.begin(), iq_.end(), seq), iq_.end());
    }
    unsigned mdp_index(uint32_t pc) const {
        return (pc >> 2) & (cfg.mdp_entries - 1);
    }

    static std::string slot_label(const Slot& s) {
        char buf[64];
        if (!s.fault || s.di.op == Op::EBREAK) {
            std::snprintf(buf, sizeof buf, "%08x: ", s.pc);
            return std::string(buf) + disassemble(s.di);
        }
        std::snprintf(buf, sizeof buf, "%08x: .word 0x%08x", s.pc, s.raw);
        return buf;
    }

    // ------------------------------------------------------------------
    // Commit
    // ------------------------------------------------------------------

    // Re-derive the guest fault a bubble stands for, in the oracle's own
    // check order so messages and kinds match it exactly.
    [[noreturn]] void throw_fault(const Rob& e) {
        if (e.pc % 4 != 0) misaligned_at("instruction fetch", e.pc);
        (void)mem_.load(e.pc, 4);       // throws when out of image
        DecodedInst d = decode(e.raw);  // throws on an illegal word
        if (d.op == Op::EBREAK)
            throw SimError(ErrKind::IllegalInstruction, "ebreak trap");
        throw SimError(ErrKind::Internal, "fault bubble without a fault");
    }

    SyscallEffect compute_syscall() {
        SyscallEffect eff;
        uint32_t num = creg_[17];
        if (num == 93) {
            eff.kind = SyscallEffect::Exit;
            eff.exit_code = creg_[10];
            return eff;
        }
        if (num == 64) {
            eff.kind = SyscallEffect::Write;
            eff.fd = creg_[10];
            auto bytes = mem_.read_bytes(creg_[11], creg_[12]); // checked
            eff.bytes.assign(bytes.begin(), bytes.end());
            return eff;
        }
        char buf[48];
        std::snprintf(buf, sizeof buf, "unsupported syscall %u", num);
        throw SimError(ErrKind::UnsupportedSyscall, buf);
    }

    CommitRecord build_record(const Rob& e) {
        CommitRecord rec;
        rec.pc = e.pc;
        rec.raw = e.raw;
        uint32_t next = e.pc + 4;
        uint32_t val = e.value;
        if (e.is_ctrl) next = e.actual_next;
        if (e.is_load) {
            const Lq& l = lq_.front();
            rec.is_load = true;
            rec.mem_addr = l.addr;
            rec.mem_width = (uint8_t)l.width;
            val = l.value;
        }
        if (e.is_store) {
            const Sq& s = sq_.front();
            rec.has_store = true;
            rec.mem_addr = s.addr;
            rec.mem_width = (uint8_t)s.width;
            rec.store_data = masked(s.data, s.width);
        }
        if (e.is_ecall) {
            rec.is_syscall = true;
            rec.syscall = compute_syscall();
            if (rec.syscall.kind == SyscallEffect::Write) {
                rec.has_rd = true;
                rec.rd = 10;
                rec.rd_value = (uint32_t)rec.syscall.bytes.size();
            }
        } else if (e.di.writes_rd()) {
            rec.has_rd = true;
            rec.rd = e.di.rd;
            rec.rd_value = val;
        }
        rec.next_pc = next;
        return rec;
    }

    [[noreturn]] void diverged(const CommitRecord& got, const CommitRecord& ref) {
        std::ostringstream os;
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "commit %llu at pc 0x%08X: ",
                      (unsigned long long)(stats_.committed + 1), got.pc);
        os << buf;
        auto field = [&](const char* name, uint64_t a, uint64_t b) {
            if (a != b)
                os << name << " " << a << " vs " << b << "; ";
        };
        field("raw", got.raw, ref.raw);
        field("has-rd", got.has_rd, ref.has_rd);
        field("rd", got.rd, ref.rd);
        field("rd-value", got.rd_value, ref.rd_value);
        field("has-store", got.has_store, ref.has_store);
        field("is-load", got.is_load, ref.is_load);
        field("mem-addr", got.mem_addr, ref.mem_addr);
        field("mem-width", got.mem_width, ref.mem_width);
        field("store-data", got.store_data, ref.store_data);
        field("next-pc", got.next_pc, ref.next_pc);
        field("is-syscall", got.is_syscall, ref.is_syscall);
        field("pc", got.pc, ref.pc);
        if (!(got.syscall == ref.syscall))
            os << "syscall effect; ";
        throw SimError(ErrKind::Divergence, os.str());
    }

    void apply_commit(Rob& e, const CommitRecord& rec, uint64_t now) {
        if (rec.has_store)
            mem_.store(rec.mem_addr, rec.mem_width, sq_.front().data);
        if (e.is_ecall) {
            // Late register write: nothing younger could read it before
            // commit because ECALL renames only against an empty ROB.
            prf_[e.new_preg] = rec.syscall.kind == SyscallEffect::Write
                                   ? (uint32_t)rec.syscall.bytes.size()
                                   : creg_[10];
            if (rec.syscall.kind == SyscallEffect::Exit) {
                exited_ = true;
                exit_code_ = rec.syscall.exit_code;
            } else {
                output_ += rec.syscall.bytes;
            }
            serialize_ = false;
        }
        if (rec.has_rd)
            creg_[rec.rd] = rec.rd_value;
        committed_pc_ = rec.next_pc;

        if (e.has_dest)
            free_.push_back(e.old_preg);

        if (e.is_ctrl) {
            ++stats_.branch_predictions;
            if (e.di.is_branch()) {
                bp_.update_commit(e.pc, e.taken, e.pc + (uint32_t)e.di.imm);
                bp_.release(e.cp.tag);
            } else {
                bp_.update_commit_jump(e.pc, e.actual_next);
            }
            if (e.caused_flush)
                ++stats_.branch_mispredictions;
        }
        if (e.is_load) {
            const Lq& l = lq_.front();
            if (l.bypassed_unknown && mdp_[mdp_index(l.pc)] > 0)
                --mdp_[mdp_index(l.pc)]; // successful speculation: relax
            ++stats_.loads;
            lq_.pop_front();
        }
        if (e.is_store) {
            ++stats_.stores;
            sq_.pop_front();
        }

        ++stats_.committed;
        tr_.commit(now, e.seq, stats_.committed);
        rob_.pop_front();
    }

    void do_commit(uint64_t now, CycleReport& rep) {
        bool store_done = false;
        while (rep.commits < cfg.commit_width && !rob_.empty() && !exited_) {
            Rob& e = rob_.front();
            if (e.state != St::Completed) break;

            if (e.fault) throw_fault(e); // guest fault reached commit

            if (e.is_store) {
                if (store_done) break; // one store per commit cycle
                const Sq& s = sq_.front();
                if (s.addr % s.width != 0) misaligned_at("store", s.addr);
                if (!mem_.in_range(s.addr, s.width))
                    mem_.store(s.addr, s.width, s.data); // throws
                auto r = dc_.access(s.addr, AccessKind::Store, now, e.seq);
                if (r.outcome == AccessOutcome::StructuralStall)
                    break; // MSHRs full: retry next cycle, access uncounted
                store_done = true;
            }
            if (e.is_load) {
                const Lq& l = lq_.front();
                if (l.addr % l.width != 0) misaligned_at("load", l.addr);
                if (!mem_.in_range(l.addr, l.width))
                    (void)mem_.load(l.addr, l.width); // throws
            }

            CommitRecord rec = build_record(e);
            if (oracle_) {
                CommitRecord ref = oracle_->step_once();
                if (!(rec == ref)) diverged(rec, ref);
            }
            apply_commit(e, rec, now);
            ++rep.commits;
        }
    }

    // ------------------------------------------------------------------
    // Writeback
    // ------------------------------------------------------------------

    void do_writeback(uint64_t now, CycleReport& rep) {
        std::sort(wb_.begin(), wb_.end(),
                  [](const WbReq& a, const WbReq& b) { return a.seq < b.seq; });
        size_t kept = 0;
        for (size_t i = 0; i < wb_.size(); ++i) {
            WbReq r = wb_[i];
            if (rep.writebacks < cfg.writeback_width && r.ready <= now) {
                Rob* e = rob_find(r.seq);
                if (!e)
                    throw SimError(ErrKind::Internal, "writeback for dead seq");
                e->state = St::Completed;
                tr_.move(now, r.seq, "Wb");
                ++rep.writebacks;
            } else {
                wb_[kept++] = r;
            }
        }
        wb_.resize(kept);
    }

    // ------------------------------------------------------------------
    // Execute
    // ------------------------------------------------------------------

    void resolve_ctrl(Rob& e, uint32_t r1, uint32_t r2) {
        bool taken = branch_taken(e.di, r1, r2);
        uint32_t next = taken ? ctrl_target(e.di, e.pc, r1) : e.pc + 4;
        e.taken = taken;
        e.actual_next = next;
        if (e.di.is_jump()) e.value = alu_value(e.di, e.pc, r1, r2);
        if (next != e.followed_next) {
            FlushReq f;
            f.kill_from = e.seq + 1;
            f.src_seq = e.seq;
            f.redirect = next;
            f.mispredict = true;
            if (e.di.is_branch()) {
                f.cond = true;
                f.cp = e.cp;
                f.actual = taken;
            } else {
                f.ghr = e.ghr_snap;
                f.horizon = e.tag_horizon;
            }
            flushes_.push_back(f);
        }
    }

    void exec_one(Rob& e, uint64_t now) {
        // Replay check: every source must actually be readable this cycle.
        auto src_ok = [&](int16_t p) { return p < 0 || ready_[p] <= now; };
        if (!src_ok(e.ps1) || !src_ok(e.ps2)) {
            e.state = St::Dispatched;
            if (e.has_dest) {
                wake_[e.new_preg] = kNever;
                ready_[e.new_preg] = kNever;
            }
            tr_.move(now, e.seq, "Is");
            return;
        }
        uint32_t r1 = e.ps1 >= 0 ? prf_[e.ps1] : 0;
        uint32_t r2 = e.ps2 >= 0 ? prf_[e.ps2] : 0;

        if (e.mem_port) {
            uint32_t addr = r1 + (uint32_t)e.di.imm;
            e.state = St::Executed;
            iq_erase(e.seq);
            if (e.is_load) {
                Lq* l = lq_find(e.seq);
                l->addr_known = true;
                l->addr = addr;
                l->width = mem_width(e.di.op);
                l->addr_cycle = now + 1;
                tr_.sched_move(now + 1, e.seq, "Ma");
            } else {
                Sq* s = sq_find(e.seq);
                s->addr_known = true;
                s->addr = addr;
                s->width = mem_width(e.di.op);
                s->addr_cycle = now + 1;
                s->data = r2;
                wb_.push_back({e.seq, now + 1});
                viol_checks_.push_back(e.seq);
            }
            return;
        }

        e.state = St::Executed;
        iq_erase(e.seq);
        if (e.is_ctrl)
            resolve_ctrl(e, r1, r2);
        else if (!e.is_ecall && e.di.op != Op::FENCE)
            e.value = alu_value(e.di, e.pc, r1, r2);
        if (e.has_dest)
            prf_[e.new_preg] = e.value; // wake/ready stamped at issue
        wb_.push_back({e.seq, now + 1});
    }

    void lsq_scan(uint64_t now) {
        unsigned scans = 0;
        for (Lq& l : lq_) {
            if (scans >= cfg.mem_issue_ports) break;
            if (!l.addr_known || l.value_captured || l.addr_cycle > now)
                continue;
            ++scans;

            // Walk older stores youngest-first.
            bool wait = false, bypassed = false;
            const Sq* fwd = nullptr;
            for (auto it = sq_.rbegin(); it != sq_.rend(); ++it) {
                const Sq& s = *it;
                if (s.seq >= l.seq) continue;
                if (!s.addr_known || s.addr_cycle > now) {
                    if (mdp_[mdp_index(l.pc)] >= 2) { wait = true; break; }
                    bypassed = true;
                    continue;
                }
                if (!ranges_overlap(s.addr, s.width, l.addr, l.width)) continue;
                if (range_covers(s.addr, s.width, l.addr, l.width)) {
                    fwd = &s;
                    break;
                }
                wait = true; // partial overlap: wait for the store to drain
                break;
            }

            Rob* e = rob_find(l.seq);
            if (wait) {
                if (e->has_dest) wake_[e->new_preg] = kNever;
                continue;
            }
            if (fwd) {
                uint32_t shifted = masked(fwd->data, fwd->width) >>
                                   (8 * (l.addr - fwd->addr));
                uint32_t v = load_extend(l.op, masked(shifted, l.width));
                resolve_load(l, *e, v, fwd->seq, now + 1, now, bypassed);
                continue;
            }
            auto r = dc_.access(l.addr, AccessKind::Load, now, l.seq);
            if (r.outcome == AccessOutcome::StructuralStall) {
                if (e->has_dest) wake_[e->new_preg] = kNever;
                continue;
            }
            l.did_access = true;
            uint32_t v = load_extend(l.op, mem_.peek(l.addr, l.width));
            resolve_load(l, *e, v, std::nullopt, r.ready_cycle, now, bypassed);
        }
    }

    void resolve_load(Lq& l, Rob& e, uint32_t value,
                      std::optional<uint64_t> fwd_from, uint64_t ready,
                      uint64_t now, bool bypassed) {
        l.value_captured = true;
        l.value = value;
        l.fwd_from = fwd_from;
        l.bypassed_unknown |= bypassed;
        l.ready_cycle = ready;
        if (e.has_dest) {
            prf_[e.new_preg] = value;
            ready_[e.new_preg] = ready;
            uint64_t wake = ready >= now + 2 ? ready - 2 : now;
            if (wake < wake_[e.new_preg]) wake_[e.new_preg] = wake;
        }
        wb_.push_back({l.seq, ready});
    }

    void do_execute(uint64_t now, CycleReport&) {
        flushes_.clear();
        viol_checks_.clear();
        if (auto it = xq_.find(now); it != xq_.end()) {
            auto seqs = std::move(it->second);
            xq_.erase(it);
            std::sort(seqs.begin(), seqs.end());
            for (uint64_t seq : seqs) {
                Rob* e = rob_find(seq);
                if (!e || e->state != St::Issued || e->issue_cycle + 2 != now)
                    continue; // stale: killed or replayed since
                exec_one(*e, now);
            }
        }
        lsq_scan(now);
        // Violation checks run after the scan so a load that captured its
        // value this very cycle is still visible to a store AGU'd now.
        for (uint64_t seq : viol_checks_)
            if (Sq* s = sq_find(seq)) check_violation_now(*s);
        if (!flushes_.empty()) {
            const FlushReq* win = &flushes_[0];
            for (const FlushReq& f : flushes_) {
                auto key = [](const FlushReq& r) {
                    return std::tuple(r.kill_from, r.mispredict ? 0 : 1,
                                      r.src_seq);
                };
                if (key(f) < key(*win)) win = &f;
            }
            apply_flush(*win, now);
        }
    }

    void check_violation_now(const Sq& s) {
        for (const Lq& l : lq_) {
            if (l.seq <= s.seq || !l.value_captured) continue;
            if (!ranges_overlap(s.addr, s.width, l.addr, l.width)) continue;
            if (l.fwd_from && *l.fwd_from >= s.seq) continue;
            Rob* le = rob_find(l.seq);
            FlushReq f;
            f.kill_from = l.seq;
            f.src_seq = s.seq;
            f.redirect = l.pc;
            f.mispredict = false;
            f.ghr = le->ghr_snap;
            f.horizon = le->tag_horizon;
            f.victim_pc = l.pc;
            flushes_.push_back(f);
            return; // oldest victim wins; lq_ is seq-ordered
        }
    }

    // ------------------------------------------------------------------
    // Flush
    // ------------------------------------------------------------------

    void squash_slot(const Slot& s, uint64_t now) {
        ++stats_.squashed_instructions;
        if (s.has_cp) ++stats_.squashed_branch_predictions;
        tr_.flush(now, s.seq);
    }

    void apply_flush(const FlushReq& f, uint64_t now) {
        // Predictor state first: rewind speculative history and drop the
        // checkpoints of everything younger than the flush source.
        if (f.mispredict && f.cond)
            bp_.recover(f.cp, f.actual);
        else
            bp_.restore_history(f.ghr, f.horizon);
        if (f.mispredict) {
            ++stats_.flushes_mispredict;
            rob_find(f.src_seq)->caused_flush = true;
        } else {
            ++stats_.flushes_memory_violation;
            unsigned ix = mdp_index(f.victim_pc);
            if (mdp_[ix] < 3) ++mdp_[ix];
        }

        // ROB walk-back, youngest first, restoring the rename map.
        while (!rob_.empty() && rob_.back().seq >= f.kill_from) {
            Rob& e = rob_.back();
            if (e.is_ecall)
                throw SimError(ErrKind::Internal,
                               "serialized ecall squashed by a flush");
            ++stats_.squashed_instructions;
            if (e.has_cp) ++stats_.squashed_branch_predictions;
            tr_.flush(now, e.seq);
            if (e.has_dest) {
                spec_map_[e.arch_rd] = e.old_preg;
                free_.push_back(e.new_preg);
                wake_[e.new_preg] = kNever;
                ready_[e.new_preg] = kNever;
            }
            rob_.pop_back();
        }

        // Queue suffixes.
        while (!lq_.empty() && lq_.back().seq >= f.kill_from) {
            if (lq_.back().did_access) ++stats_.squashed_memory_accesses;
            lq_.pop_back();
        }
        while (!sq_.empty() && sq_.back().seq >= f.kill_from)
            sq_.pop_back();
        iq_.erase(std::remove_if(iq_.begin(), iq_.end(),
                                 [&](uint64_t s) { return s >= f.kill_from; }),
                  iq_.end());
        for (auto& [cyc, v] : xq_)
            v.erase(std::remove_if(v.begin(), v.end(),
                                   [&](uint64_t s) { return s >= f.kill_from; }),
                    v.end());
        wb_.erase(std::remove_if(wb_.begin(), wb_.end(),
                                 [&](const WbReq& r) {
                                     return r.seq >= f.kill_from;
                                 }),
                  wb_.end());
        dpl_.erase(std::remove_if(dpl_.begin(), dpl_.end(),
                                  [&](uint64_t s) { return s >= f.kill_from; }),
                   dpl_.end());

        // Latches and the in-flight fetch group are younger than any ROB
        // entry, so they die wholesale.
        for (const Slot& s : rl_) squash_slot(s, now);
        rl_.clear();
        for (const Slot& s : dl_) squash_slot(s, now);
        dl_.clear();
        if (group_) {
            for (const Slot& s : group_->slots) squash_slot(s, now);
            group_.reset();
        }

        fetch_pc_ = f.redirect;
        fetch_valid_from_ = now + 1;
    }

    // ------------------------------------------------------------------
    // Issue
    // ------------------------------------------------------------------

    void do_issue(uint64_t now, CycleReport& rep) {
        unsigned int_left = cfg.int_issue_ports;
        unsigned mem_left = cfg.mem_issue_ports;
        unsigned st_left = cfg.store_ports;
        auto awake = [&](int16_t p) { return p < 0 || wake_[p] <= now; };
        for (uint64_t seq : iq_) {
            if (int_left == 0 && mem_left == 0) break;
            Rob* e = rob_find(seq);
            if (e->state != St::Dispatched) continue;
            if (!awake(e->ps1) || !awake(e->ps2)) continue;
            if (e->mem_port) {
                if (mem_left == 0) continue;
                if (e->is_store && st_left == 0) continue;
                --mem_left;
                if (e->is_store) --st_left;
            } else {
                if (int_left == 0) continue;
                --int_left;
            }
            e->state = St::Issued;
            e->issue_cycle = now;
            xq_[now + 2].push_back(seq);
            if (e->has_dest) {
                // Optimistic two-signal wakeup: consumers may issue early
                // and replay if the value slips (cache miss, deferral).
                wake_[e->new_preg] = e->mem_port ? now + 2 : now + 1;
                ready_[e->new_preg] = e->mem_port ? kNever : now + 3;
            }
            tr_.sched_move(now + 1, seq, "RR");
            tr_.sched_move(now + 2, seq, "X");
            ++rep.issues;
        }
    }

    // ------------------------------------------------------------------
    // Dispatch / rename / decode
    // ------------------------------------------------------------------

    void do_dispatch(uint64_t now, CycleReport&) {
        unsigned n = 0;
        while (n < cfg.rename_width && !dpl_.empty()) {
            uint64_t seq = dpl_.front();
            Rob* e = rob_find(seq);
            if (e->fault) {
                e->state = St::Completed; // ROB-only bubble, stays in Ds
            } else {
                if (iq_.size() >= cfg.iq_entries) break;
                iq_.push_back(seq);
                tr_.move(now, seq, "Is");
            }
            dpl_.pop_front();
            ++n;
        }
    }

    void do_rename(uint64_t now, CycleReport&) {
        unsigned n = 0;
        while (n < cfg.rename_width && !rl_.empty() &&
               dpl_.size() < cfg.rename_width) {
            Slot& s = rl_.front();
            if (serialize_) break; // an ECALL is draining
            bool ecall = !s.fault && s.di.op == Op::ECALL;
            if (ecall && !rob_.empty()) break; // serialize against older work
            if (rob_.size() >= cfg.rob_entries) break;
            bool is_ld = !s.fault && s.di.is_load();
            bool is_st = !s.fault && s.di.is_store();
            bool needs_dest = ecall || (!s.fault && s.di.writes_rd());
            if (needs_dest && free_.empty()) break;
            if (is_ld && lq_.size() >= cfg.lq_entries) break;
            if (is_st && sq_.size() >= cfg.sq_entries) break;

            Rob e;
            e.seq = s.seq;
            e.pc = s.pc;
            e.raw = s.raw;
            e.fault = s.fault;
            if (!s.fault) {
                e.di = s.di;
                e.is_load = is_ld;
                e.is_store = is_st;
                e.is_ctrl = s.di.is_ctrl();
                e.is_ecall = ecall;
                e.mem_port = is_ld || is_st;
                if (s.di.uses_rs1()) e.ps1 = (int16_t)spec_map_[s.di.rs1];
                if (s.di.uses_rs2()) e.ps2 = (int16_t)spec_map_[s.di.rs2];
                if (needs_dest) {
                    uint8_t rd = ecall ? 10 : s.di.rd;
                    e.has_dest = true;
                    e.arch_rd = rd;
                    e.old_preg = spec_map_[rd];
                    e.new_preg = free_.front();
                    free_.pop_front();
                    spec_map_[rd] = e.new_preg;
                    wake_[e.new_preg] = kNever;
                    ready_[e.new_preg] = kNever;
                }
                e.predicted_taken = s.predicted_taken;
                e.followed_next = s.followed_next;
                e.has_cp = s.has_cp;
                e.cp = s.cp;
                e.ghr_snap = s.ghr_snap;
                e.tag_horizon = s.tag_horizon;
                if (is_ld) {
                    Lq l;
                    l.seq = e.seq;
                    l.pc = e.pc;
                    l.op = s.di.op;
                    lq_.push_back(l);
                }
                if (is_st) {
                    Sq q;
                    q.seq = e.seq;
                    q.pc = e.pc;
                    q.op = s.di.op;
                    sq_.push_back(q);
                }
                if (ecall) serialize_ = true;
            }
            rob_.push_back(e);
            dpl_.push_back(e.seq);
            tr_.move(now, e.seq, "Ds");
            rl_.pop_front();
            ++n;
        }
    }

    void do_decode(uint64_t now, CycleReport&) {
        unsigned n = 0;
        while (n < cfg.rename_width && !dl_.empty() &&
               rl_.size() < cfg.rename_width) {
            rl_.push_back(std::move(dl_.front()));
            dl_.pop_front();
            tr_.move(now, rl_.back().seq, "Rn");
            ++n;
        }
    }

    // ------------------------------------------------------------------
    // Fetch
    // ------------------------------------------------------------------

    bool group_ready(uint64_t now) const {
        for (const Slot& s : group_->slots)
            if (!s.access_granted || s.fetch_ready > now) return false;
        return true;
    }

    void predecode(uint64_t now) {
        auto& v = group_->slots;
        size_t keep = v.size();
        for (size_t i = 0; i < v.size(); ++i) {
            Slot& s = v[i];
            s.ghr_snap = bp_.ghr();
            s.tag_horizon = bp_.next_tag();
            s.followed_next = s.pc + 4;
            if (s.fault) continue;
            const DecodedInst& d = s.di;
            if (d.is_branch()) {
                Prediction p = bp_.predict(s.pc); // shifts the raw direction
                s.has_cp = true;
                s.cp = p.checkpoint;
                s.predicted_taken = p.taken;
                if (p.taken && p.target) { // effective redirect needs a BTB hit
                    s.followed_next = *p.target;
                    keep = i + 1;
                    break;
                }
            } else if (d.op == Op::JAL) {
                s.followed_next = s.pc + (uint32_t)d.imm;
                keep = i + 1;
                break;
            } else if (d.op == Op::JALR) {
                if (auto t = bp_.btb_lookup(s.pc)) {
                    s.followed_next = *t;
                    keep = i + 1;
                    break;
                }
                // BTB miss: fall through and let execute redirect.
            }
        }
        for (size_t i = keep; i < v.size(); ++i)
            squash_slot(v[i], now); // dropped slots never predicted
        v.resize(keep);
        fetch_pc_ = v.back().followed_next;
        group_->predecoded = true;
    }

    void start_group(uint64_t now, CycleReport& rep) {
        uint32_t pc = fetch_pc_;
        Group g;
        if (pc % 4 != 0) {
            Slot s;
            s.seq = next_seq_++;
            s.pc = pc;
            s.fault = true;
            s.access_granted = true;
            s.fetch_ready = now + 1;
            g.slots.push_back(s);
        } else {
            for (unsigned i = 0; i < cfg.fetch_width; ++i) {
                uint32_t spc = pc + 4 * i;
                Slot s;
                s.seq = next_seq_++;
                s.pc = spc;
                if (!mem_.in_range(spc, 4)) {
                    s.fault = true;
                    s.access_granted = true; // nothing cacheable to fetch
                    s.fetch_ready = now + 1;
                } else {
                    s.raw = mem_.peek(spc, 4);
                    if (auto d = try_decode(s.raw)) {
                        s.di = *d;
                        if (s.di.op == Op::EBREAK) s.fault = true; // traps
                    } else {
                        s.fault = true;
                    }
                }
                g.slots.push_back(s);
            }
        }
        rep.fetched += (unsigned)g.slots.size();
        for (const Slot& s : g.slots)
            tr_.born(now, s.seq, slot_label(s));
        group_ = std::move(g);
    }

    void grant_accesses(uint64_t now) {
        auto& v = group_->slots;
        uint32_t line = ic_.config().line_bytes;
        for (size_t i = 0; i < v.size(); ++i) {
            Slot& s = v[i];
            if (s.access_granted) continue;
            if (i > 0 && v[i - 1].access_granted &&
                v[i - 1].pc / line == s.pc / line) {
                s.access_granted = true; // rides the same line fill
                s.fetch_ready = v[i - 1].fetch_ready;
                continue;
            }
            auto r = ic_.access(s.pc, AccessKind::Fetch, now, s.seq);
            if (r.outcome == AccessOutcome::StructuralStall)
                break; // keep slot order; retry next cycle
            s.access_granted = true;
            s.fetch_ready = r.ready_cycle;
        }
    }

    void do_fetch(uint64_t now, CycleReport& rep) {
        if (group_ && group_ready(now)) {
            if (!group_->predecoded) predecode(now);
            if (dl_.empty()) {
                for (Slot& s : group_->slots) {
                    uint64_t seq = s.seq;
                    dl_.push_back(std::move(s));
                    tr_.move(now, seq, "D");
                }
                group_.reset();
            }
        }
        if (!group_ && now >= fetch_valid_from_)
            start_group(now, rep);
        if (group_) grant_accesses(now);
    }

    // ------------------------------------------------------------------
    // Tick / invariants / results
    // ------------------------------------------------------------------

    void sync_cache_stats() {
        const auto& ic = ic_.counters();
        const auto& dc = dc_.counters();
        stats_.icache_accesses = ic.accesses;
        stats_.icache_misses = ic.misses;
        stats_.dcache_accesses = dc.accesses;
        stats_.dcache_misses = dc.misses;
        stats_.mshr_allocations = ic.mshr_allocations + dc.mshr_allocations;
        stats_.mshr_merges = ic.mshr_merges + dc.mshr_merges;
        stats_.mshr_structural_stalls =
            ic.structural_stalls + dc.structural_stalls;
    }

    void check_invariants(const CycleReport& r) const {
        auto fail = [](const char* what) {
            throw SimError(ErrKind::Internal,
                           std::string("invariant violated: ") + what);
        };
        if (rob_.size() > cfg.rob_entries) fail("rob occupancy");
        if (iq_.size() > cfg.iq_entries) fail("iq occupancy");
        if (lq_.size() > cfg.lq_entries) fail("lq occupancy");
        if (sq_.size() > cfg.sq_entries) fail("sq occupancy");
        if (r.free_pregs + r.inflight_pregs + r.mapped_pregs != cfg.prf_entries)
            fail("physical register conservation");
        if (r.commits > cfg.commit_width) fail("commit width");
        if (r.writebacks > cfg.writeback_width) fail("writeback width");
        if (r.issues > cfg.int_issue_ports + cfg.mem_issue_ports)
            fail("issue width");
        if (r.fetched > cfg.fetch_width) fail("fetch width");
    }

    CycleReport tick() {
        if (exited_)
            throw SimError(ErrKind::Internal, "tick after guest exit");
        if (cycle_ >= cfg.max_cycles) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "no exit within %llu cycles",
                          (unsigned long long)cfg.max_cycles);
            throw SimError(ErrKind::CycleLimit, buf);
        }
        uint64_t now = cycle_;
        CycleReport rep;
        rep.cycle = now;

        ic_.tick(now);
        dc_.tick(now);
        tr_.drain(now);

        do_commit(now, rep);
        if (!exited_) {
            do_writeback(now, rep);
            do_execute(now, rep);
            do_issue(now, rep);
            do_dispatch(now, rep);
            do_rename(now, rep);
            do_decode(now, rep);
            do_fetch(now, rep);

            if (rep.commits == 0 && !rob_.empty()) {
                if (++commit_streak_ > cfg.deadlock_cycles) {
                    char buf[96];
                    std::snprintf(
                        buf, sizeof buf,
                        "no commit for %llu cycles, head pc 0x%08X seq %llu",
                        (unsigned long long)commit_streak_, rob_.front().pc,
                        (unsigned long long)rob_.front().seq);
                    throw SimError(ErrKind::Deadlock, buf);
                }
            } else {
                commit_streak_ = 0;
            }
        }

        rep.rob_live = (unsigned)rob_.size();
        rep.lq_live = (unsigned)lq_.size();
        rep.sq_live = (unsigned)sq_.size();
        rep.free_pregs = (unsigned)free_.size();
        unsigned inflight = 0;
        for (const Rob& e : rob_)
            if (e.has_dest) ++inflight;
        rep.inflight_pregs = inflight;
        rep.mapped_pregs = 32;
        if (opt.check_invariants) check_invariants(rep);

        ++cycle_;
        stats_.cycles = cycle_;
        sync_cache_stats();
        return rep;
    }

    RunResult run() {
        auto t0 = std::chrono::steady_clock::now();
        while (!exited_)
            tick();
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        stats_.wall_clock_seconds = dt.count();
        return take_result();
    }

    RunResult take_result() {
        if (!exited_)
            throw SimError(ErrKind::Internal, "result taken before exit");
        if (result_taken_)
            throw SimError(ErrKind::Internal, "result taken twice");
        result_taken_ = true;
        tr_.finalize(cycle_);
        sync_cache_stats();
        RunResult res;
        res.stats = stats_;
        res.guest_exit = exit_code_;
        res.guest_output = output_;
        res.final_state.pc = committed_pc_;
        res.final_state.xregs = creg_;
        res.final_state.memory = std::move(mem_);
        return res;
    }
};

Core::Core(const Program& prog, const CoreConfig& cfg, const RunOptions& opt)
    : impl_(std::make_unique<Impl>(prog, cfg, opt)) {}

Core::~Core() = default;

CycleReport Core::tick() { return impl_->tick(); }
RunResult Core::run() { return impl_->run(); }
bool Core::exited() const { return impl_->exited_; }
uint32_t Core::guest_exit() const { return impl_->exit_code_; }
uint64_t Core::cycle() const { return impl_->cycle_; }
const RunStats& Core::stats() const { return impl_->stats_; }
RunResult Core::take_result() { return impl_->take_result(); }

} // namespace rsdsim
