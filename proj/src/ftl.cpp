#include "rcsim/ftl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rcsim/errors.hpp"

namespace rcsim {

const char* to_string(FtlVariant v) {
    switch (v) {
        case FtlVariant::baseline: return "baseline";
        case FtlVariant::rcftl: return "rcftl";
        case FtlVariant::rcftl_greedy: return "rcftl_greedy";
    }
    return "?";
}

const char* to_string(JobKind k) {
    switch (k) {
        case JobKind::foreground_gc: return "foreground_gc";
        case JobKind::background_gc: return "background_gc";
        case JobKind::wear_level: return "wear_level";
    }
    return "?";
}

void FtlConfig::validate(const Geometry& g) const {
    if (!(logical_ratio > 0.0 && logical_ratio < 1.0))
        throw ConfigError("ftl.logical_ratio must lie strictly between 0 and 1");
    if (buffer_pages == 0) throw ConfigError("ftl.buffer_pages must be >= 1");
    if (variant != FtlVariant::baseline && (max_copyback == 0 || max_copyback > 7))
        throw ConfigError("ftl.max_copyback must be in 1..7 (3-bit block counter)");
    if (fg_watermark == 0) throw ConfigError("ftl.fg_watermark must be >= 1");
    if (bg_watermark < fg_watermark) throw ConfigError("ftl.bg_watermark must be >= fg_watermark");
    if (host_reserve == 0 || host_reserve >= fg_watermark)
        throw ConfigError("ftl.host_reserve must be in 1..fg_watermark-1");
    if (host_programs_per_plane == 0) throw ConfigError("ftl.host_programs_per_plane must be >= 1");
    if (bg_watermark + effective_max_copyback() + 2 >= g.blocks_per_plane)
        throw ConfigError("ftl.bg_watermark leaves no room in a plane of " +
                          std::to_string(g.blocks_per_plane) + " blocks");
    ModeConfig{u_threshold}.validate();
}

std::uint64_t FtlStats::migrations_by_mode(MigrationMode m) const {
    std::uint64_t n = 0;
    for (const auto& row : migrations) n += row[static_cast<std::size_t>(m)];
    return n;
}

std::uint64_t FtlStats::migrations_total() const {
    return migrations_by_mode(MigrationMode::rcopyback) + migrations_by_mode(MigrationMode::offchip);
}

std::uint64_t FtlStats::victims_by_job(JobKind j) const {
    const auto& row = victims[static_cast<std::size_t>(j)];
    return row[0] + row[1];
}

Ftl::Ftl(EventEngine& engine, FtlConfig cfg, Reliability reliability)
    : engine_(engine),
      geom_(engine.config().geometry),
      timing_(engine.config().timing),
      cfg_(cfg),
      rel_(std::move(reliability)),
      mode_cfg_{cfg.u_threshold},
      logical_pages_(0),
      pool_(geom_),
      active_(pool_, rel_.table(), cfg.effective_max_copyback()),
      tracker_(static_cast<double>(geom_.pages_per_block) * static_cast<double>(timing_.t_prog)),
      block_timer_(static_cast<double>(geom_.pages_per_block) * static_cast<double>(timing_.t_prog)) {
    cfg_.validate(geom_);
    logical_pages_ = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(geom_.total_pages()) * cfg_.logical_ratio));

    const auto planes = geom_.total_planes();
    slot_opened_.assign(planes, std::vector<SimTime>(active_.host_slot() + 1, 0));
    lpn_to_ppn_.assign(logical_pages_, kUnmapped);
    mapped_wseq_.assign(logical_pages_, 0);
    migrations_of_version_.assign(logical_pages_, 0);
    ppn_to_lpn_.assign(geom_.total_pages(), kUnmapped);
    ppn_tag_.assign(geom_.total_pages(), kZeroTag);
    ppn_hops_.assign(geom_.total_pages(), 0);
    programs_in_flight_.assign(geom_.total_blocks(), 0);
    host_inflight_.assign(planes, 0);
    jobs_.assign(planes, GcJob{});
    wl_pending_.assign(planes, false);

    // Consecutive host pages land on different channels first, then chips.
    plane_order_.reserve(planes);
    for (std::uint32_t k = 0; k < planes; ++k) {
        const std::uint32_t channel = k % geom_.channels;
        const std::uint32_t rest = k / geom_.channels;
        const std::uint32_t chip = rest % geom_.chips_per_channel;
        const std::uint32_t plane = rest / geom_.chips_per_channel;
        plane_order_.push_back((channel * geom_.chips_per_channel + chip) * geom_.planes_per_chip + plane);
    }
}

PhysAddr Ftl::addr_of(std::uint32_t plane, std::uint32_t block, std::uint32_t page) const {
    PhysAddr a = plane_address(geom_, plane);
    a.block = block;
    a.page = page;
    return a;
}

double Ftl::utilization() const {
    return std::min(1.0, static_cast<double>(buffer_occupancy()) / cfg_.buffer_pages);
}

// ---------------------------------------------------------------- host path

void Ftl::host_begin() {
    ++host_outstanding_;
    last_host_activity_ = engine_.now();
}

void Ftl::host_end() {
    --host_outstanding_;
    last_host_activity_ = engine_.now();
    if (host_outstanding_ == 0) schedule_idle_check();
}

bool Ftl::host_idle() const {
    return host_outstanding_ == 0 && engine_.now() >= last_host_activity_ + cfg_.bg_idle_threshold;
}

void Ftl::schedule_idle_check() {
    if (idle_check_pending_ || !background_enabled_) return;
    idle_check_pending_ = true;
    engine_.schedule(last_host_activity_ + cfg_.bg_idle_threshold, PhaseKind::idle_check,
                     [this] { on_idle_check(); });
}

void Ftl::on_idle_check() {
    idle_check_pending_ = false;
    if (host_outstanding_ > 0) return;
    if (!host_idle()) {
        schedule_idle_check();
        return;
    }
    for (std::uint32_t p = 0; p < geom_.total_planes(); ++p) maybe_start_job(p);
}

void Ftl::handle_write(std::uint64_t lpn, std::uint64_t tag, WriteDone done) {
    if (lpn >= logical_pages_)
        throw AddressError("write lpn " + std::to_string(lpn) + " beyond logical capacity " +
                           std::to_string(logical_pages_));
    host_begin();
    WriteDone wrapped = [this, done = std::move(done)](SimTime t) {
        host_end();
        if (done) done(t);
    };
    if (waiting_.empty() && buffer_occupancy() < cfg_.buffer_pages) {
        enqueue_write(lpn, tag, wrapped);
    } else {
        waiting_.push_back({lpn, tag, std::move(wrapped)});
        flush_tick();
    }
}

void Ftl::enqueue_write(std::uint64_t lpn, std::uint64_t tag, const WriteDone& done) {
    pending_.push_back({lpn, tag, next_wseq_++});
    auto& b = buffered_[lpn];
    b.tag = tag;
    ++b.count;
    ++stats_.host_pages_written;
    sample_utilization();
    done(engine_.now());
    flush_tick();
}

void Ftl::admit_waiting_writes() {
    while (!waiting_.empty() && buffer_occupancy() < cfg_.buffer_pages) {
        WaitingWrite w = std::move(waiting_.front());
        waiting_.pop_front();
        enqueue_write(w.lpn, w.tag, w.done);
    }
}

void Ftl::sample_utilization() { tracker_.record_sample(engine_.now(), utilization()); }

void Ftl::handle_read(std::uint64_t lpn, ReadDone done) {
    if (lpn >= logical_pages_)
        throw AddressError("read lpn " + std::to_string(lpn) + " beyond logical capacity " +
                           std::to_string(logical_pages_));
    ++stats_.host_pages_read;
    host_begin();
    if (auto it = buffered_.find(lpn); it != buffered_.end()) {
        ++stats_.buffer_read_hits;
        const auto tag = it->second.tag;
        host_end();
        if (done) done(engine_.now(), tag);
        return;
    }
    const auto ppn = lpn_to_ppn_[lpn];
    if (ppn == kUnmapped) {
        ++stats_.unmapped_reads;
        host_end();
        if (done) done(engine_.now(), kZeroTag);
        return;
    }
    const auto a = decode_ppn(geom_, ppn);
    const auto pe = pool_.meta(plane_index(geom_, a), a.block).pe_cycles;
    if (!rel_.readable_after(ppn_hops_[ppn], pe))
        throw DataLossFault("host read of unreadable lpn " + std::to_string(lpn) + " at " +
                            to_string(a) + " (hops=" + std::to_string(ppn_hops_[ppn]) +
                            ", pe=" + std::to_string(pe) + ")");
    ++stats_.nand_host_reads;
    const auto tag = ppn_tag_[ppn];
    engine_.submit({NandOpKind::host_read, a, {}}, [this, tag, done = std::move(done)](const NandTicket& t) {
        host_end();
        if (done) done(t.completion_time, tag);
    });
}

bool Ftl::can_accept_host(std::uint32_t plane) const {
    if (host_inflight_[plane] >= cfg_.host_programs_per_plane) return false;
    if (auto b = active_.block(plane, active_.host_slot());
        b && pool_.meta(plane, *b).write_pointer < geom_.pages_per_block)
        return true;
    return pool_.free_count(plane) > cfg_.host_reserve;
}

std::uint32_t Ftl::next_host_page(std::uint32_t plane) {
    const auto hs = active_.host_slot();
    auto b = active_.block(plane, hs);
    if (!b || pool_.meta(plane, *b).write_pointer == geom_.pages_per_block) {
        b = active_.allocate_active(plane, hs);
        note_block_allocated(plane, hs);
    }
    auto& m = pool_.meta(plane, *b);
    const auto page = m.write_pointer++;
    ++programs_in_flight_[pool_.id(plane, *b)];
    if (m.write_pointer == geom_.pages_per_block) {
        active_.retire(plane, hs);
        note_block_filled(plane, hs);
    }
    return *b * geom_.pages_per_block + page;
}

std::uint32_t Ftl::flush_tick() {
    std::uint32_t dispatched = 0;
    const std::size_t planes = plane_order_.size();
    while (!pending_.empty()) {
        std::optional<std::uint32_t> chosen;
        for (std::size_t i = 0; i < planes; ++i) {
            const std::size_t idx = (flush_cursor_ + i) % planes;
            const auto plane = plane_order_[idx];
            if (can_accept_host(plane)) {
                flush_cursor_ = (idx + 1) % planes;
                chosen = plane;
                break;
            }
            if (host_inflight_[plane] < cfg_.host_programs_per_plane) maybe_start_job(plane);
        }
        if (!chosen) break;
        const auto plane = *chosen;
        const auto slot = next_host_page(plane);
        const std::uint32_t block = slot / geom_.pages_per_block;
        const std::uint32_t page = slot % geom_.pages_per_block;
        maybe_start_job(plane);

        BufferEntry e = pending_.front();
        pending_.pop_front();
        ++inflight_programs_;
        ++host_inflight_[plane];
        ++dispatched;
        engine_.submit({NandOpKind::host_write, {}, addr_of(plane, block, page)},
                       [this, e, plane, block, page](const NandTicket&) {
                           on_host_program_done(e, plane, block, page);
                       });
    }
    return dispatched;
}

void Ftl::on_host_program_done(const BufferEntry& e, std::uint32_t plane, std::uint32_t block,
                               std::uint32_t page) {
    --host_inflight_[plane];
    --inflight_programs_;
    --programs_in_flight_[pool_.id(plane, block)];
    ++stats_.host_programs;
    ++stats_.nand_pages_programmed;

    const auto ppn = ppn_of(plane, block, page);
    ppn_tag_[ppn] = e.tag;
    ppn_hops_[ppn] = 0;
    const bool applied = e.wseq > mapped_wseq_[e.lpn];
    if (applied) {
        retire_version(e.lpn);
        if (lpn_to_ppn_[e.lpn] != kUnmapped) invalidate(lpn_to_ppn_[e.lpn]);
        map_page(e.lpn, ppn);
        mapped_wseq_[e.lpn] = e.wseq;
    }
    if (auto it = buffered_.find(e.lpn); it != buffered_.end() && --it->second.count == 0)
        buffered_.erase(it);

    if (!observers_.empty()) {
        const auto a = addr_of(plane, block, page);
        for (auto* o : observers_) o->on_host_program(engine_.now(), e.lpn, a, applied);
    }
    sample_utilization();
    admit_waiting_writes();
    flush_tick();
}

void Ftl::invalidate(std::uint64_t ppn) {
    const auto bid = ppn / geom_.pages_per_block;
    const auto plane = static_cast<std::uint32_t>(bid / geom_.blocks_per_plane);
    const auto block = static_cast<std::uint32_t>(bid % geom_.blocks_per_plane);
    auto& m = pool_.meta(plane, block);
    const auto page = static_cast<std::uint32_t>(ppn % geom_.pages_per_block);
    if (m.valid[page]) {
        m.valid[page] = false;
        --m.valid_count;
    }
    ppn_to_lpn_[ppn] = kUnmapped;
}

void Ftl::map_page(std::uint64_t lpn, std::uint64_t ppn) {
    const auto bid = ppn / geom_.pages_per_block;
    auto& m = pool_.meta(static_cast<std::uint32_t>(bid / geom_.blocks_per_plane),
                         static_cast<std::uint32_t>(bid % geom_.blocks_per_plane));
    const auto page = static_cast<std::uint32_t>(ppn % geom_.pages_per_block);
    m.valid[page] = true;
    ++m.valid_count;
    lpn_to_ppn_[lpn] = ppn;
    ppn_to_lpn_[ppn] = lpn;
}

void Ftl::retire_version(std::uint64_t lpn) {
    if (const auto k = migrations_of_version_[lpn]; k > 0) {
        ++retired_histogram_[k];
        migrations_of_version_[lpn] = 0;
    }
}

void Ftl::note_block_allocated(std::uint32_t plane, std::uint32_t slot) {
    slot_opened_[plane][slot] = engine_.now();
}

void Ftl::note_block_filled(std::uint32_t plane, std::uint32_t slot) {
    if (preconditioning_) return;
    block_timer_.observe(static_cast<double>(engine_.now() - slot_opened_[plane][slot]));
    tracker_.set_window(std::max(1.0, block_timer_.estimate()));
}

// ------------------------------------------------------ GC / wear leveling

std::optional<std::uint32_t> Ftl::select_victim(std::uint32_t plane) const {
    std::optional<std::uint32_t> best;
    std::uint32_t best_valid = geom_.pages_per_block;
    for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b) {
        const auto& m = pool_.meta(plane, b);
        if (m.state != BlockState::full || programs_in_flight_[pool_.id(plane, b)] != 0) continue;
        if (m.valid_count < best_valid) {
            best_valid = m.valid_count;
            best = b;
        }
    }
    return best;
}

std::optional<std::uint32_t> Ftl::coldest_full_block(std::uint32_t plane) const {
    const auto [lo, hi] = pool_.pe_range(plane);
    for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b) {
        const auto& m = pool_.meta(plane, b);
        if (m.pe_cycles == lo && m.state == BlockState::full &&
            programs_in_flight_[pool_.id(plane, b)] == 0)
            return b;
    }
    return std::nullopt;
}

bool Ftl::gc_run(std::uint32_t plane, Urgency urgency) {
    if (jobs_[plane].running) return false;
    const auto victim = select_victim(plane);
    if (!victim) return false;
    start_job(plane, urgency == Urgency::foreground ? JobKind::foreground_gc : JobKind::background_gc,
              *victim);
    return true;
}

bool Ftl::wear_level_check(std::uint32_t plane) {
    if (jobs_[plane].running) return false;
    const auto [lo, hi] = pool_.pe_range(plane);
    if (hi - lo <= cfg_.wl_gap) return false;
    const auto cold = coldest_full_block(plane);
    if (!cold) return false;
    start_job(plane, JobKind::wear_level, *cold);
    return true;
}

void Ftl::maybe_start_job(std::uint32_t plane) {
    if (jobs_[plane].running) return;
    const auto free = pool_.free_count(plane);
    if (free < cfg_.fg_watermark) {
        if (auto v = select_victim(plane)) {
            start_job(plane, JobKind::foreground_gc, *v);
            return;
        }
    }
    if (!background_enabled_) return;
    if (wl_pending_[plane]) {
        wl_pending_[plane] = false;
        if (wear_level_check(plane)) return;
    }
    if (free < cfg_.bg_watermark && host_idle()) {
        if (auto v = select_victim(plane)) start_job(plane, JobKind::background_gc, *v);
    }
}

void Ftl::start_job(std::uint32_t plane, JobKind kind, std::uint32_t victim) {
    auto& job = jobs_[plane];
    job = GcJob{};
    job.running = true;
    job.kind = kind;
    job.victim = victim;

    auto& m = pool_.meta(plane, victim);
    m.state = BlockState::erasing;
    const Urgency urgency = kind == JobKind::foreground_gc ? Urgency::foreground : Urgency::background;

    MigrationMode hint = MigrationMode::offchip;
    switch (cfg_.variant) {
        case FtlVariant::baseline:
            hint = MigrationMode::offchip;
            break;
        case FtlVariant::rcftl_greedy:
            hint = greedy_select_mode(urgency);
            break;
        case FtlVariant::rcftl:
            tracker_.advance(engine_.now());
            hint = select_mode(tracker_, mode_cfg_, urgency);
            break;
    }
    if (hint == MigrationMode::rcopyback)
        ++stats_.decisions_rcopyback;
    else
        ++stats_.decisions_offchip;
    if (cfg_.record_decisions)
        decisions_.push_back({engine_.now(), urgency, tracker_.smoothed_u(), hint});

    const auto d = decide_destination(m, hint, rel_.table(), cfg_.effective_max_copyback());
    job.mode = d.mode;
    job.decided_mode = d.mode;
    job.slot = d.destination_slot;
    job.valid_at_selection = m.valid_count;
    ++stats_.victims[static_cast<std::size_t>(kind)][static_cast<std::size_t>(d.mode)];
    pump(plane);
}

std::optional<std::uint32_t> Ftl::take_destination(std::uint32_t plane, GcJob& job, std::uint32_t& block) {
    for (;;) {
        const std::uint32_t slot = job.mode == MigrationMode::rcopyback ? job.slot : 0;
        auto b = active_.block(plane, slot);
        if (!b || pool_.meta(plane, *b).write_pointer == geom_.pages_per_block) {
            b = active_.allocate_active(plane, slot);
            if (!b) {
                job.mode = MigrationMode::offchip;
                job.slot = 0;
                ++stats_.mode_fallbacks;
                continue;
            }
            note_block_allocated(plane, slot);
        }
        auto& m = pool_.meta(plane, *b);
        const auto page = m.write_pointer++;
        ++programs_in_flight_[pool_.id(plane, *b)];
        if (m.write_pointer == geom_.pages_per_block) {
            active_.retire(plane, slot);
            note_block_filled(plane, slot);
        }
        block = *b;
        return page;
    }
}

void Ftl::pump(std::uint32_t plane) {
    auto& job = jobs_[plane];
    if (!job.running || job.op_in_flight) return;
    const auto& vm = pool_.meta(plane, job.victim);
    while (job.cursor < geom_.pages_per_block && !vm.valid[job.cursor]) ++job.cursor;

    if (job.cursor == geom_.pages_per_block) {
        job.op_in_flight = true;
        engine_.submit({NandOpKind::erase, addr_of(plane, job.victim, 0), {}},
                       [this, plane](const NandTicket&) { on_erase_done(plane); });
        return;
    }

    const std::uint32_t src_page = job.cursor++;
    const auto src_ppn = ppn_of(plane, job.victim, src_page);
    const auto lpn = ppn_to_lpn_[src_ppn];
    const auto hops = ppn_hops_[src_ppn];
    if (!rel_.readable_after(hops, vm.pe_cycles))
        throw DataLossFault("migration source unreadable: lpn " + std::to_string(lpn) + " at " +
                            to_string(addr_of(plane, job.victim, src_page)) +
                            " (hops=" + std::to_string(hops) + ", pe=" + std::to_string(vm.pe_cycles) +
                            ", counter=" + std::to_string(vm.copyback_counter) + ")");

    std::uint32_t dst_block = 0;
    const auto dst_page = *take_destination(plane, job, dst_block);
    const auto dst_ppn = ppn_of(plane, dst_block, dst_page);
    const auto mode = job.mode;
    const auto tag = ppn_tag_[src_ppn];
    job.op_in_flight = true;
    engine_.submit({mode == MigrationMode::rcopyback ? NandOpKind::copyback : NandOpKind::offchip_copy,
                    addr_of(plane, job.victim, src_page), addr_of(plane, dst_block, dst_page)},
                   [this, plane, src_ppn, dst_ppn, lpn, mode, tag, hops](const NandTicket&) {
                       on_migration_done(plane, src_ppn, dst_ppn, lpn, mode, tag, hops);
                   });
}

void Ftl::on_migration_done(std::uint32_t plane, std::uint64_t src_ppn, std::uint64_t dst_ppn,
                            std::uint64_t lpn, MigrationMode mode, std::uint64_t tag,
                            std::uint32_t hops) {
    auto& job = jobs_[plane];
    job.op_in_flight = false;
    ++job.migrated;
    const auto dst_bid = dst_ppn / geom_.pages_per_block;
    const auto dst_block = static_cast<std::uint32_t>(dst_bid % geom_.blocks_per_plane);
    --programs_in_flight_[dst_bid];
    ++stats_.nand_pages_programmed;
    ++stats_.migrations[static_cast<std::size_t>(job.kind)][static_cast<std::size_t>(mode)];

    const auto& src_meta = pool_.meta(plane, job.victim);
    const auto& dst_meta = pool_.meta(plane, dst_block);
    const std::uint32_t new_hops = mode == MigrationMode::rcopyback ? hops + 1 : 0;
    ppn_tag_[dst_ppn] = tag;
    ppn_hops_[dst_ppn] = static_cast<std::uint8_t>(new_hops);
    if (!rel_.readable_after(new_hops, dst_meta.pe_cycles))
        throw DataLossFault("copyback left lpn " + std::to_string(lpn) + " unreadable at " +
                            to_string(decode_ppn(geom_, dst_ppn)) + " (hops=" +
                            std::to_string(new_hops) + ", dst pe=" + std::to_string(dst_meta.pe_cycles) +
                            ", dst counter=" + std::to_string(dst_meta.copyback_counter) +
                            ", src pe=" + std::to_string(src_meta.pe_cycles) +
                            ", src counter=" + std::to_string(src_meta.copyback_counter) + ")");

    const bool applied = ppn_to_lpn_[src_ppn] == lpn && lpn != kUnmapped;
    if (applied) {
        invalidate(src_ppn);
        map_page(lpn, dst_ppn);
        ++migrations_of_version_[lpn];
    }
    if (!observers_.empty()) {
        MigrationEvent ev;
        ev.time = engine_.now();
        ev.lpn = lpn;
        ev.src = decode_ppn(geom_, src_ppn);
        ev.dst = decode_ppn(geom_, dst_ppn);
        ev.mode = mode;
        ev.job = job.kind;
        ev.src_pe = src_meta.pe_cycles;
        ev.dst_pe = dst_meta.pe_cycles;
        ev.src_counter = src_meta.copyback_counter;
        ev.dst_counter = dst_meta.copyback_counter;
        ev.applied = applied;
        for (auto* o : observers_) o->on_migration(ev);
    }
    pump(plane);
}

void Ftl::on_erase_done(std::uint32_t plane) {
    auto& job = jobs_[plane];
    pool_.erase(plane, job.victim);
    ++stats_.erases;

    GcSummary summary;
    summary.time = engine_.now();
    summary.plane = plane;
    summary.victim = job.victim;
    summary.job = job.kind;
    summary.mode = job.decided_mode;
    summary.valid_at_selection = job.valid_at_selection;
    summary.migrated = job.migrated;
    job.running = false;
    job.op_in_flight = false;

    const auto [lo, hi] = pool_.pe_range(plane);
    if (hi - lo > cfg_.wl_gap) wl_pending_[plane] = true;

    for (auto* o : observers_) o->on_gc_boundary(summary);
    maybe_start_job(plane);
    flush_tick();
}

// ------------------------------------------------------------ setup/state

void Ftl::precondition(double fill_fraction) {
    if (!(fill_fraction >= 0.0 && fill_fraction <= 1.0))
        throw ConfigError("precondition fill fraction must lie in [0, 1]");
    const auto n = static_cast<std::uint64_t>(std::floor(static_cast<double>(logical_pages_) * fill_fraction));
    preconditioning_ = true;
    for (std::uint64_t lpn = 0; lpn < n; ++lpn) {
        const auto plane = plane_order_[lpn % plane_order_.size()];
        const auto slot = next_host_page(plane);
        const std::uint32_t block = slot / geom_.pages_per_block;
        const std::uint32_t page = slot % geom_.pages_per_block;
        --programs_in_flight_[pool_.id(plane, block)];
        const auto ppn = ppn_of(plane, block, page);
        if (lpn_to_ppn_[lpn] != kUnmapped) invalidate(lpn_to_ppn_[lpn]);
        map_page(lpn, ppn);
        ppn_tag_[ppn] = precondition_tag(lpn);
        ppn_hops_[ppn] = 0;
    }
    preconditioning_ = false;
    preconditioned_ = std::max(preconditioned_, n);
}

void Ftl::age_blocks(std::uint32_t pe_max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::uint32_t p = 0; p < geom_.total_planes(); ++p)
        for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b)
            pool_.set_pe(p, b, static_cast<std::uint32_t>(rng() % (std::uint64_t{pe_max} + 1)));
}

std::optional<PhysAddr> Ftl::lookup(std::uint64_t lpn) const {
    if (lpn >= logical_pages_ || lpn_to_ppn_[lpn] == kUnmapped) return std::nullopt;
    return decode_ppn(geom_, lpn_to_ppn_[lpn]);
}

std::uint32_t Ftl::page_hops(const PhysAddr& a) const { return ppn_hops_[encode_ppn(geom_, a)]; }

std::uint64_t Ftl::total_free_blocks() const {
    std::uint64_t n = 0;
    for (std::uint32_t p = 0; p < geom_.total_planes(); ++p) n += pool_.free_count(p);
    return n;
}

std::uint64_t Ftl::count_blocks_with_counter(std::uint32_t c) const {
    std::uint64_t n = 0;
    for (std::uint32_t p = 0; p < geom_.total_planes(); ++p)
        for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b) {
            const auto& m = pool_.meta(p, b);
            if ((m.state == BlockState::active || m.state == BlockState::full) && m.copyback_counter == c)
                ++n;
        }
    return n;
}

bool Ftl::quiescent() const {
    if (!pending_.empty() || !waiting_.empty() || inflight_programs_ != 0) return false;
    return std::none_of(jobs_.begin(), jobs_.end(), [](const GcJob& j) { return j.running; });
}

Snapshot Ftl::snapshot() const {
    Snapshot s;
    s.time = engine_.now();
    s.free_blocks = total_free_blocks();
    s.utilization = utilization();
    s.smoothed_u = tracker_.smoothed_u();
    s.host_pages_written = stats_.host_pages_written;
    s.nand_pages_programmed = stats_.nand_pages_programmed;
    s.victims = stats_.victims;
    const auto slots = active_.host_slot() + 1;
    s.slot_fill.assign(slots, 0.0);
    for (std::uint32_t slot = 0; slot < slots; ++slot) {
        double sum = 0;
        for (std::uint32_t p = 0; p < geom_.total_planes(); ++p)
            if (auto b = active_.block(p, slot))
                sum += static_cast<double>(pool_.meta(p, *b).write_pointer) / geom_.pages_per_block;
        s.slot_fill[slot] = sum / geom_.total_planes();
    }
    return s;
}

std::map<std::uint32_t, std::uint64_t> Ftl::migration_histogram() const {
    auto hist = retired_histogram_;
    for (std::uint64_t lpn = 0; lpn < logical_pages_; ++lpn)
        if (migrations_of_version_[lpn] > 0) ++hist[migrations_of_version_[lpn]];
    return hist;
}

void Ftl::check_consistency() const {
    for (std::uint64_t lpn = 0; lpn < logical_pages_; ++lpn) {
        const auto ppn = lpn_to_ppn_[lpn];
        if (ppn == kUnmapped) continue;
        if (ppn_to_lpn_[ppn] != lpn)
            throw ContractViolation("reverse map disagrees for lpn " + std::to_string(lpn));
        const auto a = decode_ppn(geom_, ppn);
        if (!pool_.meta(plane_index(geom_, a), a.block).valid[a.page])
            throw ContractViolation("mapped page not marked valid: lpn " + std::to_string(lpn));
    }
    for (std::uint32_t p = 0; p < geom_.total_planes(); ++p)
        for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b) {
            const auto& m = pool_.meta(p, b);
            std::uint32_t count = 0;
            for (std::uint32_t pg = 0; pg < geom_.pages_per_block; ++pg) {
                if (!m.valid[pg]) continue;
                ++count;
                const auto ppn = ppn_of(p, b, pg);
                const auto lpn = ppn_to_lpn_[ppn];
                if (lpn == kUnmapped || lpn_to_ppn_[lpn] != ppn)
                    throw ContractViolation("valid page without forward mapping at " +
                                            to_string(addr_of(p, b, pg)));
            }
            if (count != m.valid_count || m.valid_count > m.write_pointer ||
                m.write_pointer > geom_.pages_per_block)
                throw ContractViolation("block bookkeeping mismatch at plane " + std::to_string(p) +
                                        " block " + std::to_string(b));
        }
}

}  // namespace rcsim
