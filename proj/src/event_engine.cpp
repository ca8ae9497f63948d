#include "rcsim/event_engine.hpp"

#include <algorithm>
#include <ostream>
#include <utility>

#include "rcsim/errors.hpp"

namespace rcsim {

std::string to_string(const Geometry& g, const ResourceId& r) {
    switch (r.kind) {
        case ResourceKind::channel_bus:
            return "channel" + std::to_string(r.index);
        case ResourceKind::chip_unit:
            return "chip" + std::to_string(r.index / g.chips_per_channel) + "." +
                   std::to_string(r.index % g.chips_per_channel);
        case ResourceKind::dram_port:
            return "dram" + std::to_string(r.index);
    }
    return "?";
}

const char* to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::read_phase: return "read_phase";
        case PhaseKind::dma_out: return "dma_out";
        case PhaseKind::dma_in: return "dma_in";
        case PhaseKind::program_phase: return "program_phase";
        case PhaseKind::erase: return "erase";
        case PhaseKind::host_arrival: return "host_arrival";
        case PhaseKind::idle_check: return "idle_check";
    }
    return "?";
}

const char* to_string(NandOpKind k) {
    switch (k) {
        case NandOpKind::offchip_copy: return "offchip_copy";
        case NandOpKind::copyback: return "copyback";
        case NandOpKind::host_read: return "host_read";
        case NandOpKind::host_write: return "host_write";
        case NandOpKind::erase: return "erase";
    }
    return "?";
}

SimTime EngineStats::busy_time(const ResourceId& id) const {
    for (const auto& r : resources)
        if (r.id == id) return r.busy_time;
    return 0;
}

EventEngine::EventEngine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    validate_geometry(cfg_.geometry);
    if (cfg_.dram_ports == 0) throw ConfigError("engine.dram_ports must be >= 1");
    const auto& g = cfg_.geometry;
    resources_.reserve(g.channels + g.total_chips() + cfg_.dram_ports);
    auto add = [this](ResourceKind kind, std::uint32_t index) {
        Resource r;
        r.id = ResourceId{kind, index};
        resources_.push_back(std::move(r));
    };
    for (std::uint32_t c = 0; c < g.channels; ++c) add(ResourceKind::channel_bus, c);
    for (std::uint32_t c = 0; c < g.total_chips(); ++c) add(ResourceKind::chip_unit, c);
    for (std::uint32_t p = 0; p < cfg_.dram_ports; ++p) add(ResourceKind::dram_port, p);
}

ResourceId EventEngine::channel_bus(std::uint32_t channel) const {
    return {ResourceKind::channel_bus, channel};
}

ResourceId EventEngine::chip_unit(const PhysAddr& a) const {
    return {ResourceKind::chip_unit, chip_index(cfg_.geometry, a)};
}

ResourceId EventEngine::dram_port_for(std::uint32_t channel) const {
    return {ResourceKind::dram_port, channel % cfg_.dram_ports};
}

std::uint32_t EventEngine::resource_slot(const ResourceId& id) const {
    const auto& g = cfg_.geometry;
    switch (id.kind) {
        case ResourceKind::channel_bus: return id.index;
        case ResourceKind::chip_unit: return g.channels + id.index;
        case ResourceKind::dram_port: return g.channels + g.total_chips() + id.index;
    }
    return 0;
}

std::uint64_t EventEngine::submit(const NandRequest& req, Completion on_done) {
    const auto& g = cfg_.geometry;
    const auto& t = cfg_.timing;
    const bool uses_src = req.op != NandOpKind::host_write;
    const bool uses_dst = req.op == NandOpKind::host_write ||
                          req.op == NandOpKind::offchip_copy ||
                          req.op == NandOpKind::copyback;
    if (uses_src) check_address(g, req.src);
    if (uses_dst) check_address(g, req.dst);
    if (req.op == NandOpKind::copyback && !copyback_compatible(g, req.src, req.dst))
        throw AddressError("copyback across planes: " + to_string(req.src) + " -> " +
                           to_string(req.dst));

    std::uint32_t slot;
    if (!free_ops_.empty()) {
        slot = free_ops_.back();
        free_ops_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(ops_.size());
        ops_.emplace_back();
    }
    Op& op = ops_[slot];
    op = Op{};
    op.ticket.id = next_ticket_++;
    op.ticket.op = req.op;
    op.ticket.src = req.src;
    op.ticket.dst = req.dst;
    op.ticket.issue_time = now_;
    op.done = std::move(on_done);

    auto chip = [&](const PhysAddr& a) { return resource_slot(chip_unit(a)); };
    auto add = [&](PhaseKind kind, const PhysAddr& a, SimTime d,
                   std::initializer_list<std::uint32_t> res, bool keep = false) {
        Step& s = op.steps[op.nsteps++];
        s.kind = kind;
        s.addr = a;
        s.duration = d;
        s.keep_holding = keep;
        for (auto r : res) s.res[s.nres++] = r;
    };
    const auto chan_src = resource_slot(channel_bus(req.src.channel));
    const auto dram_src = resource_slot(dram_port_for(req.src.channel));
    const auto chan_dst = resource_slot(channel_bus(req.dst.channel));
    const auto dram_dst = resource_slot(dram_port_for(req.dst.channel));

    switch (req.op) {
        case NandOpKind::offchip_copy:
            add(PhaseKind::read_phase, req.src, t.t_read, {chip(req.src)});
            add(PhaseKind::dma_out, req.src, t.t_dma_out, {chan_src, dram_src});
            add(PhaseKind::dma_in, req.dst, t.t_dma_in, {chan_dst, dram_dst});
            add(PhaseKind::program_phase, req.dst, t.t_prog, {chip(req.dst)});
            break;
        case NandOpKind::copyback:
            add(PhaseKind::read_phase, req.src, t.t_read, {chip(req.src)}, true);
            add(PhaseKind::program_phase, req.dst, t.t_prog, {chip(req.dst)});
            break;
        case NandOpKind::host_read:
            add(PhaseKind::read_phase, req.src, t.t_read, {chip(req.src)});
            add(PhaseKind::dma_out, req.src, t.t_dma_out, {chan_src, dram_src});
            break;
        case NandOpKind::host_write:
            add(PhaseKind::dma_in, req.dst, t.t_dma_in, {chan_dst, dram_dst});
            add(PhaseKind::program_phase, req.dst, t.t_prog, {chip(req.dst)});
            break;
        case NandOpKind::erase:
            add(PhaseKind::erase, req.src, t.t_erase, {chip(req.src)});
            break;
    }

    ++submitted_[static_cast<std::size_t>(req.op)];
    const auto id = op.ticket.id;
    try_acquire(slot);
    return id;
}

void EventEngine::schedule(SimTime at, PhaseKind /*kind*/, Action fn) {
    std::uint32_t slot;
    if (!free_timers_.empty()) {
        slot = free_timers_.back();
        free_timers_.pop_back();
        timers_[slot] = std::move(fn);
    } else {
        slot = static_cast<std::uint32_t>(timers_.size());
        timers_.push_back(std::move(fn));
    }
    push_event(std::max(at, now_), slot, false);
}

void EventEngine::push_event(SimTime at, std::uint32_t slot, bool is_op) {
    queue_.push(Event{at, seq_++, slot, is_op});
}

void EventEngine::grant(std::uint32_t res) {
    Resource& r = resources_[res];
    r.busy = true;
    r.held_since = now_;
    ++r.grants;
}

void EventEngine::release(std::uint32_t res) {
    Resource& r = resources_[res];
    r.busy_time += now_ - r.held_since;
    r.busy = false;
    if (!r.waiters.empty()) {
        const auto next = r.waiters.front();
        r.waiters.pop_front();
        grant(res);
        ++ops_[next].acquired;
        try_acquire(next);
    }
}

void EventEngine::try_acquire(std::uint32_t slot) {
    for (;;) {
        Op& op = ops_[slot];
        const Step& s = op.steps[op.cur];
        if (op.acquired == s.nres) break;
        const auto res = s.res[op.acquired];
        if (resources_[res].busy) {
            resources_[res].waiters.push_back(slot);
            return;
        }
        grant(res);
        ++op.acquired;
    }
    start_phase(slot);
}

void EventEngine::start_phase(std::uint32_t slot) {
    const Op& op = ops_[slot];
    const Step& s = op.steps[op.cur];
    if (cfg_.record_log) {
        PhaseRecord rec;
        rec.start = now_;
        rec.end = now_ + s.duration;
        rec.kind = s.kind;
        rec.op = op.ticket.op;
        rec.ticket = op.ticket.id;
        rec.addr = s.addr;
        rec.held_count = s.nres;
        for (std::uint8_t i = 0; i < s.nres; ++i) rec.held[i] = resources_[s.res[i]].id;
        log_.push_back(rec);
    }
    push_event(now_ + s.duration, slot, true);
}

void EventEngine::finish_phase(std::uint32_t slot) {
    {
        Op& op = ops_[slot];
        const Step& s = op.steps[op.cur];
        if (s.keep_holding) {
            ++op.cur;
            start_phase(slot);
            return;
        }
        // DRAM port first so a transfer parked on it can proceed before the
        // channel is handed to the next waiter.
        for (int i = s.nres - 1; i >= 0; --i) release(s.res[static_cast<std::size_t>(i)]);
    }
    Op& op = ops_[slot];
    ++op.cur;
    if (op.cur < op.nsteps) {
        op.acquired = 0;
        try_acquire(slot);
        return;
    }
    op.ticket.completion_time = now_;
    ++completed_[static_cast<std::size_t>(op.ticket.op)];
    NandTicket ticket = op.ticket;
    Completion done = std::move(op.done);
    op.done = nullptr;
    free_ops_.push_back(slot);
    if (done) done(ticket);
}

bool EventEngine::step() {
    if (queue_.empty()) return false;
    const Event ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    ++dispatched_;
    if (ev.is_op) {
        finish_phase(ev.slot);
    } else {
        Action fn = std::move(timers_[ev.slot]);
        timers_[ev.slot] = nullptr;
        free_timers_.push_back(ev.slot);
        fn();
    }
    return true;
}

EngineStats EventEngine::run_until(SimTime t_end) {
    while (!queue_.empty() && queue_.top().at <= t_end) step();
    now_ = std::max(now_, t_end);
    return stats();
}

EngineStats EventEngine::run() {
    while (step()) {
    }
    return stats();
}

EngineStats EventEngine::stats() const {
    EngineStats s;
    s.now = now_;
    s.events_dispatched = dispatched_;
    s.ops_submitted = submitted_;
    s.ops_completed = completed_;
    s.resources.reserve(resources_.size());
    for (const auto& r : resources_) {
        SimTime busy = r.busy_time + (r.busy ? now_ - r.held_since : 0);
        s.resources.push_back(ResourceUsage{r.id, busy, r.grants});
    }
    return s;
}

void EventEngine::write_log_csv(std::ostream& out) const {
    const auto& g = cfg_.geometry;
    out << "time,kind,channel,chip,plane,block,page,resource_held\n";
    for (const auto& rec : log_) {
        out << rec.start << ',' << to_string(rec.kind) << ',' << rec.addr.channel << ','
            << rec.addr.chip << ',' << rec.addr.plane << ',' << rec.addr.block << ','
            << rec.addr.page << ',';
        for (std::uint8_t i = 0; i < rec.held_count; ++i) {
            if (i) out << '+';
            out << to_string(g, rec.held[i]);
        }
        out << '\n';
    }
}

}  // namespace rcsim
