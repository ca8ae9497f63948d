#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string>
#include <vector>

#include "rcsim/geometry.hpp"

namespace rcsim {

enum class ResourceKind : std::uint8_t { channel_bus, chip_unit, dram_port };

struct ResourceId {
    ResourceKind kind = ResourceKind::chip_unit;
    std::uint32_t index = 0;  ///< channel, global chip (channel * chips + chip) or port

    bool operator==(const ResourceId&) const = default;
};

std::string to_string(const Geometry& g, const ResourceId& r);

enum class PhaseKind : std::uint8_t {
    read_phase,
    dma_out,
    dma_in,
    program_phase,
    erase,
    host_arrival,
    idle_check,
};

const char* to_string(PhaseKind k);

enum class NandOpKind : std::uint8_t { offchip_copy, copyback, host_read, host_write, erase };

inline constexpr std::size_t kNandOpKinds = 5;

const char* to_string(NandOpKind k);

/// What the caller asks for. `src` is used by reads, copies and erases;
/// `dst` by writes and copies.
struct NandRequest {
    NandOpKind op = NandOpKind::host_read;
    PhysAddr src;
    PhysAddr dst;
};

struct NandTicket {
    std::uint64_t id = 0;
    NandOpKind op = NandOpKind::host_read;
    PhysAddr src;
    PhysAddr dst;
    SimTime issue_time = 0;
    SimTime completion_time = 0;
};

/// One timed phase of a NAND operation, as it appears in the event log.
struct PhaseRecord {
    SimTime start = 0;
    SimTime end = 0;
    PhaseKind kind = PhaseKind::read_phase;
    NandOpKind op = NandOpKind::host_read;
    std::uint64_t ticket = 0;
    PhysAddr addr;
    std::array<ResourceId, 2> held{};
    std::uint8_t held_count = 0;
};

struct ResourceUsage {
    ResourceId id;
    SimTime busy_time = 0;
    std::uint64_t grants = 0;
};

struct EngineStats {
    SimTime now = 0;
    std::uint64_t events_dispatched = 0;
    std::array<std::uint64_t, kNandOpKinds> ops_submitted{};
    std::array<std::uint64_t, kNandOpKinds> ops_completed{};
    std::vector<ResourceUsage> resources;

    SimTime busy_time(const ResourceId& id) const;
    std::uint64_t completed(NandOpKind k) const { return ops_completed[static_cast<std::size_t>(k)]; }
};

struct EngineConfig {
    Geometry geometry;
    TimingParams timing;
    /// Ports on the serial bus to the DRAM buffer; channel c uses port c % dram_ports.
    std::uint32_t dram_ports = 1;
    bool record_log = false;
};

/// Deterministic discrete-event engine with FIFO-arbitrated resources.
///
/// A NAND operation is decomposed into phases. Read and program phases hold
/// the chip unit; DMA phases hold the chip's channel bus and a DRAM port for
/// the same interval, acquired channel first. A copyback holds only the chip,
/// for tR followed directly by tPROG. Equal-time events dispatch in
/// submission order.
class EventEngine {
public:
    using Completion = std::function<void(const NandTicket&)>;
    using Action = std::function<void()>;

    explicit EventEngine(EngineConfig cfg);

    EventEngine(const EventEngine&) = delete;
    EventEngine& operator=(const EventEngine&) = delete;

    /// Queues a NAND operation at now(). Throws AddressError for bad addresses.
    std::uint64_t submit(const NandRequest& req, Completion on_done = {});

    /// Runs `fn` at time `at` (clamped to now()). `kind` is host_arrival or idle_check.
    void schedule(SimTime at, PhaseKind kind, Action fn);

    SimTime now() const { return now_; }
    bool empty() const { return queue_.empty(); }
    std::size_t pending_events() const { return queue_.size(); }

    /// Dispatches a single event. Returns false when nothing is queued.
    bool step();

    /// Dispatches every event with time <= t_end, then advances now() to t_end.
    EngineStats run_until(SimTime t_end);

    /// Dispatches until the queue drains.
    EngineStats run();

    EngineStats stats() const;

    const EngineConfig& config() const { return cfg_; }
    const std::vector<PhaseRecord>& log() const { return log_; }

    /// `time,kind,channel,chip,plane,block,page,resource_held`, one line per phase.
    void write_log_csv(std::ostream& out) const;

    ResourceId channel_bus(std::uint32_t channel) const;
    ResourceId chip_unit(const PhysAddr& a) const;
    ResourceId dram_port_for(std::uint32_t channel) const;

private:
    struct Step {
        PhaseKind kind = PhaseKind::read_phase;
        PhysAddr addr;
        SimTime duration = 0;
        std::array<std::uint32_t, 2> res{};
        std::uint8_t nres = 0;
        bool keep_holding = false;  ///< next step reuses the same resources
    };

    struct Op {
        NandTicket ticket;
        Completion done;
        std::array<Step, 4> steps{};
        std::uint8_t nsteps = 0;
        std::uint8_t cur = 0;
        std::uint8_t acquired = 0;
    };

    struct Resource {
        ResourceId id;
        bool busy = false;
        SimTime held_since = 0;
        SimTime busy_time = 0;
        std::uint64_t grants = 0;
        std::deque<std::uint32_t> waiters;
    };

    struct Event {
        SimTime at;
        std::uint64_t seq;
        std::uint32_t slot;
        bool is_op;

        bool operator>(const Event& o) const {
            return at != o.at ? at > o.at : seq > o.seq;
        }
    };

    std::uint32_t resource_slot(const ResourceId& id) const;
    void push_event(SimTime at, std::uint32_t slot, bool is_op);
    void try_acquire(std::uint32_t op);
    void start_phase(std::uint32_t op);
    void finish_phase(std::uint32_t op);
    void grant(std::uint32_t res);
    void release(std::uint32_t res);

    EngineConfig cfg_;
    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t next_ticket_ = 1;
    std::uint64_t dispatched_ = 0;
    std::array<std::uint64_t, kNandOpKinds> submitted_{};
    std::array<std::uint64_t, kNandOpKinds> completed_{};

    std::vector<Resource> resources_;
    std::vector<Op> ops_;
    std::vector<std::uint32_t> free_ops_;
    std::vector<Action> timers_;
    std::vector<std::uint32_t> free_timers_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::vector<PhaseRecord> log_;
};

}  // namespace rcsim
