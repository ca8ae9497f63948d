#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rcsim/blocks.hpp"
#include "rcsim/dmms.hpp"
#include "rcsim/epm.hpp"
#include "rcsim/event_engine.hpp"
#include "rcsim/geometry.hpp"
#include "rcsim/reliability.hpp"

namespace rcsim {

enum class FtlVariant : std::uint8_t {
    baseline,      ///< page-level mapping, every migration off-chip
    rcftl,         ///< EPM + DMMS
    rcftl_greedy,  ///< EPM, rcopyback whenever the counter allows (rcFTL--)
};

const char* to_string(FtlVariant v);

struct FtlConfig {
    FtlVariant variant = FtlVariant::rcftl;
    std::uint32_t max_copyback = 4;  ///< M_cpb; ignored by the baseline
    double logical_ratio = 0.875;    ///< logical / physical capacity
    std::uint32_t buffer_pages = 640;  ///< 10 MiB of 16 KiB pages
    std::uint32_t fg_watermark = 4;    ///< foreground GC while free blocks < this
    std::uint32_t bg_watermark = 8;    ///< idle-time GC while free blocks < this
    std::uint32_t host_reserve = 2;    ///< host may open a block only while free > this
    SimTime bg_idle_threshold = 1000;  ///< host idleness before background GC
    std::uint32_t wl_gap = 256;        ///< static wear leveling when max-min pe exceeds this
    double u_threshold = 0.5;
    std::uint32_t host_programs_per_plane = 1;
    bool record_decisions = false;

    std::uint32_t effective_max_copyback() const {
        return variant == FtlVariant::baseline ? 0 : max_copyback;
    }
    void validate(const Geometry& g) const;
};

enum class JobKind : std::uint8_t { foreground_gc, background_gc, wear_level };

inline constexpr std::size_t kJobKinds = 3;

const char* to_string(JobKind k);

/// One page migration as seen by observers.
struct MigrationEvent {
    SimTime time = 0;
    std::uint64_t lpn = 0;
    PhysAddr src;
    PhysAddr dst;
    MigrationMode mode = MigrationMode::offchip;
    JobKind job = JobKind::foreground_gc;
    std::uint32_t src_pe = 0;
    std::uint32_t dst_pe = 0;
    std::uint32_t src_counter = 0;
    std::uint32_t dst_counter = 0;
    bool applied = false;  ///< false if the host overwrote the page mid-flight
};

struct GcSummary {
    SimTime time = 0;
    std::uint32_t plane = 0;
    std::uint32_t victim = 0;
    JobKind job = JobKind::foreground_gc;
    MigrationMode mode = MigrationMode::offchip;  ///< mode decided at victim selection
    std::uint32_t valid_at_selection = 0;
    std::uint32_t migrated = 0;
};

class FtlObserver {
public:
    virtual ~FtlObserver() = default;
    virtual void on_host_program(SimTime, std::uint64_t /*lpn*/, const PhysAddr&, bool /*applied*/) {}
    virtual void on_migration(const MigrationEvent&) {}
    /// After the victim's erase completed; the mapping is quiescent for that plane.
    virtual void on_gc_boundary(const GcSummary&) {}
};

struct DecisionRecord {
    SimTime time = 0;
    Urgency urgency = Urgency::background;
    double smoothed_u = 0.0;
    MigrationMode mode = MigrationMode::offchip;
};

struct FtlStats {
    std::uint64_t host_pages_written = 0;
    std::uint64_t host_pages_read = 0;
    std::uint64_t buffer_read_hits = 0;
    std::uint64_t unmapped_reads = 0;
    std::uint64_t nand_host_reads = 0;
    std::uint64_t host_programs = 0;
    std::uint64_t nand_pages_programmed = 0;
    std::uint64_t erases = 0;
    std::array<std::array<std::uint64_t, 2>, kJobKinds> migrations{};  ///< [job][mode]
    std::array<std::array<std::uint64_t, 2>, kJobKinds> victims{};     ///< [job][mode]
    std::uint64_t decisions_rcopyback = 0;
    std::uint64_t decisions_offchip = 0;
    std::uint64_t mode_fallbacks = 0;  ///< rcopyback impossible for lack of an eligible block

    std::uint64_t migrations_by_mode(MigrationMode m) const;
    std::uint64_t migrations_total() const;
    std::uint64_t victims_by_job(JobKind j) const;
};

struct Snapshot {
    SimTime time = 0;
    std::uint64_t free_blocks = 0;
    double utilization = 0.0;
    double smoothed_u = 0.0;
    std::uint64_t host_pages_written = 0;
    std::uint64_t nand_pages_programmed = 0;
    std::array<std::array<std::uint64_t, 2>, kJobKinds> victims{};
    std::vector<double> slot_fill;  ///< mean fill of open blocks per migration slot, then host
};

/// Page-level mapping FTL with a DRAM write buffer, greedy GC, static wear
/// leveling, and the rcopyback extensions (per-block copyback counters in
/// M_cpb + 1 active slots, utilization-driven mode selection).
///
/// Everything runs inside the engine's dispatch loop; callbacks fire from
/// engine events or synchronously from handle_read/handle_write.
class Ftl {
public:
    using WriteDone = std::function<void(SimTime)>;
    using ReadDone = std::function<void(SimTime, std::uint64_t tag)>;

    static constexpr std::uint64_t kUnmapped = ~std::uint64_t{0};
    static constexpr std::uint64_t kZeroTag = 0;

    Ftl(EventEngine& engine, FtlConfig cfg, Reliability reliability);

    Ftl(const Ftl&) = delete;
    Ftl& operator=(const Ftl&) = delete;

    const Geometry& geometry() const { return geom_; }
    const FtlConfig& config() const { return cfg_; }
    const Reliability& reliability() const { return rel_; }
    std::uint64_t logical_pages() const { return logical_pages_; }

    /// Accepts one page into the write buffer; `done` fires once buffered,
    /// which may wait for buffer space. Throws AddressError for lpn out of range.
    void handle_write(std::uint64_t lpn, std::uint64_t tag, WriteDone done);

    /// Buffer hits and unmapped pages complete immediately without NAND work.
    /// Throws DataLossFault if the mapped page is unreadable.
    void handle_read(std::uint64_t lpn, ReadDone done);

    /// Greedy victim: fewest valid pages among idle full blocks, lowest index on ties.
    std::optional<std::uint32_t> select_victim(std::uint32_t plane) const;

    /// Starts reclaiming a victim on an idle plane. False if busy or no victim.
    bool gc_run(std::uint32_t plane, Urgency urgency);

    /// Starts migrating the plane's coldest block when its P/E spread exceeds
    /// the configured gap and that block holds data. False otherwise.
    bool wear_level_check(std::uint32_t plane);

    /// Dispatches buffered pages to free program slots; returns how many.
    std::uint32_t flush_tick();

    /// Instantly maps the first `fill_fraction` of the logical space
    /// (sequential, striped over planes). Tag of lpn i is precondition_tag(i).
    void precondition(double fill_fraction);
    static constexpr std::uint64_t precondition_tag(std::uint64_t lpn) {
        return (std::uint64_t{1} << 62) | lpn;
    }
    std::uint64_t preconditioned_pages() const { return preconditioned_; }

    /// Sets the wear of every free block to uniform random values in
    /// [0, pe_max]. Only valid before any block is written.
    void age_blocks(std::uint32_t pe_max, std::uint64_t seed);

    /// Sets the wear of one free block.
    void set_block_wear(std::uint32_t plane, std::uint32_t block, std::uint32_t pe) { pool_.set_pe(plane, block, pe); }

    /// Stops starting new background and wear-leveling jobs.
    void stop_background() { background_enabled_ = false; }

    void add_observer(FtlObserver* obs) { observers_.push_back(obs); }

    // Introspection.
    const FtlStats& stats() const { return stats_; }
    const BlockPool& blocks() const { return pool_; }
    const ActiveBlockSet& active_blocks() const { return active_; }
    const UtilizationTracker& tracker() const { return tracker_; }
    const std::vector<DecisionRecord>& decisions() const { return decisions_; }
    std::size_t buffer_occupancy() const { return pending_.size() + inflight_programs_; }
    double utilization() const;
    std::optional<PhysAddr> lookup(std::uint64_t lpn) const;
    std::uint32_t page_hops(const PhysAddr& a) const;
    std::uint64_t total_free_blocks() const;
    /// Data-holding (active or full) blocks whose copyback counter equals c.
    std::uint64_t count_blocks_with_counter(std::uint32_t c) const;
    bool plane_busy(std::uint32_t plane) const { return jobs_[plane].running; }
    bool quiescent() const;
    Snapshot snapshot() const;

    /// Per-version migration counts: k -> number of page versions migrated k
    /// times (k >= 1), including versions still live.
    std::map<std::uint32_t, std::uint64_t> migration_histogram() const;

    /// Mapping bijectivity and bitmap/count agreement. Throws ContractViolation.
    void check_consistency() const;

private:
    struct BufferEntry {
        std::uint64_t lpn;
        std::uint64_t tag;
        std::uint64_t wseq;
    };
    struct WaitingWrite {
        std::uint64_t lpn;
        std::uint64_t tag;
        WriteDone done;
    };
    struct Buffered {
        std::uint64_t tag;
        std::uint32_t count;
    };
    struct GcJob {
        bool running = false;
        bool op_in_flight = false;
        JobKind kind = JobKind::foreground_gc;
        std::uint32_t victim = 0;
        MigrationMode mode = MigrationMode::offchip;
        MigrationMode decided_mode = MigrationMode::offchip;
        std::uint32_t slot = 0;
        std::uint32_t cursor = 0;
        std::uint32_t valid_at_selection = 0;
        std::uint32_t migrated = 0;
    };

    std::uint64_t ppn_of(std::uint32_t plane, std::uint32_t block, std::uint32_t page) const {
        return (std::uint64_t{plane} * geom_.blocks_per_plane + block) * geom_.pages_per_block + page;
    }
    PhysAddr addr_of(std::uint32_t plane, std::uint32_t block, std::uint32_t page) const;

    void enqueue_write(std::uint64_t lpn, std::uint64_t tag, const WriteDone& done);
    void admit_waiting_writes();
    void sample_utilization();
    bool can_accept_host(std::uint32_t plane) const;
    std::uint32_t next_host_page(std::uint32_t plane);
    void on_host_program_done(const BufferEntry& e, std::uint32_t plane, std::uint32_t block,
                              std::uint32_t page);
    void invalidate(std::uint64_t ppn);
    void map_page(std::uint64_t lpn, std::uint64_t ppn);
    void note_block_allocated(std::uint32_t plane, std::uint32_t slot);
    void note_block_filled(std::uint32_t plane, std::uint32_t slot);
    void retire_version(std::uint64_t lpn);

    void maybe_start_job(std::uint32_t plane);
    bool host_idle() const;
    void start_job(std::uint32_t plane, JobKind kind, std::uint32_t victim);
    void pump(std::uint32_t plane);
    std::optional<std::uint32_t> take_destination(std::uint32_t plane, GcJob& job, std::uint32_t& block);
    void on_migration_done(std::uint32_t plane, std::uint64_t src_ppn, std::uint64_t dst_ppn,
                           std::uint64_t lpn, MigrationMode mode, std::uint64_t tag,
                           std::uint32_t hops);
    void on_erase_done(std::uint32_t plane);
    std::optional<std::uint32_t> coldest_full_block(std::uint32_t plane) const;

    void host_begin();
    void host_end();
    void schedule_idle_check();
    void on_idle_check();

    EventEngine& engine_;
    Geometry geom_;
    TimingParams timing_;
    FtlConfig cfg_;
    Reliability rel_;
    ModeConfig mode_cfg_;
    std::uint64_t logical_pages_;

    BlockPool pool_;
    ActiveBlockSet active_;
    UtilizationTracker tracker_;
    BlockWriteTimer block_timer_;
    std::vector<std::vector<SimTime>> slot_opened_;  // [plane][slot]

    std::vector<std::uint64_t> lpn_to_ppn_;
    std::vector<std::uint64_t> mapped_wseq_;
    std::vector<std::uint32_t> migrations_of_version_;
    std::map<std::uint32_t, std::uint64_t> retired_histogram_;
    std::vector<std::uint64_t> ppn_to_lpn_;
    std::vector<std::uint64_t> ppn_tag_;
    std::vector<std::uint8_t> ppn_hops_;
    std::vector<std::uint32_t> programs_in_flight_;  // per block id

    std::deque<BufferEntry> pending_;
    std::deque<WaitingWrite> waiting_;
    std::unordered_map<std::uint64_t, Buffered> buffered_;
    std::uint64_t inflight_programs_ = 0;
    std::uint64_t next_wseq_ = 1;
    std::vector<std::uint32_t> plane_order_;
    std::vector<std::uint32_t> host_inflight_;
    std::size_t flush_cursor_ = 0;

    std::vector<GcJob> jobs_;
    std::vector<bool> wl_pending_;
    bool background_enabled_ = true;
    bool preconditioning_ = false;
    std::uint64_t preconditioned_ = 0;

    std::uint64_t host_outstanding_ = 0;
    SimTime last_host_activity_ = 0;
    bool idle_check_pending_ = false;

    FtlStats stats_;
    std::vector<DecisionRecord> decisions_;
    std::vector<FtlObserver*> observers_;
};

}  // namespace rcsim
