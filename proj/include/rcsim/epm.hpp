#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcsim/blocks.hpp"
#include "rcsim/geometry.hpp"
#include "rcsim/reliability.hpp"

namespace rcsim {

enum class MigrationMode : std::uint8_t { rcopyback, offchip };

const char* to_string(MigrationMode m);

struct MigrationDecision {
    MigrationMode mode = MigrationMode::offchip;
    std::uint32_t destination_slot = 0;

    bool operator==(const MigrationDecision&) const = default;
};

/// min(M_cpb, CT(pe)) for the block's current wear.
std::uint32_t effective_threshold(const BlockMeta& block, const CtTable& ct, std::uint32_t max_copyback);

/// rcopyback into slot c + 1 when the hint allows it and c is below the
/// block's effective threshold; otherwise an off-chip copy into slot 0.
MigrationDecision decide_destination(const BlockMeta& src, MigrationMode hint, const CtTable& ct,
                                     std::uint32_t max_copyback);

/// Per-plane active blocks: migration slots b[0..M_cpb], where b[i] only
/// receives pages that have taken exactly i copybacks, plus one host-write
/// block with counter 0.
class ActiveBlockSet {
public:
    ActiveBlockSet(BlockPool& pool, const CtTable& ct, std::uint32_t max_copyback);

    std::uint32_t migration_slots() const { return max_copyback_ + 1; }
    std::uint32_t host_slot() const { return max_copyback_ + 1; }
    std::uint32_t max_copyback() const { return max_copyback_; }

    std::optional<std::uint32_t> block(std::uint32_t plane, std::uint32_t slot) const {
        return slots_[plane][slot];
    }

    /// Makes the least-worn free block active in `slot` with counter = slot
    /// (host slot: counter 0). A block previously in the slot becomes full.
    /// Returns nullopt when that block's effective threshold is below `slot`,
    /// i.e. it could not legally hold pages with `slot` copybacks.
    /// Throws CapacityFault when the plane has no free block.
    std::optional<std::uint32_t> allocate_active(std::uint32_t plane, std::uint32_t slot);

    /// True when allocate_active(plane, slot) would succeed.
    bool can_allocate(std::uint32_t plane, std::uint32_t slot) const;

    /// Forgets the slot's block (it became full and was handed to the victim pool).
    void retire(std::uint32_t plane, std::uint32_t slot);

    bool is_active(std::uint32_t plane, std::uint32_t block) const;

private:
    BlockPool& pool_;
    const CtTable& ct_;
    std::uint32_t max_copyback_;
    std::vector<std::vector<std::optional<std::uint32_t>>> slots_;
};

struct CounterFootprint {
    std::uint64_t pages = 0;
    std::uint64_t blocks = 0;
    std::uint32_t bits_per_counter = 0;
    std::uint64_t per_page_bytes = 0;   ///< ceil(pages * bits / 8)
    std::uint64_t per_block_bytes = 0;  ///< ceil(blocks * bits / 8)
};

CounterFootprint memory_footprint(std::uint64_t capacity_bytes, std::uint32_t page_size,
                                  std::uint32_t pages_per_block, std::uint32_t bits_per_counter);

inline CounterFootprint memory_footprint(const Geometry& g, std::uint32_t bits_per_counter) {
    return memory_footprint(g.capacity_bytes(), g.page_size, g.pages_per_block, bits_per_counter);
}

}  // namespace rcsim
