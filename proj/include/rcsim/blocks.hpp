#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rcsim/geometry.hpp"

namespace rcsim {

enum class BlockState : std::uint8_t { free, active, full, erasing };

const char* to_string(BlockState s);

struct BlockMeta {
    std::uint32_t pe_cycles = 0;
    std::uint32_t copyback_counter = 0;  ///< c: copybacks every page here has taken
    std::vector<bool> valid;
    std::uint32_t valid_count = 0;
    std::uint32_t write_pointer = 0;
    BlockState state = BlockState::free;

    std::uint32_t invalid_count() const { return write_pointer - valid_count; }
};

/// Per-block metadata and per-plane free pools. Free blocks are handed out
/// least-worn first (ties by lowest block index).
class BlockPool {
public:
    explicit BlockPool(const Geometry& g);

    const Geometry& geometry() const { return geom_; }

    std::uint64_t id(std::uint32_t plane, std::uint32_t block) const {
        return std::uint64_t{plane} * geom_.blocks_per_plane + block;
    }

    BlockMeta& meta(std::uint32_t plane, std::uint32_t block) { return blocks_[id(plane, block)]; }
    const BlockMeta& meta(std::uint32_t plane, std::uint32_t block) const {
        return blocks_[id(plane, block)];
    }

    std::size_t free_count(std::uint32_t plane) const { return free_[plane].size(); }

    /// Least-worn free block of the plane, if any.
    std::optional<std::uint32_t> peek_free(std::uint32_t plane) const;

    /// Removes the least-worn free block and marks it active.
    std::uint32_t take_free(std::uint32_t plane);

    /// Returns an erased block to the pool: pe + 1, counter and bitmap cleared.
    void erase(std::uint32_t plane, std::uint32_t block);

    /// Overrides the wear of a free block (used to age a fresh device).
    void set_pe(std::uint32_t plane, std::uint32_t block, std::uint32_t pe);

    std::pair<std::uint32_t, std::uint32_t> pe_range(std::uint32_t plane) const;

private:
    Geometry geom_;
    std::vector<BlockMeta> blocks_;
    std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>> free_;  // (pe, block)
};

}  // namespace rcsim
