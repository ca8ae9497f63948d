#include "rcsim/blocks.hpp"

#include <algorithm>
#include <limits>

#include "rcsim/errors.hpp"

namespace rcsim {

const char* to_string(BlockState s) {
    switch (s) {
        case BlockState::free: return "free";
        case BlockState::active: return "active";
        case BlockState::full: return "full";
        case BlockState::erasing: return "erasing";
    }
    return "?";
}

BlockPool::BlockPool(const Geometry& g) : geom_(g) {
    blocks_.resize(g.total_blocks());
    for (auto& b : blocks_) b.valid.assign(g.pages_per_block, false);
    free_.resize(g.total_planes());
    for (std::uint32_t p = 0; p < g.total_planes(); ++p)
        for (std::uint32_t b = 0; b < g.blocks_per_plane; ++b) free_[p].emplace(0, b);
}

std::optional<std::uint32_t> BlockPool::peek_free(std::uint32_t plane) const {
    if (free_[plane].empty()) return std::nullopt;
    return free_[plane].begin()->second;
}

std::uint32_t BlockPool::take_free(std::uint32_t plane) {
    auto& pool = free_[plane];
    if (pool.empty())
        throw CapacityFault("no free block left in plane " + std::to_string(plane));
    const auto block = pool.begin()->second;
    pool.erase(pool.begin());
    auto& m = meta(plane, block);
    m.state = BlockState::active;
    return block;
}

void BlockPool::erase(std::uint32_t plane, std::uint32_t block) {
    auto& m = meta(plane, block);
    ++m.pe_cycles;
    m.copyback_counter = 0;
    std::fill(m.valid.begin(), m.valid.end(), false);
    m.valid_count = 0;
    m.write_pointer = 0;
    m.state = BlockState::free;
    free_[plane].emplace(m.pe_cycles, block);
}

void BlockPool::set_pe(std::uint32_t plane, std::uint32_t block, std::uint32_t pe) {
    auto& m = meta(plane, block);
    if (m.state != BlockState::free)
        throw ContractViolation("set_pe on a block that is not free");
    free_[plane].erase({m.pe_cycles, block});
    m.pe_cycles = pe;
    free_[plane].emplace(pe, block);
}

std::pair<std::uint32_t, std::uint32_t> BlockPool::pe_range(std::uint32_t plane) const {
    std::uint32_t lo = std::numeric_limits<std::uint32_t>::max(), hi = 0;
    for (std::uint32_t b = 0; b < geom_.blocks_per_plane; ++b) {
        const auto pe = meta(plane, b).pe_cycles;
        lo = std::min(lo, pe);
        hi = std::max(hi, pe);
    }
    return {lo, hi};
}

}  // namespace rcsim
