#include "rcsim/epm.hpp"

#include <algorithm>

#include "rcsim/errors.hpp"

namespace rcsim {

const char* to_string(MigrationMode m) {
    return m == MigrationMode::rcopyback ? "rcopyback" : "offchip";
}

std::uint32_t effective_threshold(const BlockMeta& block, const CtTable& ct, std::uint32_t max_copyback) {
    return std::min(max_copyback, ct.lookup(block.pe_cycles));
}

MigrationDecision decide_destination(const BlockMeta& src, MigrationMode hint, const CtTable& ct,
                                     std::uint32_t max_copyback) {
    if (hint == MigrationMode::rcopyback &&
        src.copyback_counter < effective_threshold(src, ct, max_copyback))
        return {MigrationMode::rcopyback, src.copyback_counter + 1};
    return {MigrationMode::offchip, 0};
}

ActiveBlockSet::ActiveBlockSet(BlockPool& pool, const CtTable& ct, std::uint32_t max_copyback)
    : pool_(pool), ct_(ct), max_copyback_(max_copyback) {
    slots_.assign(pool.geometry().total_planes(),
                  std::vector<std::optional<std::uint32_t>>(max_copyback + 2));
}

bool ActiveBlockSet::can_allocate(std::uint32_t plane, std::uint32_t slot) const {
    const auto candidate = pool_.peek_free(plane);
    if (!candidate) return false;
    if (slot == host_slot() || slot == 0) return true;
    return effective_threshold(pool_.meta(plane, *candidate), ct_, max_copyback_) >= slot;
}

std::optional<std::uint32_t> ActiveBlockSet::allocate_active(std::uint32_t plane, std::uint32_t slot) {
    if (slot > host_slot()) throw ContractViolation("active slot out of range");
    const auto candidate = pool_.peek_free(plane);
    if (!candidate)
        throw CapacityFault("plane " + std::to_string(plane) + " has no free block for active slot " +
                            std::to_string(slot));
    if (slot != host_slot() && slot != 0 &&
        effective_threshold(pool_.meta(plane, *candidate), ct_, max_copyback_) < slot)
        return std::nullopt;

    if (auto prev = slots_[plane][slot]) {
        auto& m = pool_.meta(plane, *prev);
        if (m.state == BlockState::active) m.state = BlockState::full;
    }
    const auto block = pool_.take_free(plane);
    pool_.meta(plane, block).copyback_counter = slot == host_slot() ? 0 : slot;
    slots_[plane][slot] = block;
    return block;
}

void ActiveBlockSet::retire(std::uint32_t plane, std::uint32_t slot) {
    if (auto b = slots_[plane][slot]) {
        auto& m = pool_.meta(plane, *b);
        if (m.state == BlockState::active) m.state = BlockState::full;
    }
    slots_[plane][slot].reset();
}

bool ActiveBlockSet::is_active(std::uint32_t plane, std::uint32_t block) const {
    for (const auto& s : slots_[plane])
        if (s && *s == block) return true;
    return false;
}

CounterFootprint memory_footprint(std::uint64_t capacity_bytes, std::uint32_t page_size,
                                  std::uint32_t pages_per_block, std::uint32_t bits_per_counter) {
    if (page_size == 0 || pages_per_block == 0)
        throw ConfigError("memory_footprint needs page_size and pages_per_block >= 1");
    CounterFootprint f;
    f.bits_per_counter = bits_per_counter;
    f.pages = capacity_bytes / page_size;
    f.blocks = f.pages / pages_per_block;
    f.per_page_bytes = (f.pages * bits_per_counter + 7) / 8;
    f.per_block_bytes = (f.blocks * bits_per_counter + 7) / 8;
    return f;
}

}  // namespace rcsim
