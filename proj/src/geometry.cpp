#include "rcsim/geometry.hpp"

#include <limits>

#include "rcsim/errors.hpp"

namespace rcsim {

namespace {

void require_positive(std::uint64_t v, const char* field) {
    if (v == 0) throw ConfigError(std::string("geometry.") + field + " must be >= 1");
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* field) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw ConfigError(std::string("geometry.") + field + " overflows the capacity");
    return a * b;
}

}  // namespace

std::string to_string(const PhysAddr& a) {
    return "(ch=" + std::to_string(a.channel) + ",chip=" + std::to_string(a.chip) +
           ",plane=" + std::to_string(a.plane) + ",block=" + std::to_string(a.block) +
           ",page=" + std::to_string(a.page) + ")";
}

std::uint64_t validate_geometry(const Geometry& g) {
    require_positive(g.channels, "channels");
    require_positive(g.chips_per_channel, "chips_per_channel");
    require_positive(g.planes_per_chip, "planes_per_chip");
    require_positive(g.blocks_per_plane, "blocks_per_plane");
    require_positive(g.pages_per_block, "pages_per_block");
    require_positive(g.page_size, "page_size");
    if ((g.page_size & (g.page_size - 1)) != 0)
        throw ConfigError("geometry.page_size must be a power of two");

    std::uint64_t n = g.channels;
    n = checked_mul(n, g.chips_per_channel, "chips_per_channel");
    n = checked_mul(n, g.planes_per_chip, "planes_per_chip");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("geometry.planes_per_chip overflows the plane count");
    n = checked_mul(n, g.blocks_per_plane, "blocks_per_plane");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("geometry.blocks_per_plane overflows the block count");
    n = checked_mul(n, g.pages_per_block, "pages_per_block");
    return checked_mul(n, g.page_size, "page_size");
}

void validate_timing(const TimingParams& t) {
    auto req = [](SimTime v, const char* field) {
        if (v == 0) throw ConfigError(std::string("timing.") + field + " must be > 0");
    };
    req(t.t_read, "t_read");
    req(t.t_prog, "t_prog");
    req(t.t_erase, "t_erase");
    req(t.t_dma_out, "t_dma_out");
    req(t.t_dma_in, "t_dma_in");
}

void check_address(const Geometry& g, const PhysAddr& a) {
    if (a.channel >= g.channels || a.chip >= g.chips_per_channel ||
        a.plane >= g.planes_per_chip || a.block >= g.blocks_per_plane ||
        a.page >= g.pages_per_block)
        throw AddressError("physical address out of range: " + to_string(a));
}

bool copyback_compatible(const Geometry& g, const PhysAddr& src, const PhysAddr& dst) {
    check_address(g, src);
    check_address(g, dst);
    return src.channel == dst.channel && src.chip == dst.chip && src.plane == dst.plane;
}

std::uint32_t plane_index(const Geometry& g, const PhysAddr& a) {
    return (a.channel * g.chips_per_channel + a.chip) * g.planes_per_chip + a.plane;
}

std::uint64_t block_index(const Geometry& g, const PhysAddr& a) {
    return std::uint64_t{plane_index(g, a)} * g.blocks_per_plane + a.block;
}

std::uint64_t encode_ppn(const Geometry& g, const PhysAddr& a) {
    return block_index(g, a) * g.pages_per_block + a.page;
}

PhysAddr decode_ppn(const Geometry& g, std::uint64_t ppn) {
    PhysAddr a;
    a.page = static_cast<std::uint32_t>(ppn % g.pages_per_block);
    std::uint64_t rest = ppn / g.pages_per_block;
    a.block = static_cast<std::uint32_t>(rest % g.blocks_per_plane);
    rest /= g.blocks_per_plane;
    a.plane = static_cast<std::uint32_t>(rest % g.planes_per_chip);
    rest /= g.planes_per_chip;
    a.chip = static_cast<std::uint32_t>(rest % g.chips_per_channel);
    a.channel = static_cast<std::uint32_t>(rest / g.chips_per_channel);
    return a;
}

PhysAddr plane_address(const Geometry& g, std::uint32_t plane) {
    PhysAddr a;
    a.plane = plane % g.planes_per_chip;
    const std::uint32_t chip = plane / g.planes_per_chip;
    a.chip = chip % g.chips_per_channel;
    a.channel = chip / g.chips_per_channel;
    return a;
}

}  // namespace rcsim
