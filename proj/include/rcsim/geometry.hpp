#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace rcsim {

/// Simulated time in integer microseconds.
using SimTime = std::uint64_t;

/// SSD organization. Defaults give the 64 GiB evaluation device:
/// 8 channels x 8 chips x 1 plane x 1024 blocks x 64 pages x 16 KiB.
struct Geometry {
    std::uint32_t channels = 8;
    std::uint32_t chips_per_channel = 8;
    std::uint32_t planes_per_chip = 1;
    std::uint32_t blocks_per_plane = 1024;
    std::uint32_t pages_per_block = 64;
    std::uint32_t page_size = 16384;  ///< bytes, power of two

    std::uint32_t total_chips() const { return channels * chips_per_channel; }
    std::uint32_t total_planes() const { return total_chips() * planes_per_chip; }
    std::uint64_t total_blocks() const {
        return std::uint64_t{total_planes()} * blocks_per_plane;
    }
    std::uint64_t total_pages() const { return total_blocks() * pages_per_block; }
    std::uint64_t pages_per_plane() const {
        return std::uint64_t{blocks_per_plane} * pages_per_block;
    }
    std::uint64_t capacity_bytes() const { return total_pages() * page_size; }

    bool operator==(const Geometry&) const = default;
};

/// NAND operation latencies in microseconds. Only t_prog = 640 comes from the
/// evaluated device; the remaining defaults are typical 1x-nm MLC values.
/// ECC encode/decode time is folded into the DMA terms.
struct TimingParams {
    SimTime t_read = 60;     ///< cells -> plane register (tR)
    SimTime t_prog = 640;    ///< register -> cells (tPROG)
    SimTime t_erase = 3500;
    SimTime t_dma_out = 40;  ///< register -> DRAM buffer, per page
    SimTime t_dma_in = 40;   ///< DRAM buffer -> register, per page

    bool operator==(const TimingParams&) const = default;
};

/// Physical page coordinate.
struct PhysAddr {
    std::uint32_t channel = 0;
    std::uint32_t chip = 0;
    std::uint32_t plane = 0;
    std::uint32_t block = 0;
    std::uint32_t page = 0;

    auto operator<=>(const PhysAddr&) const = default;
};

std::string to_string(const PhysAddr& a);

/// Checks every Geometry invariant and returns the capacity in bytes.
/// Throws ConfigError naming the offending field.
std::uint64_t validate_geometry(const Geometry& g);

/// Throws ConfigError unless every latency is positive.
void validate_timing(const TimingParams& t);

/// Contention-free off-chip copy: tR + tDMAout + tDMAin + tPROG.
constexpr SimTime latency_offchip_copy(const TimingParams& t) {
    return t.t_read + t.t_dma_out + t.t_dma_in + t.t_prog;
}

/// Copyback never leaves the plane: tR + tPROG.
constexpr SimTime latency_copyback(const TimingParams& t) { return t.t_read + t.t_prog; }

/// Throws AddressError if any index is out of range.
void check_address(const Geometry& g, const PhysAddr& a);

/// True iff both pages share channel, chip and plane (same page register).
bool copyback_compatible(const Geometry& g, const PhysAddr& src, const PhysAddr& dst);

// Flat indexing. Planes are numbered channel-major, then chip, then plane;
// blocks and pages are contiguous within a plane.

std::uint32_t plane_index(const Geometry& g, const PhysAddr& a);
std::uint64_t block_index(const Geometry& g, const PhysAddr& a);
std::uint64_t encode_ppn(const Geometry& g, const PhysAddr& a);
PhysAddr decode_ppn(const Geometry& g, std::uint64_t ppn);
PhysAddr plane_address(const Geometry& g, std::uint32_t plane);

inline std::uint32_t chip_index(const Geometry& g, const PhysAddr& a) {
    return a.channel * g.chips_per_channel + a.chip;
}

}  // namespace rcsim
