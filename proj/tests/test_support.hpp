#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcsim/epm.hpp"
#include "rcsim/event_engine.hpp"
#include "rcsim/config.hpp"
#include "rcsim/ftl.hpp"

namespace rcsim::test {

inline Geometry tiny_geometry(std::uint32_t channels = 1, std::uint32_t chips = 1, std::uint32_t blocks = 16,
                              std::uint32_t pages = 8) {
    Geometry g;
    g.channels = channels;
    g.chips_per_channel = chips;
    g.planes_per_chip = 1;
    g.blocks_per_plane = blocks;
    g.pages_per_block = pages;
    g.page_size = 4096;
    return g;
}

/// A run small enough for unit tests: 4 planes of 64 blocks x 16 pages.
inline RunConfig small_run(const std::string& variant, std::uint64_t requests = 4000, std::uint64_t seed = 1) {
    RunConfig c;
    c.geometry = tiny_geometry(2, 2, 64, 16);
    apply_variant(c.ftl, variant);
    c.ftl.buffer_pages = 32;
    c.workload.request_bytes = 4096;
    c.workload.requests = requests;
    c.workload.mix = "NTRX";
    c.seed = seed;
    return c;
}

inline EngineConfig engine_config(const Geometry& g, bool log = true, std::uint32_t dram_ports = 1) {
    EngineConfig c;
    c.geometry = g;
    c.dram_ports = dram_ports;
    c.record_log = log;
    return c;
}

/// Independent per-page hop counter, fed only by FTL observer callbacks.
/// Counts every way a page could exceed its copyback budget.
class ShadowOracle : public FtlObserver {
public:
    ShadowOracle(const Geometry& g, const CtTable& ct, std::uint32_t max_copyback)
        : geom_(g), ct_(ct), m_(max_copyback) {}

    void on_host_program(SimTime, std::uint64_t, const PhysAddr& a, bool) override {
        hops_[encode_ppn(geom_, a)] = 0;
    }

    void on_migration(const MigrationEvent& e) override {
        ++migrations_;
        const auto src = encode_ppn(geom_, e.src);
        const auto it = hops_.find(src);
        // Pages written by preconditioning have no host-program callback: zero hops.
        const std::uint32_t src_hops = it == hops_.end() ? 0 : it->second;
        if (src_hops > e.src_counter) ++violations_;
        std::uint32_t dst_hops = 0;
        if (e.mode == MigrationMode::rcopyback) {
            ++copybacks_;
            dst_hops = src_hops + 1;
            if (e.dst_counter != e.src_counter + 1) ++violations_;
        } else if (e.dst_counter != 0) {
            ++violations_;
        }
        if (dst_hops > e.dst_counter || e.dst_counter > std::min(m_, ct_.lookup(e.dst_pe))) ++violations_;
        hops_[encode_ppn(geom_, e.dst)] = dst_hops;
        max_hops_ = std::max(max_hops_, dst_hops);
    }

    std::uint64_t violations() const { return violations_; }
    std::uint64_t migrations() const { return migrations_; }
    std::uint64_t copybacks() const { return copybacks_; }
    std::uint32_t max_hops() const { return max_hops_; }

private:
    Geometry geom_;
    CtTable ct_;
    std::uint32_t m_;
    std::unordered_map<std::uint64_t, std::uint32_t> hops_;
    std::uint64_t violations_ = 0;
    std::uint64_t migrations_ = 0;
    std::uint64_t copybacks_ = 0;
    std::uint32_t max_hops_ = 0;
};

/// Audits mapping bijectivity whenever a victim has been reclaimed.
class ConsistencyAuditor : public FtlObserver {
public:
    explicit ConsistencyAuditor(const Ftl& ftl) : ftl_(ftl) {}
    void on_gc_boundary(const GcSummary&) override {
        ++checks_;
        try {
            ftl_.check_consistency();
        } catch (const std::exception& e) {
            ++failures_;
            last_error_ = e.what();
        }
    }
    std::uint64_t checks() const { return checks_; }
    std::uint64_t failures() const { return failures_; }
    const std::string& last_error() const { return last_error_; }

private:
    const Ftl& ftl_;
    std::uint64_t checks_ = 0;
    std::uint64_t failures_ = 0;
    std::string last_error_;
};

}  // namespace rcsim::test
