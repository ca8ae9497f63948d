#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcsim/ftl.hpp"

namespace rcsim {

struct MigrationCounts {
    std::uint64_t copyback = 0;
    std::uint64_t offchip = 0;
    std::uint64_t total() const { return copyback + offchip; }
};

struct RunReport {
    std::string name;
    std::string variant;
    std::uint64_t seed = 0;

    std::uint64_t requests = 0;
    std::uint64_t host_bytes_read = 0;
    std::uint64_t host_bytes_written = 0;
    SimTime elapsed_us = 0;
    double throughput_mbps = 0.0;  ///< host bytes per microsecond
    double iops = 0.0;

    double warmup_fraction = 0.0;
    SimTime steady_elapsed_us = 0;
    std::uint64_t steady_bytes = 0;
    double steady_throughput_mbps = 0.0;
    std::optional<double> steady_copyback_fraction;

    std::uint64_t host_pages_written = 0;
    std::uint64_t host_pages_programmed = 0;
    std::uint64_t nand_pages_programmed = 0;
    std::uint64_t erases = 0;
    double waf = 0.0;

    MigrationCounts migrations;
    std::array<MigrationCounts, kJobKinds> migrations_by_job{};
    std::array<MigrationCounts, kJobKinds> victims_by_job{};
    std::uint64_t decisions_rcopyback = 0;
    std::uint64_t decisions_offchip = 0;
    std::uint64_t mode_fallbacks = 0;
    std::uint64_t engine_copyback_ops = 0;
    std::uint64_t engine_offchip_ops = 0;

    std::map<std::uint32_t, std::uint64_t> histogram;  ///< migrations per page version -> versions
    std::uint64_t pages_migrated = 0;
    std::optional<double> avoided_offchip_fraction;  ///< histogram analysis at this variant's M

    std::uint64_t idle_end_samples = 0;
    double idle_end_counter0_blocks = 0.0;  ///< mean count of counter-0 blocks when a burst begins

    std::uint64_t reads_checked = 0;
    std::uint64_t integrity_violations = 0;

    std::optional<double> normalized_throughput;
    std::string normalized_against;
};

/// Share of migrations that need no off-chip copy when every (n+1)-th
/// migration of a page must be off-chip:
/// 1 - sum p(k) floor(k / (n+1)) / sum p(k) k. Empty or massless input has
/// no answer.
std::optional<double> migration_histogram_analysis(const std::map<std::uint32_t, double>& histogram,
                                                   std::uint32_t n);
std::optional<double> migration_histogram_analysis(const std::map<std::uint32_t, std::uint64_t>& histogram,
                                                   std::uint32_t n);

/// `k,weight` lines; '#' comments allowed. Throws ParseError.
std::map<std::uint32_t, double> parse_histogram(std::istream& in);

void write_report_json(std::ostream& out, const RunReport& r);
/// `field,value` rows in the same order as the JSON.
void write_report_csv(std::ostream& out, const RunReport& r);
/// `migrations,page_versions`
void write_histogram_csv(std::ostream& out, const std::map<std::uint32_t, std::uint64_t>& histogram);
/// One row per variant.
void write_sweep_csv(std::ostream& out, const std::vector<RunReport>& reports);

}  // namespace rcsim
