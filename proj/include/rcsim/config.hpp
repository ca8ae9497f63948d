#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcsim/ftl.hpp"
#include "rcsim/geometry.hpp"
#include "rcsim/reliability.hpp"

namespace rcsim {

struct WorkloadSpec {
    std::string source = "synthetic";  ///< synthetic | append_random | trace
    std::string trace_path;
    std::string profile = "Low";        ///< High | Mid | Low | custom
    double burst_fraction = 0.3;        ///< used when profile = custom
    std::string mix = "NTRX";
    std::uint64_t requests = 20000;
    std::uint32_t request_bytes = 16384;
    double working_set_fraction = 1.0;  ///< of the logical capacity
    double skew = 0.0;
    double mean_idle = 0.0;             ///< microseconds; 0 = 2 x (tDMAin + tPROG) per page
    std::uint32_t phase_length = 1000;
    double overwrite_ratio = 0.5;       ///< append_random only
};

struct RunConfig {
    std::string name;  ///< defaults to the variant name
    Geometry geometry;
    TimingParams timing;
    std::uint32_t dram_ports = 1;
    FtlConfig ftl;
    double retention_months = 12.0;
    ErrorModel error_model;
    double precondition = 1.0;   ///< fraction of the logical space mapped before the run
    std::uint32_t age_pe_max = 0;  ///< initial wear drawn uniformly from [0, age_pe_max]
    WorkloadSpec workload;
    std::uint64_t seed = 1;
    bool closed_loop = true;
    double warmup_fraction = 0.25;  ///< share of requests excluded from steady-state metrics
    bool record_event_log = false;
    bool record_decisions = false;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Sets one `section.key` field from text. Throws ConfigError for unknown
/// keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// INI text: sections geometry, timing, engine, ftl, reliability, workload,
/// run. Keys match the field names; absent keys keep their defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Every key with its current value, in the format parse_config reads.
void write_config(std::ostream& out, const RunConfig& cfg);

/// baseline, rcftl<M>, rcftl<M>_greedy or rcftl<M>--.
void apply_variant(FtlConfig& ftl, const std::string& variant);
std::string variant_name(const FtlConfig& ftl);

}  // namespace rcsim
