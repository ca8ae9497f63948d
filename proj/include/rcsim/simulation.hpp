#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcsim/config.hpp"
#include "rcsim/ftl.hpp"
#include "rcsim/report.hpp"
#include "rcsim/workload.hpp"

namespace rcsim {

/// Optional by-products of a run.
struct RunArtifacts {
    std::string event_log_csv;     ///< filled when RunConfig::record_event_log
    std::string decision_log_csv;  ///< `time,urgency,smoothed_u,mode`, when record_decisions
    std::vector<Snapshot> snapshots;
    std::vector<std::uint64_t> idle_end_counter0;  ///< counter-0 blocks as each burst begins
    std::vector<std::string> warnings;
};

/// The request list a run replays, sized to `logical_bytes`.
std::vector<IoRequest> build_workload(const RunConfig& cfg, std::uint64_t logical_bytes,
                                      std::vector<std::string>* warnings = nullptr);

/// Default idle mean: twice the write service time of one request.
double default_mean_idle(const RunConfig& cfg);

/// Runs one simulation to completion. Observers are attached to the FTL
/// before preconditioning. Throws ConfigError, CapacityFault or DataLossFault.
RunReport run(const RunConfig& cfg, RunArtifacts* artifacts = nullptr,
              const std::vector<FtlObserver*>& observers = {});

/// Runs every variant on the same base configuration, in parallel, and
/// normalizes throughput against "baseline" when present, else the first
/// variant. Reports come back in the order given.
std::vector<RunReport> sweep(const RunConfig& base, const std::vector<std::string>& variants,
                             unsigned threads = 0);

void write_snapshots_csv(std::ostream& out, const std::vector<Snapshot>& snapshots);

}  // namespace rcsim
