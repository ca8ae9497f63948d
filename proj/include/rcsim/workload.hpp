#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rcsim/geometry.hpp"

namespace rcsim {

inline constexpr std::uint32_t kSectorSize = 512;

enum class IoOp : std::uint8_t { read, write };

/// One host request. `lba` counts 512-byte sectors.
struct IoRequest {
    SimTime arrival = 0;
    IoOp op = IoOp::write;
    std::uint64_t lba = 0;
    std::uint32_t length = 0;  ///< bytes, a positive multiple of 512
    bool operator==(const IoRequest&) const = default;
};

/// Reads `arrival_us,op,lba,length_bytes` lines (op R or W). Blank lines and
/// lines starting with '#' are skipped. Throws ParseError with the 1-based
/// line number. Out-of-order arrivals are stable-sorted and reported through
/// `warnings` when given.
std::vector<IoRequest> parse_trace(std::istream& in, std::vector<std::string>* warnings = nullptr);
std::vector<IoRequest> load_trace(const std::string& path, std::vector<std::string>* warnings = nullptr);

void write_trace(std::ostream& out, const std::vector<IoRequest>& requests);

/// Throws AddressError naming the first request that reaches past `logical_bytes`.
void validate_requests(const std::vector<IoRequest>& requests, std::uint64_t logical_bytes);

/// Read:write ratio of a named workload in tenths.
struct WorkloadMix {
    std::string name = "NTRX";
    double read_parts = 0.5;
    double write_parts = 9.5;
    bool sequential = false;  ///< writes walk the working set in order

    double read_fraction() const { return read_parts / (read_parts + write_parts); }
};

/// OLTP 7:3, NTRX 0.5:9.5, Fileserver 4:6, Varmail 4:6 (sequential updates),
/// plus "write-only". Throws ConfigError for other names.
WorkloadMix mix_named(const std::string& name);

struct SyntheticProfile {
    std::string name = "Low";
    /// Share of requests issued back to back. Requests come in phases of
    /// `phase_length`: the first round(burst_fraction * phase_length) have no
    /// gap, the rest are separated by exponential idle times.
    double burst_fraction = 0.3;
    double mean_idle = 1360.0;  ///< microseconds
    std::uint64_t working_set = 0;  ///< bytes
    double skew = 0.0;  ///< 0 = uniform; larger values concentrate accesses on low addresses
    std::uint32_t request_bytes = 16384;
    std::uint32_t phase_length = 1000;
    std::uint64_t seed = 1;

    double idle_fraction() const { return 1.0 - burst_fraction; }
    void validate() const;
};

/// High 0.7, Mid 0.5, Low 0.3 burst fraction. Throws ConfigError otherwise.
SyntheticProfile profile_named(const std::string& name);

std::vector<IoRequest> generate_synthetic(const SyntheticProfile& profile, const WorkloadMix& mix,
                                          std::uint64_t count);

/// Appends walk the working set from lba 0; with probability `overwrite_ratio`
/// a request instead rewrites a uniformly chosen, already appended page.
/// Once the working set is exhausted appends wrap to the start.
std::vector<IoRequest> generate_append_random(std::uint64_t working_set, std::uint64_t count,
                                              std::uint64_t seed, double overwrite_ratio = 0.5,
                                              std::uint32_t request_bytes = 16384);

/// mt19937_64 with hand-written mappings; the standard distributions are
/// implementation-defined and would make traces differ across libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();  ///< [0, 1)
    std::uint64_t below(std::uint64_t n);
    double exponential(double mean);

private:
    std::mt19937_64 engine_;
};

}  // namespace rcsim
