#pragma once

#include <cstdint>
#include <deque>
#include <utility>

#include "rcsim/epm.hpp"
#include "rcsim/geometry.hpp"

namespace rcsim {

enum class Urgency : std::uint8_t { foreground, background };

const char* to_string(Urgency u);

struct ModeConfig {
    double u_threshold = 0.5;

    void validate() const;
};

/// Moving average of write-buffer utilization over a trailing time window.
class UtilizationTracker {
public:
    explicit UtilizationTracker(double window_us);

    /// Appends (time, u), evicts samples older than the window and
    /// recomputes the mean. Throws ContractViolation if u is outside [0, 1].
    void record_sample(SimTime time, double u);

    /// Evicts samples that fell out of the window as of `now`.
    void advance(SimTime now);

    /// Arithmetic mean of the retained samples; 0 when none are retained.
    double smoothed_u() const;

    double window() const { return window_; }
    void set_window(double window_us);
    std::size_t sample_count() const { return samples_.size(); }

private:
    void evict(SimTime now);

    double window_;
    std::deque<std::pair<SimTime, double>> samples_;
    long double sum_ = 0;
};

/// Running estimate of the average block write time: an EWMA over the
/// intervals between consecutive fill-ups of the same active slot.
class BlockWriteTimer {
public:
    BlockWriteTimer(double initial_us, double weight = 0.2) : estimate_(initial_us), weight_(weight) {}

    void observe(double interval_us) { estimate_ += weight_ * (interval_us - estimate_); }
    double estimate() const { return estimate_; }

private:
    double estimate_;
    double weight_;
};

/// Foreground work always takes rcopyback; background work takes it only
/// while the smoothed utilization is strictly above the threshold.
MigrationMode select_mode(const UtilizationTracker& tracker, const ModeConfig& cfg, Urgency urgency);

/// The rcFTL-- comparison policy: rcopyback whenever the counter allows.
constexpr MigrationMode greedy_select_mode(Urgency) { return MigrationMode::rcopyback; }

}  // namespace rcsim
