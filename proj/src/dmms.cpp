#include "rcsim/dmms.hpp"

#include <string>

#include "rcsim/errors.hpp"

namespace rcsim {

const char* to_string(Urgency u) { return u == Urgency::foreground ? "foreground" : "background"; }

void ModeConfig::validate() const {
    if (!(u_threshold > 0.0 && u_threshold < 1.0))
        throw ConfigError("dmms.u_threshold must lie strictly between 0 and 1");
}

UtilizationTracker::UtilizationTracker(double window_us) { set_window(window_us); }

void UtilizationTracker::set_window(double window_us) {
    if (!(window_us > 0.0)) throw ContractViolation("utilization window must be positive");
    window_ = window_us;
}

void UtilizationTracker::record_sample(SimTime time, double u) {
    if (!(u >= 0.0 && u <= 1.0))
        throw ContractViolation("utilization sample out of range: " + std::to_string(u));
    samples_.emplace_back(time, u);
    sum_ += u;
    evict(time);
}

void UtilizationTracker::advance(SimTime now) { evict(now); }

void UtilizationTracker::evict(SimTime now) {
    while (!samples_.empty() &&
           static_cast<double>(samples_.front().first) < static_cast<double>(now) - window_) {
        sum_ -= samples_.front().second;
        samples_.pop_front();
    }
    if (samples_.empty()) sum_ = 0;
}

double UtilizationTracker::smoothed_u() const {
    if (samples_.empty()) return 0.0;
    return static_cast<double>(sum_ / static_cast<long double>(samples_.size()));
}

MigrationMode select_mode(const UtilizationTracker& tracker, const ModeConfig& cfg, Urgency urgency) {
    if (urgency == Urgency::foreground) return MigrationMode::rcopyback;
    return tracker.smoothed_u() > cfg.u_threshold ? MigrationMode::rcopyback : MigrationMode::offchip;
}

}  // namespace rcsim
