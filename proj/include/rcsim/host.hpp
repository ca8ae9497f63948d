#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "rcsim/event_engine.hpp"
#include "rcsim/ftl.hpp"
#include "rcsim/workload.hpp"

namespace rcsim {

/// Replays a request list against an Ftl.
///
/// Closed loop (default): request i is issued (arrival_i - arrival_{i-1})
/// after request i-1 completes, so recorded gaps become think times and
/// the device speed decides the run length. Open loop: request i is issued
/// at arrival_i regardless of outstanding work.
///
/// Writes carry unique content tags; every read is checked against the
/// last tag written to that page.
class HostReplay {
public:
    struct Options {
        bool closed_loop = true;
        /// Called just before request `index` is issued.
        std::function<void(std::size_t index)> on_issue;
    };

    HostReplay(EventEngine& engine, Ftl& ftl, std::vector<IoRequest> requests, Options options);
    HostReplay(EventEngine& engine, Ftl& ftl, std::vector<IoRequest> requests)
        : HostReplay(engine, ftl, std::move(requests), Options{}) {}

    HostReplay(const HostReplay&) = delete;
    HostReplay& operator=(const HostReplay&) = delete;

    /// Schedules the first request. Call once.
    void start();
    bool finished() const { return completed_ == requests_.size(); }

    const std::vector<IoRequest>& requests() const { return requests_; }
    std::size_t completed() const { return completed_; }
    SimTime issue_time(std::size_t i) const { return issue_[i]; }
    SimTime completion_time(std::size_t i) const { return done_[i]; }
    SimTime last_completion() const { return last_completion_; }

    std::uint64_t bytes_read() const { return bytes_read_; }
    std::uint64_t bytes_written() const { return bytes_written_; }
    std::uint64_t reads_checked() const { return reads_checked_; }
    std::uint64_t integrity_violations() const { return violations_; }

private:
    void issue(std::size_t i);
    void page_done(std::size_t i);
    std::uint64_t expected_tag(std::uint64_t lpn) const;

    EventEngine& engine_;
    Ftl& ftl_;
    std::vector<IoRequest> requests_;
    Options options_;
    std::vector<SimTime> issue_;
    std::vector<SimTime> done_;
    std::vector<std::uint32_t> pages_left_;
    std::size_t completed_ = 0;
    SimTime last_completion_ = 0;
    std::uint64_t next_tag_ = 1;
    std::unordered_map<std::uint64_t, std::uint64_t> written_;   // lpn -> last buffered tag
    std::unordered_map<std::uint64_t, std::uint32_t> unsettled_;  // lpn -> writes not yet buffered
    std::uint64_t bytes_read_ = 0;
    std::uint64_t bytes_written_ = 0;
    std::uint64_t reads_checked_ = 0;
    std::uint64_t violations_ = 0;
};

}  // namespace rcsim
