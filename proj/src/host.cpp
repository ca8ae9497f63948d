#include "rcsim/host.hpp"

#include "rcsim/errors.hpp"

namespace rcsim {

HostReplay::HostReplay(EventEngine& engine, Ftl& ftl, std::vector<IoRequest> requests, Options options)
    : engine_(engine),
      ftl_(ftl),
      requests_(std::move(requests)),
      options_(std::move(options)),
      issue_(requests_.size(), 0),
      done_(requests_.size(), 0),
      pages_left_(requests_.size(), 0) {
    validate_requests(requests_, ftl_.logical_pages() * ftl_.geometry().page_size);
}

void HostReplay::start() {
    if (requests_.empty()) return;
    if (options_.closed_loop) {
        engine_.schedule(requests_[0].arrival, PhaseKind::host_arrival, [this] { issue(0); });
    } else {
        for (std::size_t i = 0; i < requests_.size(); ++i)
            engine_.schedule(requests_[i].arrival, PhaseKind::host_arrival, [this, i] { issue(i); });
    }
}

std::uint64_t HostReplay::expected_tag(std::uint64_t lpn) const {
    if (auto it = written_.find(lpn); it != written_.end()) return it->second;
    return lpn < ftl_.preconditioned_pages() ? Ftl::precondition_tag(lpn) : Ftl::kZeroTag;
}

void HostReplay::issue(std::size_t i) {
    if (options_.on_issue) options_.on_issue(i);
    const auto& r = requests_[i];
    issue_[i] = engine_.now();
    const std::uint64_t page = ftl_.geometry().page_size;
    const std::uint64_t first = r.lba * kSectorSize / page;
    const std::uint64_t last = (r.lba * kSectorSize + r.length - 1) / page;
    pages_left_[i] = static_cast<std::uint32_t>(last - first + 1);

    for (std::uint64_t lpn = first; lpn <= last; ++lpn) {
        if (r.op == IoOp::write) {
            const auto tag = next_tag_++;
            ++unsettled_[lpn];
            ftl_.handle_write(lpn, tag, [this, i, lpn, tag](SimTime) {
                written_[lpn] = tag;
                if (auto it = unsettled_.find(lpn); --it->second == 0) unsettled_.erase(it);
                page_done(i);
            });
        } else {
            // A read racing a not-yet-buffered write has no single right answer.
            const bool checkable = !unsettled_.contains(lpn);
            const auto expected = expected_tag(lpn);
            ftl_.handle_read(lpn, [this, i, checkable, expected](SimTime, std::uint64_t tag) {
                if (checkable) {
                    ++reads_checked_;
                    if (tag != expected) ++violations_;
                }
                page_done(i);
            });
        }
    }
}

void HostReplay::page_done(std::size_t i) {
    if (--pages_left_[i] != 0) return;
    const auto& r = requests_[i];
    done_[i] = engine_.now();
    last_completion_ = std::max(last_completion_, done_[i]);
    (r.op == IoOp::write ? bytes_written_ : bytes_read_) += r.length;
    ++completed_;
    if (options_.closed_loop && i + 1 < requests_.size()) {
        const SimTime gap = requests_[i + 1].arrival - r.arrival;
        engine_.schedule(engine_.now() + gap, PhaseKind::host_arrival, [this, i] { issue(i + 1); });
    }
}

}  // namespace rcsim
