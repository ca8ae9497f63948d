#include "rcsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "rcsim/errors.hpp"

namespace rcsim {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection keeps the result unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        const auto x = engine_();
        if (x < limit) return x % n;
    }
}

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform()); }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
    field = trim(field);
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end)
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(field) + "'");
    return value;
}

}  // namespace

std::vector<IoRequest> parse_trace(std::istream& in, std::vector<std::string>* warnings) {
    std::vector<IoRequest> out;
    std::string raw;
    std::size_t line = 0;
    bool sorted = true;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty() || text.front() == '#') continue;

        std::string_view fields[4];
        std::size_t n = 0;
        std::string_view rest = text;
        for (;;) {
            const auto comma = rest.find(',');
            if (n == 4) throw ParseError(line, "expected 4 fields, got more");
            fields[n++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (n != 4) throw ParseError(line, "expected 4 fields, got " + std::to_string(n));

        IoRequest r;
        r.arrival = parse_number<SimTime>(fields[0], line, "arrival");
        const auto op = trim(fields[1]);
        if (op == "R" || op == "r")
            r.op = IoOp::read;
        else if (op == "W" || op == "w")
            r.op = IoOp::write;
        else
            throw ParseError(line, "bad op '" + std::string(op) + "' (expected R or W)");
        r.lba = parse_number<std::uint64_t>(fields[2], line, "lba");
        r.length = parse_number<std::uint32_t>(fields[3], line, "length");
        if (r.length == 0 || r.length % kSectorSize != 0)
            throw ParseError(line, "length " + std::to_string(r.length) + " is not a positive multiple of 512");
        if (!out.empty() && r.arrival < out.back().arrival) sorted = false;
        out.push_back(r);
    }
    if (!sorted) {
        std::stable_sort(out.begin(), out.end(),
                         [](const IoRequest& a, const IoRequest& b) { return a.arrival < b.arrival; });
        if (warnings) warnings->push_back("trace arrivals were not monotone; requests sorted by arrival");
    }
    return out;
}

std::vector<IoRequest> load_trace(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace '" + path + "'");
    return parse_trace(in, warnings);
}

void write_trace(std::ostream& out, const std::vector<IoRequest>& requests) {
    out << "# arrival_us,op,lba,length_bytes\n";
    for (const auto& r : requests)
        out << r.arrival << ',' << (r.op == IoOp::read ? 'R' : 'W') << ',' << r.lba << ',' << r.length << '\n';
}

void validate_requests(const std::vector<IoRequest>& requests, std::uint64_t logical_bytes) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto& r = requests[i];
        const auto end = r.lba * kSectorSize + r.length;
        if (r.length == 0 || r.length % kSectorSize != 0 || end > logical_bytes)
            throw AddressError("request " + std::to_string(i) + " (lba " + std::to_string(r.lba) + ", " +
                               std::to_string(r.length) + " bytes) exceeds logical capacity of " +
                               std::to_string(logical_bytes) + " bytes");
    }
}

WorkloadMix mix_named(const std::string& name) {
    if (name == "OLTP") return {"OLTP", 7.0, 3.0, false};
    if (name == "NTRX") return {"NTRX", 0.5, 9.5, false};
    if (name == "Fileserver") return {"Fileserver", 4.0, 6.0, false};
    if (name == "Varmail") return {"Varmail", 4.0, 6.0, true};
    if (name == "write-only") return {"write-only", 0.0, 10.0, false};
    throw ConfigError("unknown workload mix '" + name + "' (OLTP, NTRX, Fileserver, Varmail, write-only)");
}

void SyntheticProfile::validate() const {
    if (!(burst_fraction >= 0.0 && burst_fraction <= 1.0))
        throw ConfigError("workload.burst_fraction must lie in [0, 1]");
    if (!(mean_idle >= 0.0)) throw ConfigError("workload.mean_idle must be >= 0");
    if (request_bytes == 0 || request_bytes % kSectorSize != 0)
        throw ConfigError("workload.request_bytes must be a positive multiple of 512");
    if (working_set < request_bytes) throw ConfigError("workload working set is smaller than one request");
    if (phase_length == 0) throw ConfigError("workload.phase_length must be >= 1");
    if (!(skew >= 0.0)) throw ConfigError("workload.skew must be >= 0");
}

SyntheticProfile profile_named(const std::string& name) {
    SyntheticProfile p;
    p.name = name;
    if (name == "High")
        p.burst_fraction = 0.7;
    else if (name == "Mid")
        p.burst_fraction = 0.5;
    else if (name == "Low")
        p.burst_fraction = 0.3;
    else
        throw ConfigError("unknown synthetic profile '" + name + "' (High, Mid, Low)");
    return p;
}

std::vector<IoRequest> generate_synthetic(const SyntheticProfile& profile, const WorkloadMix& mix,
                                          std::uint64_t count) {
    profile.validate();
    Rng rng(profile.seed);
    const std::uint64_t slots = profile.working_set / profile.request_bytes;
    const std::uint64_t sectors = profile.request_bytes / kSectorSize;
    const auto burst_per_phase = static_cast<std::uint64_t>(std::llround(profile.burst_fraction * profile.phase_length));
    const double read_fraction = mix.read_fraction();

    std::vector<IoRequest> out;
    out.reserve(count);
    SimTime t = 0;
    std::uint64_t seq_cursor = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        if (i % profile.phase_length >= burst_per_phase && i > 0)
            t += std::max<SimTime>(1, static_cast<SimTime>(std::llround(rng.exponential(profile.mean_idle))));
        IoRequest r;
        r.arrival = t;
        r.length = profile.request_bytes;
        r.op = rng.uniform() < read_fraction ? IoOp::read : IoOp::write;
        std::uint64_t slot;
        if (mix.sequential && r.op == IoOp::write) {
            slot = seq_cursor;
            seq_cursor = (seq_cursor + 1) % slots;
        } else {
            const double u = std::pow(rng.uniform(), 1.0 + profile.skew);
            slot = std::min(slots - 1, static_cast<std::uint64_t>(u * static_cast<double>(slots)));
        }
        r.lba = slot * sectors;
        out.push_back(r);
    }
    return out;
}

std::vector<IoRequest> generate_append_random(std::uint64_t working_set, std::uint64_t count,
                                              std::uint64_t seed, double overwrite_ratio,
                                              std::uint32_t request_bytes) {
    if (request_bytes == 0 || request_bytes % kSectorSize != 0)
        throw ConfigError("request size must be a positive multiple of 512");
    if (!(overwrite_ratio >= 0.0 && overwrite_ratio <= 1.0))
        throw ConfigError("overwrite ratio must lie in [0, 1]");
    const std::uint64_t slots = working_set / request_bytes;
    if (count > 0 && slots == 0) throw ConfigError("working set is smaller than one request");
    const std::uint64_t sectors = request_bytes / kSectorSize;

    Rng rng(seed);
    std::vector<IoRequest> out;
    out.reserve(count);
    std::uint64_t appended = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        IoRequest r;
        r.arrival = 0;
        r.op = IoOp::write;
        r.length = request_bytes;
        const bool overwrite = appended > 0 && rng.uniform() < overwrite_ratio;
        std::uint64_t slot;
        if (overwrite) {
            slot = rng.below(std::min(appended, slots));
        } else {
            slot = appended % slots;
            ++appended;
        }
        r.lba = slot * sectors;
        out.push_back(r);
    }
    return out;
}

}  // namespace rcsim
