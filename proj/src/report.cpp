#include "rcsim/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rcsim/errors.hpp"

namespace rcsim {

namespace {

template <typename Map>
std::optional<double> analyze(const Map& histogram, std::uint32_t n) {
    long double migrations = 0;
    long double forced = 0;
    for (const auto& [k, p] : histogram) {
        const long double w = static_cast<long double>(p);
        migrations += w * k;
        forced += w * (k / (std::uint64_t{n} + 1));
    }
    if (histogram.empty() || migrations <= 0) return std::nullopt;
    return static_cast<double>(1.0L - forced / migrations);
}

// Shortest round-trip form, same as the JSON output.
std::string number(double v) { return nlohmann::json(v).dump(); }

nlohmann::ordered_json counts_json(const MigrationCounts& c) {
    nlohmann::ordered_json j;
    j["copyback"] = c.copyback;
    j["offchip"] = c.offchip;
    j["total"] = c.total();
    return j;
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["variant"] = r.variant;
    j["seed"] = r.seed;
    j["requests"] = r.requests;
    j["host_bytes_read"] = r.host_bytes_read;
    j["host_bytes_written"] = r.host_bytes_written;
    j["elapsed_us"] = r.elapsed_us;
    j["throughput_mbps"] = r.throughput_mbps;
    j["iops"] = r.iops;
    j["warmup_fraction"] = r.warmup_fraction;
    j["steady_elapsed_us"] = r.steady_elapsed_us;
    j["steady_bytes"] = r.steady_bytes;
    j["steady_throughput_mbps"] = r.steady_throughput_mbps;
    j["steady_copyback_fraction"] = optional_json(r.steady_copyback_fraction);
    j["host_pages_written"] = r.host_pages_written;
    j["host_pages_programmed"] = r.host_pages_programmed;
    j["nand_pages_programmed"] = r.nand_pages_programmed;
    j["erases"] = r.erases;
    j["waf"] = r.waf;
    j["migrations"] = counts_json(r.migrations);
    for (std::size_t k = 0; k < kJobKinds; ++k) {
        const auto name = to_string(static_cast<JobKind>(k));
        j["migrations_by_job"][name] = counts_json(r.migrations_by_job[k]);
    }
    for (std::size_t k = 0; k < kJobKinds; ++k) {
        const auto name = to_string(static_cast<JobKind>(k));
        j["victims_by_job"][name] = counts_json(r.victims_by_job[k]);
    }
    j["decisions_rcopyback"] = r.decisions_rcopyback;
    j["decisions_offchip"] = r.decisions_offchip;
    j["mode_fallbacks"] = r.mode_fallbacks;
    j["engine_copyback_ops"] = r.engine_copyback_ops;
    j["engine_offchip_ops"] = r.engine_offchip_ops;
    j["pages_migrated"] = r.pages_migrated;
    j["avoided_offchip_fraction"] = optional_json(r.avoided_offchip_fraction);
    auto& h = j["histogram"] = nlohmann::ordered_json::object();
    for (const auto& [k, n] : r.histogram) h[std::to_string(k)] = n;
    j["idle_end_samples"] = r.idle_end_samples;
    j["idle_end_counter0_blocks"] = r.idle_end_counter0_blocks;
    j["reads_checked"] = r.reads_checked;
    j["integrity_violations"] = r.integrity_violations;
    j["normalized_throughput"] = optional_json(r.normalized_throughput);
    j["normalized_against"] = r.normalized_against;
    return j;
}

void flatten(std::ostream& out, const std::string& prefix, const nlohmann::ordered_json& j) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(out, prefix.empty() ? k : prefix + "." + k, v);
        return;
    }
    out << prefix << ',';
    if (j.is_string())
        out << j.get<std::string>();
    else if (!j.is_null())
        out << j.dump();
    out << '\n';
}

}  // namespace

std::optional<double> migration_histogram_analysis(const std::map<std::uint32_t, double>& histogram,
                                                   std::uint32_t n) {
    for (const auto& [k, p] : histogram)
        if (p < 0) throw ContractViolation("histogram weight for k=" + std::to_string(k) + " is negative");
    return analyze(histogram, n);
}

std::optional<double> migration_histogram_analysis(const std::map<std::uint32_t, std::uint64_t>& histogram,
                                                   std::uint32_t n) {
    return analyze(histogram, n);
}

std::map<std::uint32_t, double> parse_histogram(std::istream& in) {
    std::map<std::uint32_t, double> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(number, "expected 'k,weight'");
        const std::string ks = line.substr(0, comma), ws = line.substr(comma + 1);
        std::uint32_t k = 0;
        double w = 0;
        const auto r1 = std::from_chars(ks.data(), ks.data() + ks.size(), k);
        const auto r2 = std::from_chars(ws.data(), ws.data() + ws.size(), w);
        if (r1.ec != std::errc{} || r1.ptr != ks.data() + ks.size()) {
            if (number == 1 || out.empty()) continue;  // header row
            throw ParseError(number, "bad migration count '" + ks + "'");
        }
        if (r2.ec != std::errc{} || r2.ptr != ws.data() + ws.size() || w < 0)
            throw ParseError(number, "bad weight '" + ws + "'");
        out[k] += w;
    }
    return out;
}

void write_report_json(std::ostream& out, const RunReport& r) { out << to_json(r).dump(2) << '\n'; }

void write_report_csv(std::ostream& out, const RunReport& r) {
    out << "field,value\n";
    flatten(out, "", to_json(r));
}

void write_histogram_csv(std::ostream& out, const std::map<std::uint32_t, std::uint64_t>& histogram) {
    out << "migrations,page_versions\n";
    for (const auto& [k, n] : histogram) out << k << ',' << n << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<RunReport>& reports) {
    out << "variant,throughput_mbps,normalized_throughput,steady_throughput_mbps,copyback_migrations,"
           "offchip_migrations,waf,elapsed_us\n";
    for (const auto& r : reports) {
        out << r.name << ',' << number(r.throughput_mbps) << ','
            << (r.normalized_throughput ? number(*r.normalized_throughput) : "") << ','
            << number(r.steady_throughput_mbps) << ',' << r.migrations.copyback << ',' << r.migrations.offchip
            << ',' << number(r.waf) << ',' << r.elapsed_us << '\n';
    }
}

}  // namespace rcsim
