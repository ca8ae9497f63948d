// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <tuple>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "rcsim/config.hpp"
#include "rcsim/errors.hpp"
#include "rcsim/event_engine.hpp"
#include "rcsim/host.hpp"
#include "rcsim/reliability.hpp"
#include "rcsim/report.hpp"
#include "rcsim/simulation.hpp"
#include "test_support.hpp"

using namespace rcsim;

namespace {

// Pinned tolerances.
constexpr std::uint64_t kStressMigrations = 10'000'000;
constexpr double kCopybackTarget = 2.0 / 3.0;
constexpr double kCopybackTolerance = 0.05;
constexpr double kMinRcftl2Gain = 1.10;
constexpr double kHistogramTarget = 0.86;
constexpr double kHistogramTolerance = 0.03;
constexpr double kSmallMassTarget = 0.77;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string json_of(const RunReport& r) {
    std::ostringstream out;
    write_report_json(out, r);
    return out.str();
}

// Runs are kept so the determinism check can repeat them.
struct RecordedRun {
    std::string label;
    RunConfig cfg;
    std::vector<std::string> variants;  // empty: single run
    std::string reports;
};
std::vector<RecordedRun> recorded;

std::string reports_of(const RunConfig& cfg, const std::vector<std::string>& variants) {
    if (variants.empty()) return json_of(run(cfg));
    std::string all;
    for (const auto& r : sweep(cfg, variants)) all += json_of(r);
    return all;
}

RunConfig scaled(const std::string& variant) {
    RunConfig c;
    apply_variant(c.ftl, variant);
    c.workload.profile = "custom";
    c.workload.burst_fraction = 1.0;
    c.workload.mix = "write-only";
    return c;
}

// 1. No page ever exceeds its copyback threshold; no data loss.
Verdict reliability_safety() {
    RunConfig c = scaled("rcftl4");
    c.geometry.channels = 4;
    c.geometry.chips_per_channel = 4;
    c.geometry.blocks_per_plane = 128;
    c.geometry.page_size = 4096;
    c.workload.request_bytes = 4096;
    c.age_pe_max = 3400;
    c.workload.requests = 3'000'000;
    test::ShadowOracle oracle(c.geometry, CtTable::standard(), c.ftl.max_copyback);
    RunReport r;
    try {
        r = run(c, nullptr, {&oracle});
    } catch (const DataLossFault& e) {
        return {false, std::string("data loss: ") + e.what()};
    }
    recorded.push_back({"reliability safety", c, {}, json_of(r)});
    return {oracle.violations() == 0 && oracle.migrations() >= kStressMigrations &&
                r.integrity_violations == 0 && oracle.max_hops() <= 4,
            fmt("%llu migrations (%llu copyback), max hops %u, oracle violations %llu",
                (unsigned long long)oracle.migrations(), (unsigned long long)oracle.copybacks(),
                oracle.max_hops(), (unsigned long long)oracle.violations())};
}

std::uint32_t hops_until_unreadable(const Reliability& r, std::uint32_t pe) {
    auto s = r.fresh(pe);
    std::uint32_t hops = 0;
    while (r.is_readable(s)) {
        s = r.apply_copyback(s, pe);
        ++hops;
    }
    return hops;
}

// 2. Threshold table from the calibrated model.
Verdict threshold_table() {
    const auto derived = derive_ct_from_model(ErrorModel::calibrated(), 12.0);
    const std::vector<CtBucket> expected{{1, 1000, 4}, {1001, 2000, 3}, {2001, 3000, 2}};
    bool ok = derived.buckets().size() == 3;
    for (std::size_t i = 0; ok && i < 3; ++i)
        ok = derived.buckets()[i].pe_hi == expected[i].pe_hi && derived.buckets()[i].threshold == expected[i].threshold;
    const Reliability r;
    std::string oracle;
    for (const auto& b : expected)
        for (std::uint32_t pe : {b.pe_lo, b.pe_hi}) {
            const auto hops = hops_until_unreadable(r, pe) - 1;
            ok = ok && hops == b.threshold && r.ct_lookup(pe) == b.threshold;
            oracle += fmt("%u:%u ", pe, hops);
        }
    return {ok, fmt("thresholds %u/%u/%u, brute force %s", derived.lookup(1000), derived.lookup(2000),
                    derived.lookup(3000), oracle.c_str())};
}

// 3. Hand-scheduled timelines.
Verdict timelines() {
    Geometry g;
    auto engine_with = [&] {
        return EventEngine(test::engine_config(g));
    };
    auto at = [](std::uint32_t chip, std::uint32_t block) {
        PhysAddr a;
        a.chip = chip;
        a.block = block;
        return a;
    };
    bool ok = true;
    std::string detail;

    auto single = [&](NandOpKind op, SimTime want) {
        auto e = engine_with();
        SimTime done = 0;
        e.submit({op, at(0, 0), at(0, 1)}, [&](const NandTicket& t) { done = t.completion_time; });
        e.run();
        ok = ok && done == want;
        detail += fmt("%s=%llu ", to_string(op), (unsigned long long)done);
    };
    single(NandOpKind::offchip_copy, 780);
    single(NandOpKind::copyback, 700);

    {
        auto e = engine_with();
        std::vector<SimTime> done(2);
        for (std::uint32_t chip : {0u, 1u})
            e.submit({NandOpKind::offchip_copy, at(chip, 0), at(chip, 1)},
                     [&, chip](const NandTicket& t) { done[chip] = t.completion_time; });
        e.run();
        // (kind, chip, start, end) in log order.
        using Row = std::tuple<PhaseKind, std::uint32_t, SimTime, SimTime>;
        std::vector<Row> got;
        for (const auto& r : e.log()) got.emplace_back(r.kind, r.addr.chip, r.start, r.end);
        std::sort(got.begin(), got.end(), [](const Row& x, const Row& y) {
            return std::tie(std::get<2>(x), std::get<1>(x)) < std::tie(std::get<2>(y), std::get<1>(y));
        });
        const std::vector<Row> want{
            {PhaseKind::read_phase, 0, 0, 60},       {PhaseKind::read_phase, 1, 0, 60},
            {PhaseKind::dma_out, 0, 60, 100},        {PhaseKind::dma_out, 1, 100, 140},
            {PhaseKind::dma_in, 0, 140, 180},        {PhaseKind::program_phase, 0, 180, 820},
            {PhaseKind::dma_in, 1, 180, 220},        {PhaseKind::program_phase, 1, 220, 860}};
        ok = ok && done == std::vector<SimTime>{820, 860} && got == want;
        detail += fmt("same-channel pair=%llu/%llu (timeline %s) ", (unsigned long long)done[0],
                      (unsigned long long)done[1], got == want ? "exact" : "differs");
    }
    {
        auto e = engine_with();
        std::vector<SimTime> done;
        for (std::uint32_t chip = 0; chip < 8; ++chip)
            e.submit({NandOpKind::copyback, at(chip, 0), at(chip, 1)},
                     [&](const NandTicket& t) { done.push_back(t.completion_time); });
        const auto s = e.run();
        const bool all700 = std::all_of(done.begin(), done.end(), [](SimTime t) { return t == 700; });
        const auto bus = s.busy_time({ResourceKind::channel_bus, 0});
        ok = ok && done.size() == 8 && all700 && bus == 0;
        detail += fmt("8 copybacks all at 700: %s, bus busy %llu", all700 ? "yes" : "no", (unsigned long long)bus);
    }
    return {ok, detail};
}

// 4. Greedy rcftl2 under sustained uniform overwrites.
Verdict copyback_fraction() {
    RunConfig c = scaled("rcftl2_greedy");  // 1 GiB
    c.geometry.channels = 2;
    c.geometry.chips_per_channel = 2;
    c.geometry.blocks_per_plane = 256;
    c.ftl.logical_ratio = 0.95;
    c.workload.requests = 300'000;
    c.warmup_fraction = 0.5;
    const auto r = run(c);
    recorded.push_back({"copyback fraction", c, {}, json_of(r)});
    const double f = r.steady_copyback_fraction.value_or(0.0);
    return {std::abs(f - kCopybackTarget) <= kCopybackTolerance,
            fmt("steady copyback fraction %.4f (target %.4f +- %.2f), WAF %.2f", f, kCopybackTarget,
                kCopybackTolerance, r.waf)};
}

// 5. Throughput ordering on a write-heavy random mix.
Verdict throughput_ordering() {
    RunConfig c = scaled("baseline");
    c.geometry.blocks_per_plane = 128;
    c.workload.mix = "NTRX";
    c.workload.requests = 1'000'000;
    const std::vector<std::string> variants{"baseline", "rcftl2", "rcftl3", "rcftl4"};
    const auto reports = sweep(c, variants);
    std::string all;
    for (const auto& r : reports) all += json_of(r);
    recorded.push_back({"throughput ordering", c, variants, all});
    std::vector<double> n;
    for (const auto& r : reports) n.push_back(r.normalized_throughput.value_or(0.0));
    const bool ok = n[0] < n[1] && n[1] < n[2] && n[2] <= n[3] && n[1] >= kMinRcftl2Gain;
    return {ok, fmt("normalized baseline %.3f, rcftl2 %.3f, rcftl3 %.3f, rcftl4 %.3f", n[0], n[1], n[2], n[3])};
}

// 6. DMMS against greedy on the Low profile.
Verdict dmms_benefit() {
    RunConfig c = scaled("rcftl2");
    c.geometry.blocks_per_plane = 128;
    c.workload.profile = "Low";
    c.workload.phase_length = 40'000;
    c.workload.requests = 400'000;
    c.ftl.bg_watermark = 5;
    const std::vector<std::string> variants{"rcftl2_greedy", "rcftl2"};
    const auto reports = sweep(c, variants);
    recorded.push_back({"dmms", c, variants, json_of(reports[0]) + json_of(reports[1])});
    const auto& greedy = reports[0];
    const auto& dmms = reports[1];
    const bool ok = dmms.throughput_mbps > greedy.throughput_mbps &&
                    dmms.idle_end_counter0_blocks > greedy.idle_end_counter0_blocks;
    return {ok, fmt("throughput %.4f vs greedy %.4f (%+.2f%%), counter-0 blocks at burst start %.1f vs %.1f",
                    dmms.throughput_mbps, greedy.throughput_mbps,
                    100.0 * (dmms.throughput_mbps / greedy.throughput_mbps - 1.0), dmms.idle_end_counter0_blocks,
                    greedy.idle_end_counter0_blocks)};
}

// 7. Histogram analysis on a reconstructed long-tailed distribution.
Verdict histogram_analysis() {
    // 77% of pages migrate 1-4 times; the rest follow a geometric tail out to 60.
    std::map<std::uint32_t, double> h{{1, 0.30}, {2, 0.22}, {3, 0.14}, {4, 0.11}};
    double tail = 0;
    for (std::uint32_t k = 5; k <= 60; ++k) tail += std::pow(0.95, k - 5);
    for (std::uint32_t k = 5; k <= 60; ++k) h[k] = 0.23 * std::pow(0.95, k - 5) / tail;
    double small = 0, mass = 0;
    for (const auto& [k, p] : h) {
        mass += p;
        if (k < 5) small += p;
    }
    const double avoided = migration_histogram_analysis(h, 4).value_or(0.0);
    using H = std::map<std::uint32_t, double>;
    const bool examples = migration_histogram_analysis(H{{1, 100}}, 2) == 1.0 &&
                          migration_histogram_analysis(H{{5, 1}}, 4) == 0.8 &&
                          migration_histogram_analysis(H{{1, 3}, {2, 5}}, 2) == 1.0;
    const bool ok = examples && std::abs(small / mass - kSmallMassTarget) < 1e-9 &&
                    std::abs(avoided - kHistogramTarget) <= kHistogramTolerance;
    return {ok, fmt("mass below 5 migrations %.3f, avoided fraction %.4f (target %.2f +- %.2f), examples %s",
                    small / mass, avoided, kHistogramTarget, kHistogramTolerance, examples ? "exact" : "wrong")};
}

// 8. Every read returns the last write; the mapping is a bijection at every GC boundary.
Verdict data_integrity() {
    std::uint64_t runs = 0, reads = 0, violations = 0, audits = 0, audit_failures = 0;
    for (const char* trace : {"oltp", "ntrx", "varmail", "skewed", "append", "aged"})
        for (const char* variant : {"baseline", "rcftl2", "rcftl4", "rcftl3_greedy"}) {
            auto c = test::small_run(variant, 20'000);
            const std::string t = trace;
            if (t == "oltp") c.workload.mix = "OLTP", c.workload.profile = "High";
            if (t == "varmail") c.workload.mix = "Varmail";
            if (t == "skewed") c.workload.mix = "Fileserver", c.workload.skew = 2.0, c.workload.request_bytes = 12288;
            if (t == "append") c.workload.source = "append_random", c.precondition = 0.0;
            if (t == "aged") c.age_pe_max = 3400, c.workload.mix = "OLTP";
            EngineConfig ec;
            ec.geometry = c.geometry;
            EventEngine engine(ec);
            Ftl ftl(engine, c.ftl, Reliability(c.error_model, c.retention_months));
            test::ConsistencyAuditor auditor(ftl);
            ftl.add_observer(&auditor);
            if (c.age_pe_max) ftl.age_blocks(c.age_pe_max, c.seed);
            ftl.precondition(c.precondition);
            HostReplay host(engine, ftl, build_workload(c, ftl.logical_pages() * c.geometry.page_size));
            host.start();
            try {
                engine.run();
                ftl.check_consistency();
            } catch (const SimError&) {
                ++violations;
            }
            if (!host.finished()) ++violations;
            ++runs;
            reads += host.reads_checked();
            violations += host.integrity_violations();
            audits += auditor.checks();
            audit_failures += auditor.failures();
        }
    return {violations == 0 && audit_failures == 0 && audits > 0,
            fmt("%llu runs, %llu reads checked, %llu violations, %llu bijectivity audits, %llu failed",
                (unsigned long long)runs, (unsigned long long)reads, (unsigned long long)violations,
                (unsigned long long)audits, (unsigned long long)audit_failures)};
}

// 9. Same seed, same bytes.
Verdict determinism() {
    std::size_t same = 0;
    std::string differing;
    for (const auto& r : recorded) {
        if (reports_of(r.cfg, r.variants) == r.reports)
            ++same;
        else
            differing += r.label + "; ";
    }
    // Event logs: every variant on a small device with logging on.
    std::size_t logs_same = 0, logs = 0;
    for (const char* variant : {"baseline", "rcftl2", "rcftl4", "rcftl2_greedy"}) {
        auto c = test::small_run(variant, 20'000, 3);
        c.record_event_log = true;
        c.record_decisions = true;
        RunArtifacts a, b;
        const auto ra = json_of(run(c, &a));
        const auto rb = json_of(run(c, &b));
        ++logs;
        if (ra == rb && a.event_log_csv == b.event_log_csv && a.decision_log_csv == b.decision_log_csv &&
            !a.event_log_csv.empty())
            ++logs_same;
        else
            differing += std::string(variant) + " log; ";
    }
    return {same == recorded.size() && logs_same == logs,
            fmt("%zu/%zu acceptance runs repeated byte-identical, %zu/%zu event and decision logs identical%s%s", same,
                recorded.size(), logs_same, logs, differing.empty() ? "" : ": ", differing.c_str())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"reliability safety", reliability_safety},
        {"threshold table", threshold_table},
        {"timing timelines", timelines},
        {"copyback fraction", copyback_fraction},
        {"throughput ordering", throughput_ordering},
        {"dmms benefit", dmms_benefit},
        {"migration histogram analysis", histogram_analysis},
        {"data integrity", data_integrity},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed;
}
