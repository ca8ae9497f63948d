#include <gtest/gtest.h>

#include "rcsim/host.hpp"
#include "rcsim/simulation.hpp"
#include "test_support.hpp"

using namespace rcsim;

namespace {

struct Outcome {
    std::uint64_t reads_checked = 0;
    std::uint64_t violations = 0;
    std::uint64_t audits = 0;
    std::uint64_t audit_failures = 0;
    std::uint64_t oracle_violations = 0;
    std::uint64_t migrations = 0;
};

// Wires engine, FTL and host by hand so the auditor can see the FTL.
Outcome replay(const RunConfig& cfg, bool closed_loop) {
    EngineConfig ec;
    ec.geometry = cfg.geometry;
    ec.timing = cfg.timing;
    EventEngine engine(ec);
    Ftl ftl(engine, cfg.ftl, Reliability(cfg.error_model, cfg.retention_months));
    test::ConsistencyAuditor auditor(ftl);
    test::ShadowOracle oracle(cfg.geometry, CtTable::standard(), cfg.ftl.effective_max_copyback());
    ftl.add_observer(&auditor);
    ftl.add_observer(&oracle);
    if (cfg.age_pe_max) ftl.age_blocks(cfg.age_pe_max, cfg.seed);
    ftl.precondition(cfg.precondition);
    auto requests = build_workload(cfg, ftl.logical_pages() * cfg.geometry.page_size);
    HostReplay host(engine, ftl, std::move(requests), {closed_loop, {}});
    host.start();
    engine.run();
    EXPECT_TRUE(host.finished());
    ftl.check_consistency();
    return {host.reads_checked(), host.integrity_violations(), auditor.checks(), auditor.failures(),
            oracle.violations(), ftl.stats().migrations_total()};
}

RunConfig workload(const std::string& name) {
    auto c = test::small_run("baseline", 8000);
    if (name == "oltp") {
        c.workload.mix = "OLTP";
        c.workload.profile = "High";
    } else if (name == "ntrx") {
        c.workload.mix = "NTRX";
    } else if (name == "varmail") {
        c.workload.mix = "Varmail";
        c.workload.request_bytes = 8192;
    } else if (name == "skewed") {
        c.workload.mix = "Fileserver";
        c.workload.skew = 2.0;
        c.workload.request_bytes = 12288;
    } else if (name == "append") {
        c.workload.source = "append_random";
        c.precondition = 0.0;
        c.workload.requests = 12000;
    }
    return c;
}

}  // namespace

class Integrity : public ::testing::TestWithParam<std::tuple<std::string, std::string>> {};

TEST_P(Integrity, ReadsReturnLastWrite) {
    const auto& [trace, variant] = GetParam();
    auto cfg = workload(trace);
    apply_variant(cfg.ftl, variant);
    for (bool closed : {true, false}) {
        const auto o = replay(cfg, closed);
        EXPECT_EQ(o.violations, 0u);
        EXPECT_EQ(o.audit_failures, 0u);
        EXPECT_EQ(o.oracle_violations, 0u);
        EXPECT_GT(o.migrations, 0u);
        EXPECT_GT(o.audits, 0u);
        if (trace != "append") { EXPECT_GT(o.reads_checked, 0u); }
    }
}

INSTANTIATE_TEST_SUITE_P(Traces, Integrity,
                         ::testing::Combine(::testing::Values("oltp", "ntrx", "varmail", "skewed", "append"),
                                            ::testing::Values("baseline", "rcftl2", "rcftl4_greedy")),
                         [](const auto& info) {
                             return std::get<0>(info.param) + "_" + std::get<1>(info.param);
                         });
