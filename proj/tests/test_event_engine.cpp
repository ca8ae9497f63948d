#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "rcsim/errors.hpp"
#include "rcsim/event_engine.hpp"
#include "test_support.hpp"

using namespace rcsim;
using rcsim::test::engine_config;

namespace {

Geometry one_channel(std::uint32_t chips) { return rcsim::test::tiny_geometry(1, chips, 4, 4); }

PhysAddr page(std::uint32_t chip, std::uint32_t block, std::uint32_t pg = 0) { return {0, chip, 0, block, pg}; }

// Every resource's holding intervals must be pairwise disjoint.
void audit_exclusive(const EventEngine& e) {
    std::map<std::string, std::vector<std::pair<SimTime, SimTime>>> held;
    const auto& g = e.config().geometry;
    for (const auto& r : e.log())
        for (std::uint8_t i = 0; i < r.held_count; ++i) held[to_string(g, r.held[i])].push_back({r.start, r.end});
    for (auto& [name, iv] : held) {
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i)
            EXPECT_LE(iv[i - 1].second, iv[i].first) << name << " held twice";
    }
}

}  // namespace

TEST(EventEngine, SingleOffchipCopy) {
    EventEngine e(engine_config(one_channel(1)));
    SimTime done = 0;
    e.submit({NandOpKind::offchip_copy, page(0, 0), page(0, 1)}, [&](const NandTicket& t) { done = t.completion_time; });
    e.run();
    EXPECT_EQ(done, 780u);
}

TEST(EventEngine, SingleCopyback) {
    EventEngine e(engine_config(one_channel(1)));
    SimTime done = 0;
    e.submit({NandOpKind::copyback, page(0, 0), page(0, 1)}, [&](const NandTicket& t) { done = t.completion_time; });
    e.run();
    EXPECT_EQ(done, 700u);
}

TEST(EventEngine, TwoSameChannelOffchipCopies) {
    EventEngine e(engine_config(one_channel(2)));
    std::vector<SimTime> done(2);
    for (std::uint32_t c = 0; c < 2; ++c)
        e.submit({NandOpKind::offchip_copy, page(c, 0), page(c, 1)},
                 [&, c](const NandTicket& t) { done[c] = t.completion_time; });
    e.run();
    EXPECT_EQ(done[0], 820u);
    EXPECT_EQ(done[1], 860u);

    // The hand-scheduled timeline, phase by phase.
    struct Expect {
        PhaseKind kind;
        std::uint32_t chip;
        SimTime start, end;
    };
    const std::vector<Expect> timeline = {
        {PhaseKind::read_phase, 0, 0, 60},      {PhaseKind::read_phase, 1, 0, 60},
        {PhaseKind::dma_out, 0, 60, 100},       {PhaseKind::dma_out, 1, 100, 140},
        {PhaseKind::dma_in, 0, 140, 180},       {PhaseKind::dma_in, 1, 180, 220},
        {PhaseKind::program_phase, 0, 180, 820}, {PhaseKind::program_phase, 1, 220, 860},
    };
    for (const auto& x : timeline) {
        const auto hit = std::count_if(e.log().begin(), e.log().end(), [&](const PhaseRecord& r) {
            return r.kind == x.kind && r.addr.chip == x.chip && r.start == x.start && r.end == x.end;
        });
        EXPECT_EQ(hit, 1) << to_string(x.kind) << " chip " << x.chip << " " << x.start << "-" << x.end;
    }
    EXPECT_EQ(e.log().size(), timeline.size());
    audit_exclusive(e);
}

TEST(EventEngine, EightCopybacksNeverTouchTheBus) {
    EventEngine e(engine_config(one_channel(8)));
    std::vector<SimTime> done;
    for (std::uint32_t c = 0; c < 8; ++c)
        e.submit({NandOpKind::copyback, page(c, 0), page(c, 1)},
                 [&](const NandTicket& t) { done.push_back(t.completion_time); });
    const auto st = e.run();
    ASSERT_EQ(done.size(), 8u);
    for (auto t : done) EXPECT_EQ(t, 700u);
    EXPECT_EQ(st.busy_time(e.channel_bus(0)), 0u);
    EXPECT_EQ(st.busy_time(e.dram_port_for(0)), 0u);
    for (const auto& r : e.log())
        for (std::uint8_t i = 0; i < r.held_count; ++i) EXPECT_EQ(r.held[i].kind, ResourceKind::chip_unit);
}

TEST(EventEngine, EightOffchipCopiesSerializeOnTheChannel) {
    EventEngine e(engine_config(one_channel(8)));
    for (std::uint32_t c = 0; c < 8; ++c) e.submit({NandOpKind::offchip_copy, page(c, 0), page(c, 1)});
    const auto st = e.run();
    EXPECT_EQ(st.busy_time(e.channel_bus(0)), 8u * (40 + 40));
    SimTime last_dma = 0;
    for (const auto& r : e.log())
        if (r.kind == PhaseKind::dma_in || r.kind == PhaseKind::dma_out) last_dma = std::max(last_dma, r.end);
    EXPECT_GE(last_dma, 60u + 8 * 80);
    audit_exclusive(e);
}

TEST(EventEngine, SerializationBoundForAnyN) {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        EventEngine e(engine_config(one_channel(8), true, 4));
        for (std::uint32_t c = 0; c < n; ++c) e.submit({NandOpKind::offchip_copy, page(c, 0), page(c, 1)});
        e.run();
        SimTime first_read = ~SimTime{0}, last_dma = 0;
        for (const auto& r : e.log()) {
            if (r.kind == PhaseKind::read_phase) first_read = std::min(first_read, r.end);
            if (r.kind == PhaseKind::dma_in || r.kind == PhaseKind::dma_out) last_dma = std::max(last_dma, r.end);
        }
        EXPECT_GE(last_dma, first_read + n * 80) << n;
    }
}

TEST(EventEngine, EmptyRunHasNoBusyTime) {
    EventEngine e(engine_config(one_channel(2)));
    const auto st = e.run_until(1000);
    for (const auto& r : st.resources) EXPECT_EQ(r.busy_time, 0u);
    EXPECT_EQ(st.events_dispatched, 0u);
}

TEST(EventEngine, NowSemantics) {
    EventEngine e(engine_config(one_channel(1)));
    EXPECT_EQ(e.now(), 0u);
    SimTime seen = 0;
    e.schedule(50, PhaseKind::host_arrival, [&] { seen = e.now(); });
    e.run_until(100);
    EXPECT_EQ(seen, 50u);
    EXPECT_EQ(e.now(), 100u);
    EventEngine idle(engine_config(one_channel(1)));
    idle.run_until(100);
    EXPECT_EQ(idle.now(), 100u);
}

TEST(EventEngine, EqualTimeEventsRunInSubmissionOrder) {
    EventEngine e(engine_config(one_channel(1)));
    std::vector<int> order;
    for (int i = 0; i < 10; ++i) e.schedule(5, PhaseKind::idle_check, [&, i] { order.push_back(i); });
    e.run();
    for (int i = 0; i < 10; ++i) EXPECT_EQ(order[i], i);
}

TEST(EventEngine, InvalidAddressRejected) {
    EventEngine e(engine_config(one_channel(1)));
    EXPECT_THROW(e.submit({NandOpKind::host_read, {0, 1, 0, 0, 0}, {}}), AddressError);
    EXPECT_THROW(e.submit({NandOpKind::copyback, page(0, 0), {0, 0, 0, 9, 0}}), AddressError);
}

TEST(EventEngine, CopybackAcrossPlanesRejected) {
    EventEngine e(engine_config(rcsim::test::tiny_geometry(1, 2, 4, 4)));
    EXPECT_THROW(e.submit({NandOpKind::copyback, page(0, 0), page(1, 0)}), AddressError);
}

TEST(EventEngine, TicketsRespectContentionFreeLatency) {
    // Random mixes of every op kind on a small device.
    std::mt19937_64 rng(7);
    const auto g = rcsim::test::tiny_geometry(2, 2, 4, 4);
    EventEngine e(engine_config(g));
    const TimingParams t;
    auto rand_page = [&](std::uint32_t ch, std::uint32_t chip) {
        return PhysAddr{ch, chip, 0, static_cast<std::uint32_t>(rng() % 4), static_cast<std::uint32_t>(rng() % 4)};
    };
    for (int i = 0; i < 400; ++i) {
        const auto ch = static_cast<std::uint32_t>(rng() % 2), chip = static_cast<std::uint32_t>(rng() % 2);
        const auto kind = static_cast<NandOpKind>(rng() % kNandOpKinds);
        const SimTime floor = kind == NandOpKind::offchip_copy ? latency_offchip_copy(t)
                              : kind == NandOpKind::copyback  ? latency_copyback(t)
                              : kind == NandOpKind::host_read ? t.t_read + t.t_dma_out
                              : kind == NandOpKind::host_write ? t.t_dma_in + t.t_prog
                                                               : t.t_erase;
        e.schedule(rng() % 5000, PhaseKind::host_arrival, [&, ch, chip, kind, floor] {
            const auto a = rand_page(ch, chip);
            e.submit({kind, a, a}, [floor](const NandTicket& tk) {
                EXPECT_GE(tk.completion_time, tk.issue_time + floor);
            });
        });
    }
    const auto st = e.run();
    std::uint64_t done = 0;
    for (auto c : st.ops_completed) done += c;
    EXPECT_EQ(done, 400u);
    audit_exclusive(e);
}

TEST(EventEngine, DeterministicLog) {
    auto once = [] {
        EventEngine e(engine_config(one_channel(4)));
        for (std::uint32_t i = 0; i < 12; ++i)
            e.submit({i % 3 == 0 ? NandOpKind::copyback : NandOpKind::offchip_copy, page(i % 4, 0), page(i % 4, 1)});
        e.run();
        std::ostringstream s;
        e.write_log_csv(s);
        return s.str();
    };
    const auto a = once();
    EXPECT_EQ(a, once());
    EXPECT_EQ(a.substr(0, a.find('\n')), "time,kind,channel,chip,plane,block,page,resource_held");
}
