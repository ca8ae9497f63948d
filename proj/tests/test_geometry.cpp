#include <gtest/gtest.h>

#include "rcsim/errors.hpp"
#include "rcsim/geometry.hpp"

using namespace rcsim;

TEST(Geometry, DefaultIs64GiB) {
    EXPECT_EQ(validate_geometry(Geometry{}), 64ULL << 30);
}

TEST(Geometry, ZeroPagesPerBlockRejected) {
    Geometry g;
    g.pages_per_block = 0;
    try {
        validate_geometry(g);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("pages_per_block"), std::string::npos);
    }
}

TEST(Geometry, MinimalProduct) {
    Geometry g{1, 1, 1, 2, 2, 16384};
    EXPECT_EQ(validate_geometry(g), 64ULL * 1024);
}

TEST(Geometry, PageSizeMustBePowerOfTwo) {
    Geometry g;
    g.page_size = 12000;
    EXPECT_THROW(validate_geometry(g), ConfigError);
}

TEST(Geometry, OverflowRejected) {
    Geometry g;
    g.channels = 1u << 31;
    g.chips_per_channel = 1u << 31;
    g.blocks_per_plane = 1u << 31;
    EXPECT_THROW(validate_geometry(g), ConfigError);
}

TEST(Timing, ZeroLatencyRejected) {
    TimingParams t;
    t.t_erase = 0;
    EXPECT_THROW(validate_timing(t), ConfigError);
    EXPECT_NO_THROW(validate_timing(TimingParams{}));
}

TEST(Timing, OffchipCopyLatency) {
    EXPECT_EQ(latency_offchip_copy({60, 640, 3500, 40, 40}), 780u);
    EXPECT_EQ(latency_offchip_copy({0, 640, 3500, 0, 0}), 640u);
    EXPECT_EQ(latency_offchip_copy({50, 900, 3500, 30, 30}), 1010u);
}

TEST(Timing, CopybackLatency) {
    EXPECT_EQ(latency_copyback({60, 640, 3500, 40, 40}), 700u);
    EXPECT_EQ(latency_copyback({0, 640, 3500, 40, 40}), 640u);
    EXPECT_EQ(latency_copyback({50, 900, 3500, 30, 30}), 950u);
}

TEST(Timing, CopybackPlusDmaIsOffchipCopy) {
    // Sweep a grid of latencies; the identity is exact.
    for (SimTime r : {0u, 1u, 60u, 99u})
        for (SimTime p : {1u, 640u, 2000u})
            for (SimTime o : {0u, 40u, 77u})
                for (SimTime i : {0u, 40u, 13u}) {
                    TimingParams t{r, p, 3500, o, i};
                    EXPECT_EQ(latency_copyback(t) + o + i, latency_offchip_copy(t));
                }
}

TEST(Address, CopybackCompatibility) {
    Geometry g;
    EXPECT_TRUE(copyback_compatible(g, {0, 0, 0, 3, 1}, {0, 0, 0, 7, 0}));
    EXPECT_FALSE(copyback_compatible(g, {0, 0, 0, 3, 1}, {0, 1, 0, 3, 1}));
    EXPECT_FALSE(copyback_compatible(g, {0, 0, 0, 3, 1}, {1, 0, 0, 3, 1}));
}

TEST(Address, OutOfRangeRejected) {
    Geometry g;
    EXPECT_THROW(check_address(g, {8, 0, 0, 0, 0}), AddressError);
    EXPECT_THROW(check_address(g, {0, 0, 0, 0, 64}), AddressError);
    EXPECT_THROW(copyback_compatible(g, {0, 0, 1, 0, 0}, {0, 0, 0, 0, 0}), AddressError);
}

TEST(Address, CompatibilityReflexiveAndSymmetric) {
    Geometry g{2, 2, 2, 2, 2, 4096};
    std::vector<PhysAddr> all;
    for (std::uint32_t ppn = 0; ppn < g.total_pages(); ++ppn) all.push_back(decode_ppn(g, ppn));
    for (const auto& a : all) {
        EXPECT_TRUE(copyback_compatible(g, a, a));
        for (const auto& b : all) EXPECT_EQ(copyback_compatible(g, a, b), copyback_compatible(g, b, a));
    }
}

TEST(Address, EncodeDecodeRoundTripExhaustive) {
    Geometry g{2, 2, 2, 16, 32, 4096};  // 4096 pages
    ASSERT_EQ(g.total_pages(), 4096u);
    std::uint64_t expected = 0;
    for (std::uint32_t ch = 0; ch < g.channels; ++ch)
        for (std::uint32_t chip = 0; chip < g.chips_per_channel; ++chip)
            for (std::uint32_t pl = 0; pl < g.planes_per_chip; ++pl)
                for (std::uint32_t b = 0; b < g.blocks_per_plane; ++b)
                    for (std::uint32_t p = 0; p < g.pages_per_block; ++p) {
                        const PhysAddr a{ch, chip, pl, b, p};
                        const auto ppn = encode_ppn(g, a);
                        EXPECT_EQ(ppn, expected++);
                        EXPECT_EQ(decode_ppn(g, ppn), a);
                    }
}
