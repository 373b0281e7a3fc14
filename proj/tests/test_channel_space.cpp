#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mott/channel_space.hpp"

using namespace mott;

TEST(ChannelIndex, SpinOneIsTheMostSignificantBit) {
    const ChannelIndex c{53, 6};  // 110101
    EXPECT_EQ(to_binary(c), "110101");
    for (int n : {1, 2, 4, 6}) EXPECT_TRUE(c.spin_up(n)) << n;
    EXPECT_FALSE(c.spin_up(3));
    EXPECT_FALSE(c.spin_up(5));
}

TEST(ChannelIndex, RejectsOutOfRangeValues) {
    EXPECT_THROW((ChannelIndex{4, 2}), std::invalid_argument);
    EXPECT_NO_THROW((ChannelIndex{3, 2}));
    EXPECT_THROW((ChannelIndex{0, 2}.spin_up(3)), std::out_of_range);
}

TEST(HammingWeight, Examples) {
    EXPECT_EQ(hamming_weight({0, 6}), 0);
    EXPECT_EQ(hamming_weight({53, 6}), 4);
    EXPECT_EQ(hamming_weight({63, 6}), 6);
}

TEST(HammingWeight, ComplementAddsUpToN) {
    for (int n = 1; n <= 10; ++n) {
        const std::uint32_t all = ChannelIndex::channel_count(n) - 1;
        for (std::uint32_t c = 0; c <= all; ++c)
            ASSERT_EQ(hamming_weight({c, n}) + hamming_weight({c ^ all, n}), n);
    }
}

TEST(ChannelThreshold, Examples) {
    const auto two = DetectorConfig::regular(2, 0.1, 0.0, 1.0, 0.01);
    EXPECT_EQ(channel_threshold({0, 2}, two), 0.0);
    EXPECT_NEAR(channel_threshold({3, 2}, two), 0.02, 1e-15);

    const DetectorConfig three({0.0, 1.0, 2.0}, {0, 0, 0}, {1, 1, 1}, {0.1, 0.2, 0.4});
    EXPECT_NEAR(channel_threshold({0b101, 3}, three), 0.5, 1e-15);  // spins 1 and 3
    EXPECT_NEAR(channel_threshold({0b001, 3}, three), 0.4, 1e-15);
    EXPECT_NEAR(channel_threshold({0b100, 3}, three), 0.1, 1e-15);
}

TEST(ChannelThreshold, MonotoneUnderAddingUpSpins) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> eps(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 6;
        std::vector<double> e(static_cast<std::size_t>(n));
        for (auto& v : e) v = eps(rng);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i;
        const DetectorConfig det(y, std::vector<double>(y.size(), 0.0), std::vector<double>(y.size(), 1.0), e);
        for (std::uint32_t c = 0; c < det.channel_count(); ++c)
            for (int s = 1; s <= n; ++s) {
                const ChannelIndex ci{c, n};
                if (!ci.spin_up(s)) {
                    ASSERT_GE(channel_threshold(ci.flipped(s), det), channel_threshold(ci, det));
                }
            }
    }
}

TEST(ChannelWavenumber, Branches) {
    const auto open = channel_wavenumber(std::numbers::pi * std::numbers::pi, 0.0);
    EXPECT_TRUE(open.open);
    EXPECT_NEAR(open.wavenumber.real(), std::numbers::pi, 1e-15);
    EXPECT_EQ(open.wavenumber.imag(), 0.0);

    const auto closed = channel_wavenumber(1.0, 1.25);
    EXPECT_FALSE(closed.open);
    EXPECT_EQ(closed.wavenumber.real(), 0.0);
    EXPECT_NEAR(closed.wavenumber.imag(), 0.5, 1e-15);

    const auto ground = channel_wavenumber(4.0, 0.0);
    EXPECT_EQ(ground.wavenumber, complex(2.0, 0.0));
}

TEST(ChannelWavenumber, DispersionHoldsOnBothBranches) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double e = u(rng), th = u(rng);
        const auto k = channel_wavenumber(e, th);
        EXPECT_NEAR(std::abs(k.wavenumber * k.wavenumber + th - e), 0.0, 1e-12 * std::max(e, th));
        EXPECT_GT(k.wavenumber.real() + k.wavenumber.imag(), 0.0);
        EXPECT_EQ(k.open, e > th);
    }
}

TEST(ChannelWavenumber, ThresholdIsAnError) {
    EXPECT_THROW(channel_wavenumber(2.0, 2.0), ThresholdDegeneracy);
    EXPECT_THROW(channel_wavenumber(2.0, 2.0 + 1e-13), ThresholdDegeneracy);
    EXPECT_NO_THROW(channel_wavenumber(2.0, 2.0 + 1e-10));
    EXPECT_THROW(channel_wavenumber(0.0, 0.0), std::invalid_argument);
}

TEST(CoupledChannels, SmallCases) {
    const auto one = coupled_channels({0, 1});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].first, 1);
    EXPECT_EQ(one[0].second.value(), 1u);

    const auto two = coupled_channels({0, 2});
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0], (std::pair<int, ChannelIndex>{1, {0b10, 2}}));
    EXPECT_EQ(two[1], (std::pair<int, ChannelIndex>{2, {0b01, 2}}));

    const auto six = coupled_channels({0, 6});
    ASSERT_EQ(six.size(), 6u);
    for (const auto& [spin, c] : six) EXPECT_EQ(hamming_weight(c), 1);
}

TEST(CoupledChannels, HypercubeNeighbours) {
    for (int n = 1; n <= 8; ++n)
        for (std::uint32_t c = 0; c < ChannelIndex::channel_count(n); ++c) {
            const auto nb = coupled_channels({c, n});
            ASSERT_EQ(static_cast<int>(nb.size()), n);
            std::set<std::uint32_t> seen;
            for (const auto& [spin, other] : nb) {
                ASSERT_EQ(std::popcount(c ^ other.value()), 1);
                seen.insert(other.value());
            }
            ASSERT_EQ(static_cast<int>(seen.size()), n);
        }
}

TEST(DetectorConfig, Validation) {
    EXPECT_THROW(DetectorConfig::uniform({0.0, 0.0}, 0, 1, 0), OverlappingSpins);
    EXPECT_THROW(DetectorConfig::uniform({1.0, 0.5}, 0, 1, 0), OverlappingSpins);
    EXPECT_THROW(DetectorConfig::uniform({0.0}, 0, 1, -0.1), ConfigError);
    EXPECT_THROW(DetectorConfig({0.0, 1.0}, {0.0}, {1.0, 1.0}, {0.0, 0.0}), ConfigError);

    const auto det = DetectorConfig::regular(4, 0.25, 0.5, 3.0, 0.01, 1.0);
    EXPECT_EQ(det.n_spins(), 4);
    EXPECT_DOUBLE_EQ(det.position(1), 1.0);
    EXPECT_DOUBLE_EQ(det.position(4), 1.75);
    EXPECT_DOUBLE_EQ(det.min_gap(), 0.25);
    EXPECT_DOUBLE_EQ(det.shifted(-1.0).position(1), 0.0);
}
