#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seqsel/horizon.hpp"
#include "seqsel/problems.hpp"
#include "seqsel/rank_core.hpp"

namespace seqsel {
namespace {

double total(const HorizonSpec& h) {
    const auto& g = h.gammas();
    return std::accumulate(g.begin(), g.end(), 0.0);
}

TEST(Horizon, Uniform) {
    EXPECT_EQ(uniform_horizon(1).gammas(), std::vector<double>({1.0}));
    EXPECT_EQ(uniform_horizon(4).gammas(), std::vector<double>({0.25, 0.25, 0.25, 0.25}));
    EXPECT_THROW(uniform_horizon(0), std::invalid_argument);
}

TEST(Horizon, PettittFamily) {
    const auto p1 = pettitt_horizon(1.0, 50);
    for (int k = 1; k <= 50; ++k) EXPECT_NEAR(p1.gamma(k), 1.0 / 50, 1e-15);
    EXPECT_EQ(pettitt_horizon(3.0, 1).gammas(), std::vector<double>({1.0}));
    for (double alpha : {0.5, 2.0, 3.0}) EXPECT_NEAR(total(pettitt_horizon(alpha, 1000)), 1.0, 1e-12);
    EXPECT_THROW(pettitt_horizon(0.0, 10), std::invalid_argument);
    EXPECT_THROW(pettitt_horizon(-1.0, 10), std::invalid_argument);
    // hazard P(N = k | N >= k) = (N_max - k + 1)^-alpha
    const auto p3 = pettitt_horizon(3.0, 30);
    double survive = 1.0;
    for (int k = 1; k < 30; ++k) {
        EXPECT_NEAR(p3.gamma(k) / survive, std::pow(30.0 - k + 1, -3.0), 1e-12);
        survive -= p3.gamma(k);
    }
}

TEST(Horizon, ZibMixture) {
    const auto h = zib_mixture_horizon();
    EXPECT_EQ(h.nu(), 100);
    EXPECT_NEAR(total(h), 1.0, 1e-12);
    EXPECT_GT(h.gamma(10), h.gamma(50));
    for (int k = 1; k <= 100; ++k) EXPECT_GE(h.gamma(k), 0.0);
}

TEST(Horizon, UShaped) {
    const auto h = u_shaped_horizon();
    EXPECT_EQ(h.nu(), 100);
    EXPECT_NEAR(total(h), 1.0, 1e-15);
    EXPECT_EQ(h.gamma(50), 1e-6);
    EXPECT_EQ(h.gamma(81), 0.0249985);
    EXPECT_EQ(h.gamma(20), 0.0249985);
    EXPECT_EQ(h.gamma(21), 1e-6);
}

TEST(Horizon, Validation) {
    EXPECT_THROW(HorizonSpec::fixed(0), std::invalid_argument);
    EXPECT_THROW(HorizonSpec::random({0.5, -0.1, 0.6}), std::invalid_argument);
    EXPECT_THROW(HorizonSpec::random({}), std::invalid_argument);
    const auto r = HorizonSpec::random({2.0, 2.0}, true);
    EXPECT_DOUBLE_EQ(r.gamma(1), 0.5);
}

TEST(Horizon, TailSums) {
    const auto s = uniform_horizon(4).tail_sums();
    ASSERT_EQ(s.size(), 4u);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_DOUBLE_EQ(s[1], 0.75);
    EXPECT_DOUBLE_EQ(s[2], 0.5);
    EXPECT_DOUBLE_EQ(s[3], 0.25);
}

TEST(Horizon, JsonRoundTrip) {
    const std::vector<double> g = {0.1, 0.2000000000000001, 0.3, 0.3999999999999999};
    const auto h = HorizonSpec::random(g);
    const auto back = HorizonSpec::from_json(nlohmann::json::parse(h.to_json().dump()));
    EXPECT_EQ(back.gammas(), g);
    const auto u = HorizonSpec::from_json({{"type", "uniform"}, {"N_max", 7}});
    EXPECT_EQ(u.nu(), 7);
    const auto p = HorizonSpec::from_json(pettitt_horizon(2.0, 9).to_json());
    EXPECT_EQ(p.gammas(), pettitt_horizon(2.0, 9).gammas());
    EXPECT_TRUE(HorizonSpec::from_json({{"type", "fixed"}, {"n", 5}}).is_fixed());
    EXPECT_THROW(HorizonSpec::from_json({{"type", "nope"}}), std::invalid_argument);
    EXPECT_THROW(HorizonSpec::from_json({{"type", "explicit"}, {"gamma", {0.5, 0.2}}}), std::invalid_argument);
}

TEST(Truncate, FiniteSupportIsUnchanged) {
    for (double eps : {1e-1, 1e-6, 1e-12}) {
        EXPECT_EQ(truncate(uniform_horizon(37), RewardSpec::best_choice(), eps), 37);
        EXPECT_EQ(truncate(HorizonSpec::fixed(12), RewardSpec::neg_rank(), eps), 12);
    }
}

TEST(Truncate, GeometricBestChoice) {
    const auto h = geometric_horizon(0.5, 1e-6);
    EXPECT_EQ(truncate(h, RewardSpec::best_choice(), 1e-6), 20);
}

TEST(Truncate, MonotoneInEpsilon) {
    const auto h = geometric_horizon(0.1, 1e-9);
    int prev = 0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-5, 1e-7, 1e-9, 1e-11}) {
        const int m = truncate(h, RewardSpec::best_choice(), eps);
        EXPECT_GE(m, prev);
        prev = m;
    }
    prev = 0;
    for (double eps : {1e-1, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const int m = truncate(h, RewardSpec::rank_improvement(), eps);
        EXPECT_GE(m, prev);
        prev = m;
    }
}

TEST(Truncate, RankImprovementTailBound) {
    const double p = 0.2, eps = 1e-6;
    const auto h = geometric_horizon(p, eps);
    const int m = truncate(h, RewardSpec::rank_improvement(), eps);
    // minimal m with sum_{k > m} (k+1) gamma_k <= 2 eps
    auto tail = [&](int mm) {
        double s = 0;
        for (int k = mm + 1; k < mm + 2000; ++k) s += (k + 1) * p * std::pow(1 - p, k - 1);
        return s;
    };
    EXPECT_LE(tail(m), 2 * eps * (1 + 1e-9));
    EXPECT_GT(tail(m - 1), 2 * eps);
}

TEST(Truncate, CustomWithoutBoundRejected) {
    const auto h = geometric_horizon(0.5, 1e-6);
    EXPECT_THROW(truncate(h, RewardSpec::custom({3, 2, 1}), 1e-6), std::invalid_argument);
}

TEST(Truncate, InfiniteMeanRequiredForRankImprovement) {
    const auto h = HorizonSpec::infinite([](int k) { return 1.0 / (k * (k + 1.0)); }, std::nullopt, 1e-6, {{"type", "zeta"}});
    EXPECT_THROW(truncate(h, RewardSpec::rank_improvement(), 1e-6), std::invalid_argument);
    EXPECT_GT(truncate(h, RewardSpec::best_choice(), 1e-3), 900);
}

// Truncating at epsilon moves the optimal value by at most 2 epsilon.
TEST(Truncate, ValueChangeWithinTwoEpsilon) {
    const auto exact = csp_random(geometric_horizon(0.05, 1e-14).truncated_to(
                                      truncate(geometric_horizon(0.05, 1e-14), RewardSpec::best_choice(), 1e-14)))
                           .value;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
        const auto h = geometric_horizon(0.05, eps);
        const auto trunc = h.truncated_to(truncate(h, RewardSpec::best_choice(), eps));
        EXPECT_LE(std::abs(csp_random(trunc).value - exact), 2 * eps) << eps;
    }
}

}  // namespace
}  // namespace seqsel
