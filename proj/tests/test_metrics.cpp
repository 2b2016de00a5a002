#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "seqsel/horizon.hpp"
#include "seqsel/metrics.hpp"
#include "seqsel/problems.hpp"
#include "seqsel/rank_core.hpp"
#include "seqsel/stop_engine.hpp"
#include "support.hpp"

namespace seqsel {
namespace {

ThresholdPolicy table_policy(const RewardSpec& q, const HorizonSpec& h) {
    auto tab = h.is_fixed() ? reward_table_fixed(q, h.n()) : reward_table_random(q, h);
    return solve_table(std::make_shared<const ConditionalRewardTable>(std::move(tab)));
}

// Distribution of the stopping time by running the rule over every ordering.
std::vector<double> enumerated_pmf(const ThresholdPolicy& p) {
    const int n = p.nu;
    std::vector<double> pmf(n, 0.0);
    long long count = 0;
    testing::for_each_order(n, [&](const std::vector<int>& abs) {
        for (int t = 1; t <= n; ++t)
            if (decide(p, t, testing::relative_rank(abs, t)) == Decision::Stop) {
                pmf[t - 1] += 1;
                break;
            }
        ++count;
    });
    for (auto& x : pmf) x /= count;
    return pmf;
}

std::vector<RewardSpec> rewards() {
    return {RewardSpec::best_choice(), RewardSpec::one_of_k_best(2), RewardSpec::kth_best(2), RewardSpec::neg_rank(),
            RewardSpec::neg_squared_rank(), RewardSpec::rank_improvement()};
}

TEST(StopTimePmf, TrivialHorizon) {
    const auto p = classical_secretary(1).policy.value();
    EXPECT_EQ(stop_time_pmf(p), std::vector<double>({1.0}));
    EXPECT_EQ(expected_stop_time(p), 1.0);
}

TEST(StopTimePmf, SumsToOne) {
    for (const auto& q : rewards())
        for (int n : {1, 2, 10, 50, 100}) {
            const auto pmf = stop_time_pmf(table_policy(q, HorizonSpec::fixed(n)));
            EXPECT_NEAR(std::accumulate(pmf.begin(), pmf.end(), 0.0), 1.0, 1e-12) << q.name() << ' ' << n;
        }
    for (const auto& h : {uniform_horizon(60), zib_mixture_horizon(), u_shaped_horizon()}) {
        const auto pmf = stop_time_pmf(table_policy(RewardSpec::one_of_k_best(3), h));
        EXPECT_NEAR(std::accumulate(pmf.begin(), pmf.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(StopTimePmf, ClassicalPrefixHasNoMass) {
    const auto p = classical_secretary(100).policy.value();
    const auto pmf = stop_time_pmf(p);
    for (int t = 1; t < 38; ++t) EXPECT_EQ(pmf[t - 1], 0.0) << t;
    EXPECT_GT(pmf[37], 0.0);
}

TEST(ExpectedStopTime, EqualsMeanOfPmf) {
    for (const auto& q : rewards())
        for (int n : {1, 3, 20, 150}) {
            const auto p = table_policy(q, HorizonSpec::fixed(n));
            const auto pmf = stop_time_pmf(p);
            double m = 0;
            for (int t = 1; t <= n; ++t) m += t * pmf[t - 1];
            const double e = expected_stop_time(p);
            EXPECT_NEAR(e, m, 1e-10 * n) << q.name() << ' ' << n;
            EXPECT_GE(e, 1.0 - 1e-12);
            EXPECT_LE(e, n + 1e-12);
        }
}

TEST(ExpectedStopTime, MatchesEnumeration) {
    for (const auto& q : rewards())
        for (int n = 1; n <= 7; ++n) {
            const auto p = table_policy(q, HorizonSpec::fixed(n));
            const auto pmf = stop_time_pmf(p);
            const auto ref = enumerated_pmf(p);
            double e = 0;
            for (int t = 1; t <= n; ++t) {
                EXPECT_NEAR(pmf[t - 1], ref[t - 1], 1e-12) << q.name() << ' ' << n << ' ' << t;
                e += t * ref[t - 1];
            }
            EXPECT_NEAR(expected_stop_time(p), e, 1e-12);
        }
}

TEST(ExpectedStopTime, Examples) {
    EXPECT_NEAR(expected_stop_time(gusein_zade(100, 2).policy.value()) / 100, 0.68645, 5e-6);
    EXPECT_NEAR(expected_stop_time(classical_secretary(100).policy.value()) / 100, 0.74104, 5e-6);
    // U_t(r) = b exactly at several t, so E tau depends on the tie rule; continuing on ties gives 0.852443
    EXPECT_NEAR(expected_stop_time(postdoc(101, 2).policy.value()) / 101, 0.85244338, 5e-9);
}

TEST(EffectiveStopTime, FixedHorizonRejected) {
    const auto p = classical_secretary(10).policy.value();
    EXPECT_THROW(expected_effective_stop_time(p, HorizonSpec::fixed(10)), std::invalid_argument);
}

TEST(EffectiveStopTime, DegenerateEqualsPlain) {
    std::vector<double> g(30, 0.0);
    g.back() = 1.0;
    const auto h = HorizonSpec::random(g);
    const auto p = table_policy(RewardSpec::one_of_k_best(2), h);
    EXPECT_NEAR(expected_effective_stop_time(p, h), expected_stop_time(p), 1e-12);
}

TEST(EffectiveStopTime, BoundedByBothMeans) {
    for (const auto& h : {uniform_horizon(100), zib_mixture_horizon(), u_shaped_horizon(), pettitt_horizon(2.0, 80)})
        for (const auto& q : {RewardSpec::best_choice(), RewardSpec::one_of_k_best(3), RewardSpec::rank_improvement()}) {
            const auto p = table_policy(q, h);
            const double ee = expected_effective_stop_time(p, h);
            EXPECT_LE(ee, std::min(expected_stop_time(p), h.mean()) + 1e-12);
            EXPECT_GE(ee, 1.0 - 1e-12);
        }
}

// E(tau ^ N) = sum_k gamma_k sum_t min(t, k) P(tau = t), evaluated literally.
TEST(EffectiveStopTime, LiteralTripleSum) {
    std::mt19937_64 gen(3);
    for (int nu : {1, 2, 5, 17, 64, 200}) {
        const auto h = HorizonSpec::random(testing::random_gamma(nu, gen));
        for (const auto& q : {RewardSpec::best_choice(), RewardSpec::neg_rank()}) {
            const auto p = table_policy(q, h);
            const auto pmf = stop_time_pmf(p);
            double lit = 0;
            for (int k = 1; k <= nu; ++k)
                for (int t = 1; t <= nu; ++t) lit += h.gamma(k) * std::min(t, k) * pmf[t - 1];
            EXPECT_NEAR(expected_effective_stop_time(p, h), lit, 1e-10 * nu) << nu;
        }
    }
}

TEST(EffectiveStopTime, UniformBestChoiceExample) {
    // 0.27410 belongs to N_max = 80; N_max = 100 gives 0.278742.
    const auto s = csp_random(uniform_horizon(100));
    EXPECT_NEAR(s.diagnostics.at("expected_effective_time_over_nu").get<double>(), 0.27874169, 5e-9);
    const auto s80 = csp_random(uniform_horizon(80));
    EXPECT_NEAR(s80.diagnostics.at("expected_effective_time_over_nu").get<double>(), 0.27410, 5e-6);
}

TEST(StopTimeStats, Export) {
    const auto p = classical_secretary(3).policy.value();
    const auto st = stop_time_stats(p, HorizonSpec::fixed(3));
    EXPECT_FALSE(st.expected_effective_time.has_value());
    std::ostringstream os;
    st.write_csv(os);
    EXPECT_EQ(os.str().substr(0, 6), "t,pmf\n");
    EXPECT_TRUE(st.to_json().at("expected_effective_time").is_null());
}

}  // namespace
}  // namespace seqsel
