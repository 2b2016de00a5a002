#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "seqsel/horizon.hpp"
#include "seqsel/rank_core.hpp"
#include "support.hpp"

namespace seqsel {
namespace {

using testing::close;

std::vector<RewardSpec> named_rewards() {
    return {RewardSpec::best_choice(),          RewardSpec::one_of_k_best(2),      RewardSpec::one_of_k_best(3),
            RewardSpec::kth_best(2),            RewardSpec::kth_best(4),           RewardSpec::neg_rank(),
            RewardSpec::neg_squared_rank(),     RewardSpec::neg_factorial_moment(2), RewardSpec::neg_factorial_moment(3),
            RewardSpec::rank_improvement()};
}

TEST(RelativeRanks, Examples) {
    std::vector<double> one{0.7};
    EXPECT_EQ(relative_ranks(one).ranks, std::vector<int>({1}));
    std::vector<double> inc{1, 2, 3};
    EXPECT_EQ(relative_ranks(inc).ranks, std::vector<int>({1, 1, 1}));
    std::vector<double> mixed{3, 1, 2};
    EXPECT_EQ(relative_ranks(mixed).ranks, std::vector<int>({1, 2, 2}));
    EXPECT_FALSE(relative_ranks(mixed).has_ties);
}

TEST(RelativeRanks, TiesAreCountedAndFlagged) {
    std::vector<double> v{2, 2, 1};
    const auto rs = relative_ranks(v);
    EXPECT_TRUE(rs.has_ties);
    EXPECT_EQ(rs.ranks, std::vector<int>({1, 2, 3}));
}

TEST(RelativeRanks, EmptyThrows) {
    std::vector<double> v;
    EXPECT_THROW(relative_ranks(v), std::invalid_argument);
}

TEST(RelativeRanks, RangeProperty) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u;
    std::vector<double> v(200);
    for (auto& x : v) x = u(gen);
    const auto rs = relative_ranks(v);
    for (std::size_t t = 0; t < v.size(); ++t) {
        EXPECT_GE(rs.ranks[t], 1);
        EXPECT_LE(rs.ranks[t], static_cast<int>(t) + 1);
    }
}

TEST(Hypergeom, Examples) {
    for (int n = 1; n <= 8; ++n)
        for (int r = 1; r <= n; ++r) EXPECT_DOUBLE_EQ(hypergeom_transition(r, r, n, n), 1.0);
    EXPECT_DOUBLE_EQ(hypergeom_transition(1, 1, 1, 2), 0.5);
    EXPECT_NEAR(hypergeom_transition(2, 1, 2, 4), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(hypergeom_transition(5, 1, 3, 6), 0.0);
    EXPECT_THROW(hypergeom_transition(1, 2, 1, 3), std::invalid_argument);
    EXPECT_THROW(hypergeom_transition(1, 1, 4, 3), std::invalid_argument);
}

// P(A_t = a | R_t = r) by counting orderings of n candidates.
TEST(Hypergeom, MatchesPermutationCount) {
    const int n = 6;
    std::vector<std::vector<std::vector<double>>> joint(n + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0)));
    testing::for_each_order(n, [&](const std::vector<int>& abs) {
        for (int t = 1; t <= n; ++t) {
            joint[t][testing::relative_rank(abs, t)][abs[t - 1]] += 1;
        }
    });
    for (int t = 1; t <= n; ++t)
        for (int r = 1; r <= t; ++r) {
            double tot = 0;
            for (int a = 1; a <= n; ++a) tot += joint[t][r][a];
            for (int a = 1; a <= n; ++a) EXPECT_NEAR(hypergeom_transition(a, r, t, n), joint[t][r][a] / tot, 1e-14);
        }
}

TEST(Hypergeom, TransitionsNormalize) {
    for (int n = 1; n <= 50; ++n)
        for (int t = 1; t <= n; ++t)
            for (int r = 1; r <= t; ++r) {
                double s = 0;
                for (int a = r; a <= n - t + r; ++a) s += hypergeom_transition(a, r, t, n);
                ASSERT_NEAR(s, 1.0, 1e-12) << n << ' ' << t << ' ' << r;
            }
}

TEST(Hypergeom, LargeArguments) {
    // log-space path: mass still sums to one
    const int n = 5000, t = 2500, r = 3;
    double s = 0;
    for (int a = r; a <= n - t + r; ++a) s += hypergeom_transition(a, r, t, n);
    EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(RewardTableFixed, RecursionMatchesDirectSummation) {
    for (const auto& q : named_rewards())
        for (int n = 1; n <= 30; ++n) {
            const auto rec = reward_table_fixed(q, n);
            const auto dir = reward_table_fixed_direct(q, n);
            for (int t = 1; t <= n; ++t)
                for (int r = 1; r <= t; ++r)
                    ASSERT_TRUE(close(rec.at(t, r), dir.at(t, r), 1e-12, 1e-14))
                        << q.name() << " n=" << n << " t=" << t << " r=" << r << ": " << rec.at(t, r) << " vs "
                        << dir.at(t, r);
        }
}

TEST(RewardTableFixed, ClosedForms) {
    const int n = 25;
    const auto best = reward_table_fixed(RewardSpec::best_choice(), n);
    const auto neg = reward_table_fixed(RewardSpec::neg_rank(), n);
    for (int t = 1; t <= n; ++t)
        for (int r = 1; r <= t; ++r) {
            EXPECT_NEAR(best.at(t, r), r == 1 ? static_cast<double>(t) / n : 0.0, 1e-14);
            EXPECT_NEAR(neg.at(t, r), -(n + 1.0) * r / (t + 1.0), 1e-12);
        }
    const auto k3 = reward_table_fixed(RewardSpec::one_of_k_best(3), n);
    for (int r = 1; r <= n; ++r) EXPECT_EQ(k3.at(n, r), r <= 3 ? 1.0 : 0.0);
}

TEST(RewardTableFixed, FactorialMomentIdentity) {
    for (int k = 1; k <= 3; ++k)
        for (int n = 1; n <= 30; ++n) {
            const auto tab = reward_table_fixed(RewardSpec::neg_factorial_moment(k), n);
            for (int t = 1; t <= n; ++t)
                for (int r = 1; r <= t; ++r) {
                    double c = 1.0;
                    for (int i = 1; i <= k; ++i) c *= (n + i) / static_cast<double>(t + i) * (r + i - 1);
                    ASSERT_TRUE(close(tab.at(t, r), -c, 1e-10)) << k << ' ' << n << ' ' << t << ' ' << r;
                }
        }
}

TEST(RewardTableFixed, RowsMonotoneForDecreasingRewards) {
    for (const auto& q : {RewardSpec::best_choice(), RewardSpec::one_of_k_best(4), RewardSpec::neg_rank(),
                          RewardSpec::neg_squared_rank(), RewardSpec::rank_improvement()}) {
        const auto tab = reward_table_fixed(q, 40);
        for (int t = 1; t <= 40; ++t)
            for (int r = 1; r < t; ++r) ASSERT_GE(tab.at(t, r) + 1e-12, tab.at(t, r + 1)) << q.name();
    }
}

TEST(RewardTableFixed, StreamedRowsMatchTable) {
    for (const auto& q : {RewardSpec::kth_best(2), RewardSpec::kth_best(7), RewardSpec::one_of_k_best(3),
                          RewardSpec::neg_rank()}) {
        const int n = 60;
        const auto tab = reward_table_fixed(q, n);
        int expected_t = n;
        for_each_fixed_row(q, n, [&](int t, const std::vector<double>& row) {
            ASSERT_EQ(t, expected_t--);
            for (int r = 1; r <= t; ++r) {
                const double v = r <= static_cast<int>(row.size()) ? row[r - 1] : 0.0;
                ASSERT_NEAR(v, tab.at(t, r), 1e-15) << q.name() << ' ' << t << ' ' << r;
            }
        });
        EXPECT_EQ(expected_t, 0);
    }
}

TEST(RewardTableFixed, CustomReward) {
    const auto q = RewardSpec::custom({5, 3, 1, 0});
    EXPECT_NO_THROW(q.check_bound(4));
    EXPECT_THROW(q.check_bound(5), std::invalid_argument);
    const auto tab = reward_table_fixed(q, 4);
    const auto dir = reward_table_fixed_direct(q, 4);
    for (int t = 1; t <= 4; ++t)
        for (int r = 1; r <= t; ++r) EXPECT_NEAR(tab.at(t, r), dir.at(t, r), 1e-13);
    EXPECT_EQ(q.evaluate(0, 4), 0.0);
}

TEST(RewardTableFixed, CsvExport) {
    const auto tab = reward_table_fixed(RewardSpec::best_choice(), 2);
    std::ostringstream os;
    tab.write_csv(os);
    EXPECT_EQ(os.str().substr(0, 6), "t,r,U\n");
}

TEST(RewardTableRandom, RecursionMatchesDirectSummation) {
    std::mt19937_64 gen(2024);
    int vectors = 0;
    for (int nu = 1; nu <= 50; nu += (nu < 10 ? 1 : 7)) {
        for (int rep = 0; rep < (nu <= 10 ? 12 : 2); ++rep, ++vectors) {
            const auto gamma = testing::random_gamma(nu, gen);
            const auto h = HorizonSpec::random(gamma);
            for (const auto& q : named_rewards()) {
                const auto rec = reward_table_random(q, h);
                const auto dir = reward_table_random_direct(q, h);
                for (int t = 1; t <= nu; ++t)
                    for (int r = 1; r <= t; ++r)
                        ASSERT_TRUE(close(rec.at(t, r), dir.at(t, r), 1e-12, 1e-14))
                            << q.name() << " nu=" << nu << " t=" << t << " r=" << r;
            }
        }
    }
    EXPECT_GE(vectors, 100);
}

TEST(RewardTableRandom, ClosedForms) {
    const int nu = 30;
    const auto h = uniform_horizon(nu);
    const auto best = reward_table_random(RewardSpec::best_choice(), h);
    const auto imp = reward_table_random(RewardSpec::rank_improvement(), h);
    for (int t = 1; t <= nu; ++t) {
        double s1 = 0, s2 = 0;
        for (int k = t; k <= nu; ++k) {
            s1 += h.gamma(k) / k;
            s2 += (k + 1) * h.gamma(k);
        }
        for (int r = 1; r <= t; ++r) {
            EXPECT_NEAR(best.at(t, r), r == 1 ? t * s1 : 0.0, 1e-14);
            EXPECT_NEAR(imp.at(t, r), (0.5 - r / (t + 1.0)) * s2, 1e-12);
        }
    }
}

TEST(RewardTableRandom, DegenerateHorizonEqualsFixed) {
    const int n = 20;
    std::vector<double> g(n, 0.0);
    g[n - 1] = 1.0;
    for (const auto& q : named_rewards()) {
        const auto a = reward_table_random(q, HorizonSpec::random(g));
        const auto b = reward_table_fixed(q, n);
        for (int t = 1; t <= n; ++t)
            for (int r = 1; r <= t; ++r) ASSERT_NEAR(a.at(t, r), b.at(t, r), 1e-12) << q.name();
    }
}

TEST(RewardTableRandom, UnnormalizedGammaRejected) {
    EXPECT_THROW(HorizonSpec::random({0.5, 0.4}), std::invalid_argument);
    EXPECT_NO_THROW(HorizonSpec::random({0.5, 0.4}, true));
}

TEST(RewardSpec, Validation) {
    EXPECT_THROW(RewardSpec::one_of_k_best(0), std::invalid_argument);
    EXPECT_THROW(RewardSpec::kth_best(-1), std::invalid_argument);
    EXPECT_THROW(RewardSpec::neg_factorial_moment(0), std::invalid_argument);
}

}  // namespace
}  // namespace seqsel
