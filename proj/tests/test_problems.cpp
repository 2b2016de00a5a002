#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "seqsel/horizon.hpp"
#include "seqsel/oracle.hpp"
#include "seqsel/problems.hpp"
#include "seqsel/rank_core.hpp"
#include "support.hpp"

namespace seqsel {
namespace {

using testing::close;

void expect_same_policy(const Solution& fast, const Solution& generic, double rel) {
    ASSERT_TRUE(fast.policy && generic.policy);
    const auto& a = *fast.policy;
    const auto& b = *generic.policy;
    ASSERT_EQ(a.nu, b.nu);
    EXPECT_TRUE(close(a.value, b.value, rel, 1e-14)) << fast.id << ' ' << a.value << " vs " << b.value;
    for (int i = 2; i <= a.nu + 1; ++i)
        ASSERT_TRUE(close(*a.b(i), *b.b(i), rel, 1e-14)) << fast.id << " nu=" << a.nu << " i=" << i;
    for (int t = 1; t <= a.nu; t += std::max(1, a.nu / 17))
        for (int r = 1; r <= t; ++r)
            ASSERT_TRUE(close(a.U(t, r), b.U(t, r), rel, 1e-12)) << fast.id << " t=" << t << " r=" << r << ": " << a.U(t, r) << " vs " << b.U(t, r);
}

TEST(FastPaths, MatchGenericPipelineFixed) {
    for (int n : {1, 2, 3, 8, 31, 100, 200}) {
        const auto h = HorizonSpec::fixed(n);
        expect_same_policy(classical_secretary(n), solve_rank_problem(RewardSpec::best_choice(), h), 1e-12);
        expect_same_policy(chow_expected_rank(n), solve_rank_problem(RewardSpec::neg_rank(), h), 1e-12);
        expect_same_policy(squared_rank(n), solve_rank_problem(RewardSpec::neg_squared_rank(), h), 1e-12);
        for (int k : {1, 2, 3}) {
            if (k > n) continue;
            expect_same_policy(gusein_zade(n, k), solve_rank_problem(RewardSpec::one_of_k_best(k), h), 1e-12);
            expect_same_policy(postdoc(n, k), solve_rank_problem(RewardSpec::kth_best(k), h), 1e-12);
        }
    }
}

TEST(FastPaths, MatchGenericPipelineRandom) {
    std::mt19937_64 gen(11);
    std::vector<HorizonSpec> hs = {uniform_horizon(1), uniform_horizon(100), zib_mixture_horizon(),
                                   u_shaped_horizon(), pettitt_horizon(2.0, 150)};
    for (int rep = 0; rep < 5; ++rep) hs.push_back(HorizonSpec::random(testing::random_gamma(20 + 40 * rep, gen)));
    for (const auto& h : hs) {
        expect_same_policy(csp_random(h), solve_rank_problem(RewardSpec::best_choice(), h), 1e-12);
        expect_same_policy(pettitt_expected_rank(h), solve_rank_problem(RewardSpec::rank_improvement(), h), 1e-12);
        expect_same_policy(pettitt_expected_rank(h, true), solve_rank_problem(RewardSpec::rank_improvement(true), h),
                           1e-12);
    }
}

TEST(FastPaths, StreamedPostdocMatchesTable) {
    for (int n : {1, 2, 9, 101, 500})
        for (int k : {1, 2, 5, n / 2}) {
            if (k < 1 || k > n) continue;
            const auto full = postdoc(n, k);
            const auto streamed = postdoc(n, k, {.value_only = true});
            EXPECT_FALSE(streamed.policy.has_value() && !streamed.policy->thresholds.empty());
            EXPECT_TRUE(close(full.value, streamed.value, 1e-12, 1e-15)) << n << ' ' << k;
            EXPECT_NEAR(full.diagnostics.at("expected_time").get<double>(),
                        streamed.diagnostics.at("expected_time").get<double>(), 1e-9 * n) << n << " " << k;
        }
}

TEST(Classical, Examples) {
    EXPECT_EQ(classical_secretary(1).value, 1.0);
    EXPECT_DOUBLE_EQ(classical_secretary(2).value, 0.5);
    EXPECT_NEAR(classical_secretary(10000).value, 0.36791, 5e-6);
    EXPECT_EQ(classical_secretary(5).orientation, "probability");
    EXPECT_THROW(classical_secretary(0), std::invalid_argument);
}

TEST(GuseinZade, Examples) {
    EXPECT_NEAR(gusein_zade(100, 2).value, 0.57956, 5e-6);
    EXPECT_NEAR(gusein_zade(1000, 5).value, 0.86123, 5e-6);
    for (int n : {1, 4, 30}) EXPECT_NEAR(gusein_zade(n, n).value, 1.0, 1e-12);
    for (int n : {1, 7, 300}) EXPECT_DOUBLE_EQ(gusein_zade(n, 1).value, classical_secretary(n).value);
    EXPECT_THROW(gusein_zade(3, 4), std::invalid_argument);
}

TEST(Postdoc, OddClosedForm) {
    for (int n = 3; n <= 2001; n += 2)
        ASSERT_NEAR(postdoc(n, 2).value, (n + 1.0) / (4.0 * n), 1e-12) << n;
    for (int n = 2003; n <= 9999; n += 14)
        ASSERT_NEAR(postdoc(n, 2, {.value_only = true}).value, (n + 1.0) / (4.0 * n), 1e-12) << n;
}

TEST(Postdoc, Examples) {
    EXPECT_NEAR(postdoc(5001, 2).value, 0.25005, 5e-6);
    EXPECT_NEAR(postdoc(101, 50).value, 0.11467, 5e-6);
    for (int n : {1, 2, 11, 150}) EXPECT_NEAR(postdoc(n, 1).value, classical_secretary(n).value, 1e-12);
    EXPECT_NEAR(postdoc(1, 1).value, 1.0, 1e-15);
}

TEST(Chow, Examples) {
    EXPECT_EQ(chow_expected_rank(1).value, 1.0);
    EXPECT_NEAR(chow_expected_rank(3).value, -exact_optimal_value(RewardSpec::neg_rank(), 3), 1e-12);
    EXPECT_NEAR(chow_expected_rank(3).value, 5.0 / 3.0, 1e-12);
    EXPECT_EQ(chow_expected_rank(3).orientation, "expected_rank");
    EXPECT_LT(chow_expected_rank(3).engine_value, 0.0);
}

TEST(SquaredRank, Examples) {
    EXPECT_EQ(squared_rank(1).value, 1.0);
    EXPECT_NEAR(squared_rank(100).value, 23.70663, 5e-6);
    EXPECT_NEAR(squared_rank(1000).value, 28.34466, 5e-6);
    EXPECT_NEAR(squared_rank(5).value, -exact_optimal_value(RewardSpec::neg_squared_rank(), 5), 1e-12);
}

TEST(CspRandom, Examples) {
    EXPECT_NEAR(csp_random(uniform_horizon(100)).value, 0.27779, 5e-6);
    for (int n : {1, 5, 60}) {
        std::vector<double> g(n, 0.0);
        g.back() = 1.0;
        EXPECT_NEAR(csp_random(HorizonSpec::random(g)).value, classical_secretary(n).value, 1e-12);
    }
}

TEST(GuseinRandom, Examples) {
    EXPECT_NEAR(gusein_random(uniform_horizon(100), 2).value, 0.41506, 5e-6);
    EXPECT_NEAR(gusein_random(u_shaped_horizon(), 3).value, 0.39711, 5e-6);
    for (const auto& h : {uniform_horizon(50), zib_mixture_horizon()})
        EXPECT_NEAR(gusein_random(h, 1).value, csp_random(h).value, 1e-12);
}

TEST(Pettitt, Examples) {
    EXPECT_NEAR(pettitt_expected_rank(pettitt_horizon(1.0, 100)).value, 4.74437, 5e-6);
    EXPECT_NEAR(pettitt_expected_rank(uniform_horizon(1)).value, 1.0, 1e-15);
    EXPECT_GE(pettitt_expected_rank(uniform_horizon(30)).engine_value, 0.0);
    EXPECT_EQ(pettitt_expected_rank(uniform_horizon(3)).orientation, "expected_rank");
}

// With a fixed horizon the Moser recursion is E_{t+1} = (1 + E_t^2) / 2.
TEST(Moser, FixedHorizonRecursion) {
    double e = 0.5;
    for (int n = 1; n <= 200; ++n) {
        if (n > 1) e = (1.0 + e * e) / 2.0;
        ASSERT_NEAR(moser_random(HorizonSpec::fixed(n)).value, e, 1e-15) << n;
    }
    EXPECT_DOUBLE_EQ(moser_random(HorizonSpec::fixed(2)).value, 0.625);
    EXPECT_NEAR(moser_random(HorizonSpec::fixed(4)).value, 0.7417297363281250, 1e-15);
    EXPECT_DOUBLE_EQ(moser_random(uniform_horizon(1)).value, 0.5);
    EXPECT_THROW(moser_random(HorizonSpec::fixed(3), "normal"), std::invalid_argument);
}

TEST(Moser, RandomHorizonBelowFixed) {
    const double fixed = moser_random(HorizonSpec::fixed(20)).value;
    const double random = moser_random(uniform_horizon(20)).value;
    EXPECT_LT(random, fixed);
    EXPECT_GT(random, 0.5);
}

double bruss_closed_form(const std::vector<double>& p) {
    const int n = static_cast<int>(p.size());
    int t_star = 1;
    double odds = 0;
    for (int k = n; k >= 1; --k) {
        odds += p[k - 1] / (1 - p[k - 1]);
        if (odds >= 1.0) {
            t_star = k;
            break;
        }
    }
    double prod = 1, sum = 0;
    for (int j = t_star; j <= n; ++j) {
        prod *= 1 - p[j - 1];
        sum += p[j - 1] / (1 - p[j - 1]);
    }
    return prod * sum;
}

TEST(Bruss, Examples) {
    const auto s = bruss_odds({0.1, 0.2, 0.3, 0.4});
    EXPECT_NEAR(s.value, 0.46, 1e-12);
    EXPECT_EQ(s.diagnostics.at("t_star"), 3);
    EXPECT_DOUBLE_EQ(bruss_odds({0.5}).value, 0.5);
    // a sure first success: stop on it unless the second trial also succeeds
    EXPECT_NEAR(bruss_odds({1.0, 0.3}).value, 0.7, 1e-15);
    EXPECT_THROW(bruss_odds({0.2, 1.0}), std::invalid_argument);
    EXPECT_THROW(bruss_odds({0.2, 0.0}), std::invalid_argument);
    EXPECT_THROW(bruss_odds({}), std::invalid_argument);
}

TEST(Bruss, RecursionMatchesClosedForm) {
    std::mt19937_64 gen(1234);
    std::uniform_int_distribution<int> len(1, 60);
    std::uniform_real_distribution<double> u(0.001, 0.6);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> p(len(gen));
        for (auto& x : p) x = u(gen);
        const auto s = bruss_odds(p);
        const double rec = s.diagnostics.at("recursion_value").get<double>();
        const double closed = s.diagnostics.at("closed_form_value").get<double>();
        ASSERT_NEAR(rec, closed, 1e-12) << rep;
        ASSERT_NEAR(rec, bruss_closed_form(p), 1e-12) << rep;
        ASSERT_EQ(s.value, rec);
    }
}

TEST(MultiChoiceProblems, Values) {
    EXPECT_NEAR(multi_best(10000, 1).value, 0.36791, 5e-6);
    EXPECT_NEAR(multi_best(10000, 8).value, 0.96491, 5e-6);
    const auto avg = multi_avg_rank(1000, 2);
    EXPECT_NEAR(avg.diagnostics.at("expected_tau1").get<double>(), 396.25983, 1e-4);
    EXPECT_NEAR(avg.diagnostics.at("expected_tau2").get<double>(), 610.54822, 1e-4);
    EXPECT_EQ(avg.orientation, "expected_average_rank");
}

TEST(ProblemInstance, JsonAndSolve) {
    const auto p = ProblemInstance::from_json({{"id", "postdoc"}, {"params", {{"n", 101}, {"k", 2}}}});
    EXPECT_TRUE(p.is_rank_problem());
    EXPECT_NEAR(solve(p).value, 0.25247524752475, 1e-12);
    const auto flat = ProblemInstance::from_json({{"id", "classical"}, {"n", 10}});
    EXPECT_EQ(flat.params.at("n"), 10);
    const auto again = ProblemInstance::from_json(p.to_json());
    EXPECT_EQ(again.params, p.params);
    const auto g = ProblemInstance::from_json(
        {{"id", "gusein_random"}, {"params", {{"k", 3}}}, {"horizon", {{"type", "u_shaped"}}}});
    EXPECT_NEAR(solve(g).value, 0.39711, 5e-6);
    const auto geo = ProblemInstance::from_json(
        {{"id", "csp_random"}, {"horizon", {{"type", "geometric"}, {"p", 0.5}, {"epsilon", 1e-6}}}});
    EXPECT_EQ(geo.horizon_bound(), 20);
    const auto bruss = ProblemInstance::from_json({{"id", "bruss"}, {"p", {0.1, 0.2, 0.3, 0.4}}});
    EXPECT_FALSE(bruss.is_rank_problem());
    EXPECT_NEAR(solve(bruss).value, 0.46, 1e-12);
    const auto rank = ProblemInstance::from_json(
        {{"id", "rank"}, {"reward", {{"type", "kth_best"}, {"k", 3}}}, {"horizon", {{"type", "fixed"}, {"n", 9}}}});
    EXPECT_NEAR(solve(rank).value, postdoc(9, 3).value, 1e-15);
}

TEST(ProblemInstance, Errors) {
    EXPECT_THROW(ProblemInstance::from_json({{"id", "nope"}}), std::invalid_argument);
    EXPECT_THROW(ProblemInstance::from_json({{"id", "postdoc"}, {"n", 3}, {"k", 4}}), std::invalid_argument);
    EXPECT_THROW(ProblemInstance::from_json({{"id", "classical"}}), std::invalid_argument);
    EXPECT_THROW(ProblemInstance::from_json({{"id", "csp_random"}}), std::invalid_argument);
    EXPECT_THROW(ProblemInstance::from_json({{"id", "bruss"}, {"p", nlohmann::json::array()}}), std::invalid_argument);
    EXPECT_THROW(ProblemInstance::from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST(Catalog, Descriptors) {
    bool postdoc_found = false, bruss_found = false;
    for (const auto& d : catalog()) {
        if (d.id == "postdoc") {
            postdoc_found = true;
            EXPECT_TRUE(d.params.contains("n") && d.params.contains("k"));
        }
        if (d.id == "bruss") {
            bruss_found = true;
            EXPECT_EQ(d.params.at("p").at("type"), "array");
        }
    }
    EXPECT_TRUE(postdoc_found && bruss_found);
    EXPECT_GE(catalog().size(), 12u);
}

TEST(Solution, Json) {
    const auto j = classical_secretary(4).to_json();
    EXPECT_NEAR(j.at("value").get<double>(), 11.0 / 24.0, 1e-15);
    EXPECT_EQ(j.at("nu"), 4);
    EXPECT_EQ(j.at("orientation"), "probability");
    EXPECT_EQ(j.at("b").size(), 5u);
}

TEST(DefaultRegionRank, Bounds) {
    const auto p = ProblemInstance::from_json({{"id", "gusein_zade"}, {"n", 100}, {"k", 3}});
    EXPECT_EQ(default_region_rank(p, 100), 3);
    const auto c = ProblemInstance::from_json({{"id", "chow"}, {"n", 100}});
    EXPECT_EQ(default_region_rank(c, 100), 20);
    EXPECT_EQ(default_region_rank(c, 5), 5);
}

}  // namespace
}  // namespace seqsel
