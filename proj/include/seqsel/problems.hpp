#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqsel/assignment.hpp"
#include "seqsel/horizon.hpp"
#include "seqsel/rank_core.hpp"
#include "seqsel/stop_engine.hpp"

namespace seqsel {

struct SolveOptions {
    // Skip the threshold array and rank rows; only the value is returned.
    bool value_only = false;
};

struct Solution {
    std::string id;
    // In the problem's own orientation (probability, expected rank, ...).
    double value = 0.0;
    std::string orientation;
    // Maximized engine value b_{nu+1} (or S_*(k) for multi-choice).
    double engine_value = 0.0;
    std::optional<ThresholdPolicy> policy;
    std::optional<MultiChoicePolicy> multi;
    nlohmann::json diagnostics = nlohmann::json::object();

    nlohmann::json to_json(bool with_thresholds = true) const;
};

Solution classical_secretary(int n, SolveOptions opt = {});
Solution gusein_zade(int n, int k);
// value_only streams the rows (memory O(k)); the value and expected time are still reported.
Solution postdoc(int n, int k, SolveOptions opt = {});
Solution chow_expected_rank(int n, SolveOptions opt = {});
Solution squared_rank(int n, SolveOptions opt = {});
Solution csp_random(const HorizonSpec& horizon);
Solution gusein_random(const HorizonSpec& horizon, int k);
Solution pettitt_expected_rank(const HorizonSpec& horizon, bool zero_at_horizon = false);
Solution moser_random(const HorizonSpec& horizon, const std::string& observation_law = "uniform");
Solution bruss_odds(const std::vector<double>& p);
Solution multi_best(int n, int k);
Solution multi_avg_rank(int n, int k);
// Any reward on any horizon through the table pipeline.
Solution solve_rank_problem(const RewardSpec& q, const HorizonSpec& horizon);

RewardSpec reward_from_json(const nlohmann::json& j);
nlohmann::json reward_to_json(const RewardSpec& q);

struct ProblemInstance {
    std::string id;
    nlohmann::json params = nlohmann::json::object();
    std::optional<HorizonSpec> horizon;

    static ProblemInstance from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    // The reward the instance optimizes, when it is a rank problem.
    std::optional<RewardSpec> reward() const;
    bool is_rank_problem() const;
    // nu of the resolved horizon (truncating infinite ones).
    int horizon_bound() const;
    HorizonSpec resolved_horizon() const;
};

Solution solve(const ProblemInstance& problem, SolveOptions opt = {});

// Ranks shown in a stopping region by default: the reward's support bound, else 20.
int default_region_rank(const ProblemInstance& problem, int nu);

struct ProblemDescriptor {
    std::string id;
    std::string tag;
    std::string description;
    nlohmann::json params;
};

const std::vector<ProblemDescriptor>& catalog();
nlohmann::json catalog_json();

}  // namespace seqsel
