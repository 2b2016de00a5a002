#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "json.hpp"
#include "seqsel/horizon.hpp"
#include "seqsel/rank_core.hpp"

namespace seqsel {

// true means stop at time t on relative rank r
using DecisionFn = std::function<bool(int t, int r)>;

double exact_policy_value(const DecisionFn& decide, const RewardSpec& q, int n);
double exact_optimal_value(const RewardSpec& q, int n);
// gamma[k-1] = P(N = k), k = 1..nu
double exact_optimal_value_random(const RewardSpec& q, std::span<const double> gamma);

struct SimulationReport {
    long long trials = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    std::optional<double> std_error;
    double stop_time_mean = 0.0;

    nlohmann::json to_json() const;
};

SimulationReport simulate(const DecisionFn& decide, const RewardSpec& q, const HorizonSpec& horizon, long long trials,
                          std::uint64_t seed, int threads = 0);

}  // namespace seqsel
