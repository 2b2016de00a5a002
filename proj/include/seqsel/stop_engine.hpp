#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "seqsel/rank_core.hpp"

namespace seqsel {

// A finite discrete law: strictly increasing atoms with positive probabilities.
class SupportDistribution {
public:
    SupportDistribution(std::vector<double> atoms, std::vector<double> probs);
    static SupportDistribution point(double c);

    std::size_t size() const { return atoms_.size(); }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& probs() const { return probs_; }

    double mean() const;
    // P(Y <= z), exact comparison.
    double cdf(double z) const;
    // E[max(b, Y)].
    double expected_max(double b) const;
    // E[min(max(Y, lo), hi)]; a missing bound is -inf / +inf.
    double clamp_mean(std::optional<double> lo, std::optional<double> hi) const;

private:
    std::vector<double> atoms_;
    std::vector<double> probs_;
};

enum class Decision { Stop, Continue };

// Values within this relative distance count as equal when compared with a threshold.
inline constexpr double kTieTolerance = 1e-12;

// u > b with near-equal values treated as a tie (and hence not exceeding).
inline bool exceeds_threshold(double u, double b) {
    return u > b && u - b > kTieTolerance * std::max(std::abs(u), std::abs(b));
}
// Largest z that still ties with b; P(Y <= tie_ceiling(b)) is the continuation probability.
inline double tie_ceiling(double b) { return b + kTieTolerance * std::abs(b); }

struct ThresholdPolicy {
    int nu = 0;
    // thresholds[i] = b_{i+2} for i = 0..nu-1; b_1 is the -inf sentinel.
    std::vector<double> thresholds;
    double value = 0.0;
    // supports[t-1] is the law of Y_t; empty for closed-form solvers.
    std::vector<SupportDistribution> supports;
    std::shared_ptr<const ConditionalRewardTable> table;
    // U_t(r) when no table is stored.
    std::function<double(int, int)> reward;
    // F_t(z) when no supports are stored.
    std::function<double(int, double)> law_cdf;

    // b_i for i in 1..nu+1; nullopt for the sentinel b_1.
    std::optional<double> b(int i) const;
    // The threshold compared at time t: b_{nu-t+1}.
    std::optional<double> threshold_at(int t) const { return b(nu - t + 1); }
    bool has_rank_rows() const { return table != nullptr || static_cast<bool>(reward); }
    double U(int t, int r) const;
    // F_t(z) = P(Y_t <= z).
    double cdf(int t, double z) const;

    nlohmann::json to_json() const;
};

SupportDistribution collapse_support(std::span<const double> row);
// Explicit entries plus `tail_count` copies of `tail_value`, grouped by exact equality.
SupportDistribution collapse_banded(std::span<const double> explicit_entries, int tail_count, double tail_value);

ThresholdPolicy backward_thresholds(std::vector<SupportDistribution> supports);
ThresholdPolicy stop_general(std::vector<SupportDistribution> laws);
// Table -> supports -> thresholds; banded rows use exact grouping.
ThresholdPolicy solve_table(std::shared_ptr<const ConditionalRewardTable> table);

Decision decide(const ThresholdPolicy& policy, int t, int r);

struct Island {
    int first;
    int last;
};

struct StoppingRegion {
    int nu = 0;
    int max_rank = 0;
    // stop[t-1][r-1] for r <= min(t, max_rank).
    std::vector<std::vector<char>> stop;
    // islands[r-1]: maximal runs of t with stop[t][r].
    std::vector<std::vector<Island>> islands;
};

StoppingRegion stopping_region(const ThresholdPolicy& policy, int max_rank = 0);
void write_region_csv(const ThresholdPolicy& policy, const StoppingRegion& region, std::ostream& out);
nlohmann::json region_json(const ThresholdPolicy& policy, const StoppingRegion& region);

}  // namespace seqsel
