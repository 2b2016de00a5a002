#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqsel {

class HorizonSpec;

enum class RewardKind {
    BestChoice,
    OneOfKBest,
    KthBest,
    NegRank,
    NegSquaredRank,
    NegFactorialMoment,
    RankImprovement,
    Custom,
};

// Terminal reward q(a) over absolute ranks a = 1..nu, with q(0) = 0.
class RewardSpec {
public:
    static RewardSpec best_choice();
    static RewardSpec one_of_k_best(int k);
    static RewardSpec kth_best(int k);
    static RewardSpec neg_rank();
    static RewardSpec neg_squared_rank();
    static RewardSpec neg_factorial_moment(int k);
    // Payoff R_k - A_{t,k} on a horizon of length k. By default a stop at t = k
    // is credited (k+1)/2 - r like every earlier time; zero_at_horizon credits 0.
    static RewardSpec rank_improvement(bool zero_at_horizon = false);
    static RewardSpec custom(std::vector<double> values);

    RewardKind kind() const { return kind_; }
    int k() const { return k_; }
    bool zero_at_horizon() const { return zero_at_horizon_; }
    const std::vector<double>& values() const { return values_; }

    // q(a) for a horizon of length `horizon`; only RankImprovement depends on it.
    double evaluate(int a, int horizon) const;
    // Reward for stopping on relative rank r exactly at t = horizon.
    double at_horizon(int r, int horizon) const;
    // Smallest K with q(a) = 0 for all a > K, when one exists.
    std::optional<int> support_bound() const;
    void check_bound(int nu) const;
    std::string name() const;

private:
    RewardSpec(RewardKind kind, int k) : kind_(kind), k_(k) {}

    RewardKind kind_;
    int k_ = 0;
    bool zero_at_horizon_ = false;
    std::vector<double> values_;
};

struct RankSequence {
    std::vector<int> ranks;
    bool has_ties = false;
};

RankSequence relative_ranks(std::span<const double> values);

double hypergeom_transition(int a, int r, int t, int n);

// U_t(r) for 1 <= r <= t <= nu. Rows may be banded: entries with r > band are
// all equal to tail_value and are not stored.
class ConditionalRewardTable {
public:
    ConditionalRewardTable(int nu, int band, std::vector<std::vector<double>> rows,
                           double tail_value = 0.0);

    int horizon_bound() const { return nu_; }
    int band() const { return band_; }
    double tail_value() const { return tail_; }
    bool banded() const { return band_ < nu_; }

    double at(int t, int r) const;
    std::span<const double> explicit_row(int t) const;
    int tail_count(int t) const;
    std::vector<double> row(int t) const;

    void write_csv(std::ostream& out) const;

private:
    int nu_;
    int band_;
    std::vector<std::vector<double>> rows_;
    double tail_;
};

ConditionalRewardTable reward_table_fixed(const RewardSpec& q, int n);
// Visits the rows of reward_table_fixed for t = n down to 1 while holding only
// two of them; entries past the band (row.size() < t) are 0.
void for_each_fixed_row(const RewardSpec& q, int n, const std::function<void(int, const std::vector<double>&)>& visit);
ConditionalRewardTable reward_table_random(const RewardSpec& q, const HorizonSpec& horizon);

// Direct summation over the transition probabilities; quadratic per entry.
ConditionalRewardTable reward_table_fixed_direct(const RewardSpec& q, int n);
ConditionalRewardTable reward_table_random_direct(const RewardSpec& q, const HorizonSpec& horizon);

}  // namespace seqsel
