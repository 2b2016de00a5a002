#include "seqsel/rank_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "seqsel/horizon.hpp"

namespace seqsel {

RewardSpec RewardSpec::best_choice() { return RewardSpec(RewardKind::BestChoice, 1); }

RewardSpec RewardSpec::one_of_k_best(int k) {
    if (k < 1) throw std::invalid_argument("one_of_k_best: k must be >= 1");
    return RewardSpec(RewardKind::OneOfKBest, k);
}

RewardSpec RewardSpec::kth_best(int k) {
    if (k < 1) throw std::invalid_argument("kth_best: k must be >= 1");
    return RewardSpec(RewardKind::KthBest, k);
}

RewardSpec RewardSpec::neg_rank() { return RewardSpec(RewardKind::NegRank, 0); }

RewardSpec RewardSpec::neg_squared_rank() { return RewardSpec(RewardKind::NegSquaredRank, 0); }

RewardSpec RewardSpec::neg_factorial_moment(int k) {
    if (k < 1) throw std::invalid_argument("neg_factorial_moment: k must be >= 1");
    return RewardSpec(RewardKind::NegFactorialMoment, k);
}

RewardSpec RewardSpec::rank_improvement(bool zero_at_horizon) {
    RewardSpec q(RewardKind::RankImprovement, 0);
    q.zero_at_horizon_ = zero_at_horizon;
    return q;
}

RewardSpec RewardSpec::custom(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("custom reward: empty table");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("custom reward: non-finite entry");
    RewardSpec q(RewardKind::Custom, 0);
    q.values_ = std::move(values);
    return q;
}

double RewardSpec::evaluate(int a, int horizon) const {
    if (a == 0) return 0.0;
    if (a < 0) throw std::invalid_argument("reward: negative rank");
    switch (kind_) {
        case RewardKind::BestChoice: return a == 1 ? 1.0 : 0.0;
        case RewardKind::OneOfKBest: return a <= k_ ? 1.0 : 0.0;
        case RewardKind::KthBest: return a == k_ ? 1.0 : 0.0;
        case RewardKind::NegRank: return -static_cast<double>(a);
        case RewardKind::NegSquaredRank: return -static_cast<double>(a) * a;
        case RewardKind::NegFactorialMoment: {
            double p = 1.0;
            for (int i = 0; i < k_; ++i) p *= static_cast<double>(a + i);
            return -p;
        }
        case RewardKind::RankImprovement: return 0.5 * (horizon + 1) - a;
        case RewardKind::Custom:
            if (a > static_cast<int>(values_.size()))
                throw std::invalid_argument("custom reward: rank beyond table length");
            return values_[a - 1];
    }
    return 0.0;
}

double RewardSpec::at_horizon(int r, int horizon) const {
    if (kind_ == RewardKind::RankImprovement && zero_at_horizon_) return 0.0;
    return evaluate(r, horizon);
}

std::optional<int> RewardSpec::support_bound() const {
    switch (kind_) {
        case RewardKind::BestChoice: return 1;
        case RewardKind::OneOfKBest:
        case RewardKind::KthBest: return k_;
        case RewardKind::Custom: {
            int last = static_cast<int>(values_.size());
            while (last > 0 && values_[last - 1] == 0.0) --last;
            return last;
        }
        default: return std::nullopt;
    }
}

void RewardSpec::check_bound(int nu) const {
    if (kind_ == RewardKind::Custom && static_cast<int>(values_.size()) != nu)
        throw std::invalid_argument("custom reward: table length " + std::to_string(values_.size()) +
                                    " does not match horizon bound " + std::to_string(nu));
}

std::string RewardSpec::name() const {
    switch (kind_) {
        case RewardKind::BestChoice: return "best_choice";
        case RewardKind::OneOfKBest: return "one_of_k_best(" + std::to_string(k_) + ")";
        case RewardKind::KthBest: return "kth_best(" + std::to_string(k_) + ")";
        case RewardKind::NegRank: return "neg_rank";
        case RewardKind::NegSquaredRank: return "neg_squared_rank";
        case RewardKind::NegFactorialMoment: return "neg_factorial_moment(" + std::to_string(k_) + ")";
        case RewardKind::RankImprovement:
            return zero_at_horizon_ ? "rank_improvement(zero_at_horizon)" : "rank_improvement";
        case RewardKind::Custom: return "custom";
    }
    return "unknown";
}

RankSequence relative_ranks(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empty sequence");
    RankSequence out;
    out.ranks.reserve(values.size());
    std::vector<double> seen;  // ascending
    seen.reserve(values.size());
    for (double x : values) {
        auto lo = std::lower_bound(seen.begin(), seen.end(), x);
        auto hi = std::upper_bound(lo, seen.end(), x);
        if (lo != hi) out.has_ties = true;
        // self plus every earlier value >= x
        out.ranks.push_back(static_cast<int>(seen.end() - lo) + 1);
        seen.insert(hi, x);
    }
    return out;
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double hypergeom_transition(int a, int r, int t, int n) {
    if (!(1 <= r && r <= t && t <= n))
        throw std::invalid_argument("hypergeom_transition: require 1 <= r <= t <= n");
    if (a < r || a > n - t + r) return 0.0;
    if (n > 1000) {
        double lp = log_choose(a - 1, r - 1) + log_choose(n - a, t - r) - log_choose(n, t);
        return std::exp(lp);
    }
    // C(a-1,r-1) C(n-a,t-r) / C(n,t) as 2t-1 integer ratios, multiplied in an
    // order that keeps the running product near 1.
    std::vector<double> num, den;
    num.reserve(2 * t);
    den.reserve(2 * t);
    for (int i = 1; i <= r - 1; ++i) {
        num.push_back(a - r + i);
        den.push_back(i);
    }
    for (int i = 1; i <= t - r; ++i) {
        num.push_back(n - a - t + r + i);
        den.push_back(i);
    }
    for (int i = 1; i <= t; ++i) {
        num.push_back(i);
        den.push_back(n - t + i);
    }
    std::size_t i = 0, j = 0;
    double p = 1.0;
    while (i < num.size() || j < den.size()) {
        if (j >= den.size() || (i < num.size() && p <= 1.0))
            p *= num[i++];
        else
            p /= den[j++];
    }
    return p;
}

ConditionalRewardTable::ConditionalRewardTable(int nu, int band, std::vector<std::vector<double>> rows,
                                               double tail_value)
    : nu_(nu), band_(band), rows_(std::move(rows)), tail_(tail_value) {
    if (nu < 1) throw std::invalid_argument("reward table: horizon bound must be >= 1");
    if (band < 1 || band > nu) throw std::invalid_argument("reward table: band out of range");
    if (static_cast<int>(rows_.size()) != nu) throw std::invalid_argument("reward table: row count");
    for (int t = 1; t <= nu; ++t)
        if (static_cast<int>(rows_[t - 1].size()) != std::min(t, band))
            throw std::invalid_argument("reward table: row length");
}

double ConditionalRewardTable::at(int t, int r) const {
    if (t < 1 || t > nu_ || r < 1 || r > t)
        throw std::out_of_range("reward table: (t, r) out of range");
    if (r > band_) return tail_;
    return rows_[t - 1][r - 1];
}

std::span<const double> ConditionalRewardTable::explicit_row(int t) const {
    if (t < 1 || t > nu_) throw std::out_of_range("reward table: t out of range");
    return rows_[t - 1];
}

int ConditionalRewardTable::tail_count(int t) const { return t - std::min(t, band_); }

std::vector<double> ConditionalRewardTable::row(int t) const {
    auto e = explicit_row(t);
    std::vector<double> out(e.begin(), e.end());
    out.resize(t, tail_);
    return out;
}

void ConditionalRewardTable::write_csv(std::ostream& out) const {
    out << "t,r,U\n";
    char buf[64];
    for (int t = 1; t <= nu_; ++t)
        for (int r = 1; r <= t; ++r) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", t, r, at(t, r));
            out << buf;
        }
}

namespace {

int band_for(const RewardSpec& q, int nu) {
    auto k = q.support_bound();
    if (!k) return nu;
    return std::clamp(*k, 1, nu);
}

// One backward step of the rank recursion on stored entries r = 1..width.
// `next` holds row t+1 (width min(t+1, band)); entries past it are `tail`.
void step_down(const std::vector<double>& next, int t, int width, double tail, std::vector<double>& out) {
    out.assign(width, 0.0);
    const double inv = 1.0 / (t + 1);
    for (int r = 1; r <= width; ++r) {
        double up = r < static_cast<int>(next.size()) ? next[r] : tail;
        double w = r * inv;
        out[r - 1] = w * up + (1.0 - w) * next[r - 1];
    }
}

}  // namespace

ConditionalRewardTable reward_table_fixed(const RewardSpec& q, int n) {
    if (n < 1) throw std::invalid_argument("reward_table_fixed: n must be >= 1");
    q.check_bound(n);
    const int band = band_for(q, n);
    std::vector<std::vector<double>> rows(n);
    rows[n - 1].resize(std::min(n, band));
    for (int r = 1; r <= static_cast<int>(rows[n - 1].size()); ++r) rows[n - 1][r - 1] = q.evaluate(r, n);
    for (int t = n - 1; t >= 1; --t) step_down(rows[t], t, std::min(t, band), 0.0, rows[t - 1]);
    if (q.kind() == RewardKind::RankImprovement && q.zero_at_horizon())
        for (int r = 1; r <= n; ++r) rows[n - 1][r - 1] = q.at_horizon(r, n);
    return ConditionalRewardTable(n, band, std::move(rows));
}

void for_each_fixed_row(const RewardSpec& q, int n, const std::function<void(int, const std::vector<double>&)>& visit) {
    if (n < 1) throw std::invalid_argument("for_each_fixed_row: n must be >= 1");
    q.check_bound(n);
    const int band = band_for(q, n);
    std::vector<double> cur(std::min(n, band)), next;
    for (int r = 1; r <= static_cast<int>(cur.size()); ++r) cur[r - 1] = q.at_horizon(r, n);
    visit(n, cur);
    if (q.kind() == RewardKind::RankImprovement && q.zero_at_horizon())
        for (int r = 1; r <= static_cast<int>(cur.size()); ++r) cur[r - 1] = q.evaluate(r, n);
    for (int t = n - 1; t >= 1; --t) {
        step_down(cur, t, std::min(t, band), 0.0, next);
        std::swap(cur, next);
        visit(t, cur);
    }
}

ConditionalRewardTable reward_table_random(const RewardSpec& q, const HorizonSpec& horizon) {
    if (horizon.is_infinite() && !horizon.is_truncated())
        throw std::invalid_argument("reward_table_random: infinite horizon must be truncated first");
    const int nu = horizon.nu();
    q.check_bound(nu);
    const int band = band_for(q, nu);
    std::vector<std::vector<double>> rows(nu);
    // J_t = gamma_t q_t + (recursion applied to J_{t+1}). The zero_at_horizon
    // override is applied to the stored rows only, never to the carried row.
    std::vector<double> cur, prev;
    for (int t = nu; t >= 1; --t) {
        const int width = std::min(t, band);
        if (t == nu)
            cur.assign(width, 0.0);
        else
            step_down(prev, t, width, 0.0, cur);
        const double g = horizon.gamma(t);
        if (g != 0.0)
            for (int r = 1; r <= width; ++r) cur[r - 1] += g * q.evaluate(r, t);
        rows[t - 1] = cur;
        if (g != 0.0 && q.kind() == RewardKind::RankImprovement && q.zero_at_horizon())
            for (int r = 1; r <= width; ++r) rows[t - 1][r - 1] += g * (q.at_horizon(r, t) - q.evaluate(r, t));
        std::swap(prev, cur);
    }
    return ConditionalRewardTable(nu, band, std::move(rows));
}

ConditionalRewardTable reward_table_fixed_direct(const RewardSpec& q, int n) {
    if (n < 1) throw std::invalid_argument("reward_table_fixed_direct: n must be >= 1");
    q.check_bound(n);
    std::vector<std::vector<double>> rows(n);
    for (int t = 1; t <= n; ++t) {
        rows[t - 1].resize(t);
        for (int r = 1; r <= t; ++r) {
            double s = 0.0;
            if (t == n) {
                s = q.at_horizon(r, n);
            } else {
                for (int a = r; a <= n - t + r; ++a) s += q.evaluate(a, n) * hypergeom_transition(a, r, t, n);
            }
            rows[t - 1][r - 1] = s;
        }
    }
    return ConditionalRewardTable(n, n, std::move(rows));
}

ConditionalRewardTable reward_table_random_direct(const RewardSpec& q, const HorizonSpec& horizon) {
    const int nu = horizon.nu();
    q.check_bound(nu);
    std::vector<std::vector<double>> rows(nu);
    for (int t = 1; t <= nu; ++t) {
        rows[t - 1].assign(t, 0.0);
        for (int r = 1; r <= t; ++r) {
            double s = 0.0;
            for (int k = t; k <= nu; ++k) {
                const double g = horizon.gamma(k);
                if (g == 0.0) continue;
                double i_tk = 0.0;
                if (k == t) {
                    i_tk = q.at_horizon(r, k);
                } else {
                    for (int a = r; a <= k - t + r; ++a) i_tk += q.evaluate(a, k) * hypergeom_transition(a, r, t, k);
                }
                s += g * i_tk;
            }
            rows[t - 1][r - 1] = s;
        }
    }
    return ConditionalRewardTable(nu, nu, std::move(rows));
}

}  // namespace seqsel
