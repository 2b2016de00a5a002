#include "seqsel/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace seqsel {

RankGridLaw::RankGridLaw(int n, int t) : n_(n), t_(t), scale_(static_cast<double>(n + 1) / (t + 1)) {
    if (t < 1 || t > n) throw std::invalid_argument("rank grid law: require 1 <= t <= n");
}

double RankGridLaw::mean() const { return -scale_ * (t_ + 1) / 2.0; }

int RankGridLaw::first_at_or_below(double z) const {
    double guess = std::ceil(-z / scale_);
    int l = guess < 1.0 ? 1 : (guess > t_ + 1.0 ? t_ + 1 : static_cast<int>(guess));
    while (l > 1 && atom(l - 1) <= z) --l;
    while (l <= t_ && atom(l) > z) ++l;
    return l;
}

double RankGridLaw::cdf(double z) const { return static_cast<double>(t_ - first_at_or_below(z) + 1) / t_; }

double RankGridLaw::clamp_mean(std::optional<double> lo, std::optional<double> hi) const {
    // atoms decrease in l: l >= l_lo sit at or below lo, l < l_hi sit above hi
    const int l_lo = lo ? first_at_or_below(*lo) : t_ + 1;
    const int l_hi = hi ? first_at_or_below(*hi) : 1;
    double s = 0.0;
    if (lo) s += *lo * (t_ - l_lo + 1);
    if (hi) s += *hi * (l_hi - 1);
    if (l_lo > l_hi) {
        const double count = l_lo - l_hi;
        s -= scale_ * (static_cast<double>(l_hi) + (l_lo - 1)) * count / 2.0;
    }
    return s / t_;
}

BreakpointArray::BreakpointArray(int n, int band, std::vector<std::vector<double>> rows, std::vector<double> final_row)
    : n_(n), band_(band), rows_(std::move(rows)), final_(std::move(final_row)) {}

std::optional<double> BreakpointArray::at(int j, int m) const {
    if (m < 1 || m > n_ + 1 || j < 0 || j > m) throw std::out_of_range("breakpoint index out of range");
    if (j == 0 || j == m) return std::nullopt;
    const std::vector<double>* row = nullptr;
    if (m == n_ + 1)
        row = &final_;
    else if (!rows_.empty())
        row = &rows_[m - 1];
    else
        throw std::logic_error("breakpoint row not retained");
    const int first = m - static_cast<int>(row->size());
    if (j < first) throw std::out_of_range("breakpoint outside retained band");
    return (*row)[j - first];
}

void BreakpointArray::write_csv(std::ostream& out) const {
    out << "m,j,a\n";
    char buf[48];
    auto emit = [&](int m, const std::vector<double>& row) {
        const int first = m - static_cast<int>(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << m << ',' << first + static_cast<int>(i) << ',' << buf << '\n';
        }
    };
    for (std::size_t m = 1; m <= rows_.size(); ++m) emit(static_cast<int>(m), rows_[m - 1]);
    if (rows_.empty()) emit(n_ + 1, final_);
}

namespace {

template <class LawAt>
BreakpointArray run_dlr(int n, LawAt&& law_at, BreakpointOptions opt) {
    if (n < 1) throw std::invalid_argument("dlr_breakpoints: need at least one job");
    if (opt.band < 0) throw std::invalid_argument("dlr_breakpoints: band must be >= 0");
    std::vector<std::vector<double>> rows;
    if (opt.keep_rows) rows.reserve(n + 1), rows.emplace_back();
    std::vector<double> prev, cur;  // prev holds row m, entries from prev_first
    int prev_first = 1;
    for (int m = 1; m <= n; ++m) {
        // row m+1 from row m and the job seen when m jobs remain after it
        const auto& law = law_at(n - m + 1);
        const int w = opt.band > 0 ? std::min(opt.band, m) : m;
        const int first = m - w + 1;
        cur.resize(w);
        for (int idx = 0; idx < w; ++idx) {
            const int j = first + idx;
            std::optional<double> lo, hi;
            if (j - 1 >= 1) lo = prev[j - 1 - prev_first];
            if (j < m) hi = prev[j - prev_first];
            cur[idx] = law.clamp_mean(lo, hi);
        }
        std::swap(prev, cur);
        prev_first = first;
        if (opt.keep_rows && m < n) rows.push_back(prev);
    }
    return BreakpointArray(n, opt.band, std::move(rows), std::move(prev));
}

}  // namespace

BreakpointArray dlr_breakpoints(std::span<const SupportDistribution> laws, BreakpointOptions opt) {
    const int n = static_cast<int>(laws.size());
    return run_dlr(n, [&](int t) -> const SupportDistribution& { return laws[t - 1]; }, opt);
}

BreakpointArray dlr_breakpoints_rank_grid(int n, BreakpointOptions opt) {
    return run_dlr(n, [n](int t) { return RankGridLaw(n, t); }, opt);
}

double assignment_value(std::span<const double> p, const BreakpointArray& bps) {
    if (static_cast<int>(p.size()) != bps.n()) throw std::invalid_argument("assignment_value: |p| must equal n");
    if (!std::is_sorted(p.begin(), p.end())) throw std::invalid_argument("assignment_value: p must be sorted non-decreasing");
    const auto& row = bps.final_row();
    const int first = bps.final_first_index();
    double s = 0.0;
    for (int j = 1; j <= bps.n(); ++j) {
        if (p[j - 1] == 0.0) continue;
        if (j < first) throw std::invalid_argument("assignment_value: breakpoints banded below a nonzero p");
        s += p[j - 1] * row[j - first];
    }
    return s;
}

std::vector<SupportDistribution> scale_for_random_horizon(std::span<const SupportDistribution> laws,
                                                          const HorizonSpec& horizon) {
    if (!horizon.is_random()) throw std::invalid_argument("scale_for_random_horizon: horizon must be random");
    const auto sigma = horizon.tail_sums();
    if (sigma.size() != laws.size()) throw std::invalid_argument("scale_for_random_horizon: one law per time up to nu");
    std::vector<SupportDistribution> out;
    out.reserve(laws.size());
    for (std::size_t t = 0; t < laws.size(); ++t) {
        if (sigma[t] <= 0.0) throw std::invalid_argument("scale_for_random_horizon: zero tail mass");
        std::vector<double> atoms = laws[t].atoms();
        for (double& y : atoms) {
            if (y == 0.0) throw std::invalid_argument("scale_for_random_horizon: law has an atom at 0 (termination marker)");
            y *= sigma[t];
        }
        out.emplace_back(std::move(atoms), laws[t].probs());
    }
    return out;
}

namespace {

SupportDistribution best_job_law(int n, int t) {
    const double top = static_cast<double>(t) / n;
    if (t == 1) return SupportDistribution::point(top);
    return SupportDistribution({0.0, top}, {1.0 - 1.0 / t, 1.0 / t});
}

}  // namespace

MultiChoicePolicy::MultiChoicePolicy(int n, int k, MultiChoiceJobs jobs, BreakpointArray bps)
    : n_(n), k_(k), jobs_(jobs), bps_(std::move(bps)) {}

double MultiChoicePolicy::job_value(int t, int r) const {
    if (t < 1 || t > n_ || r < 1 || r > t) throw std::out_of_range("multi-choice: (t, r) out of range");
    if (jobs_ == MultiChoiceJobs::BestChoice) return r == 1 ? static_cast<double>(t) / n_ : 0.0;
    return RankGridLaw(n_, t).atom(r);
}

std::optional<double> MultiChoicePolicy::threshold(int t, int remaining) const {
    if (t < 1 || t > n_) throw std::out_of_range("multi-choice: t out of range");
    if (remaining < 1 || remaining > k_) throw std::out_of_range("multi-choice: remaining selections out of range");
    const int m = n_ - t + 1;
    const int j = m - remaining;
    if (j <= 0) return std::nullopt;
    return bps_.at(j, m);
}

bool MultiChoicePolicy::select(int t, double y, int remaining) const {
    if (remaining <= 0) return false;
    const auto thr = threshold(t, remaining);
    return !thr || exceeds_threshold(y, *thr);
}

double MultiChoicePolicy::cdf(int t, double z) const {
    if (jobs_ == MultiChoiceJobs::BestChoice) return best_job_law(n_, t).cdf(z);
    return RankGridLaw(n_, t).cdf(z);
}

MultiChoiceSolution multi_choice_best(int n, int k) {
    if (n < 1) throw std::invalid_argument("multi_choice_best: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("multi_choice_best: require 1 <= k <= n");
    std::vector<SupportDistribution> laws;
    laws.reserve(n);
    for (int t = 1; t <= n; ++t) laws.push_back(best_job_law(n, t));
    BreakpointArray bps = dlr_breakpoints(laws, {k, true});
    double v = 0.0;
    for (double a : bps.final_row()) v += a;
    return {v, MultiChoicePolicy(n, k, MultiChoiceJobs::BestChoice, std::move(bps))};
}

MultiChoiceSolution multi_choice_avg_rank(int n, int k) {
    if (n < 1) throw std::invalid_argument("multi_choice_avg_rank: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("multi_choice_avg_rank: require 1 <= k <= n");
    BreakpointArray bps = dlr_breakpoints_rank_grid(n, {k, true});
    double s = 0.0;
    for (double a : bps.final_row()) s += a;
    return {-s / k, MultiChoicePolicy(n, k, MultiChoiceJobs::AverageRank, std::move(bps))};
}

std::pair<double, double> multi_choice_times(const MultiChoicePolicy& policy) {
    if (policy.k() != 2) throw std::invalid_argument("implemented for k=2 only");
    const int n = policy.n();
    auto stay = [&](int t, int remaining) {
        const auto thr = policy.threshold(t, remaining);
        return thr ? policy.cdf(t, tie_ceiling(*thr)) : 0.0;
    };
    std::vector<double> c1(n + 1), c2(n + 1);
    for (int t = 1; t <= n; ++t) {
        c1[t] = stay(t, 2);
        c2[t] = stay(t, 1);
    }
    double e1 = 1.0, prod = 1.0;
    std::vector<double> first_pick(n + 1, 0.0);  // P(tau1 = j)
    for (int j = 1; j <= n; ++j) {
        first_pick[j] = prod * (1.0 - c1[j]);
        prod *= c1[j];
        if (j <= n - 1) e1 += prod;
    }
    // h[j] = sum_{i=1}^{n-j-1} prod_{t=j+1}^{j+i} c2[t]
    std::vector<double> h(n + 1, 0.0);
    for (int j = n - 2; j >= 1; --j) h[j] = c2[j + 1] * (1.0 + h[j + 1]);
    double gap = 1.0;
    for (int j = 1; j <= n - 1; ++j) gap += first_pick[j] * h[j];
    return {e1, e1 + gap};
}

}  // namespace seqsel
