#include "seqsel/stop_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace seqsel {

using nlohmann::json;

SupportDistribution::SupportDistribution(std::vector<double> atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    if (atoms_.empty()) throw std::invalid_argument("support: no atoms");
    if (atoms_.size() != probs_.size()) throw std::invalid_argument("support: atoms/probs size mismatch");
    std::vector<std::size_t> order(atoms_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms_[a] < atoms_[b]; });
    std::vector<double> a(atoms_.size()), p(atoms_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        a[i] = atoms_[order[i]];
        p[i] = probs_[order[i]];
        if (!std::isfinite(a[i])) throw std::invalid_argument("support: non-finite atom");
        if (!(p[i] > 0.0)) throw std::invalid_argument("support: probabilities must be > 0");
        if (i > 0 && !(a[i - 1] < a[i])) throw std::invalid_argument("support: atoms must be distinct");
        total += p[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("support: probabilities do not sum to 1");
    atoms_ = std::move(a);
    probs_ = std::move(p);
}

SupportDistribution SupportDistribution::point(double c) { return SupportDistribution({c}, {1.0}); }

double SupportDistribution::mean() const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) s += atoms_[j] * probs_[j];
    return s;
}

double SupportDistribution::cdf(double z) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms_.size() && atoms_[j] <= z; ++j) s += probs_[j];
    return s;
}

double SupportDistribution::expected_max(double b) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) s += std::max(b, atoms_[j]) * probs_[j];
    return s;
}

double SupportDistribution::clamp_mean(std::optional<double> lo, std::optional<double> hi) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        double y = atoms_[j];
        if (lo && y < *lo) y = *lo;
        if (hi && y > *hi) y = *hi;
        s += y * probs_[j];
    }
    return s;
}

std::optional<double> ThresholdPolicy::b(int i) const {
    if (i < 1 || i > nu + 1) throw std::out_of_range("threshold index out of range");
    if (i == 1) return std::nullopt;
    return thresholds[i - 2];
}

double ThresholdPolicy::U(int t, int r) const {
    if (t < 1 || t > nu || r < 1 || r > t) throw std::out_of_range("policy: (t, r) out of range");
    if (table) return table->at(t, r);
    if (reward) return reward(t, r);
    throw std::logic_error("policy has no rank rows");
}

double ThresholdPolicy::cdf(int t, double z) const {
    if (t < 1 || t > nu) throw std::out_of_range("policy: t out of range");
    if (!supports.empty()) return supports[t - 1].cdf(z);
    if (law_cdf) return law_cdf(t, z);
    if (!has_rank_rows()) throw std::logic_error("policy has neither supports nor rank rows");
    int count = 0;
    for (int r = 1; r <= t; ++r)
        if (U(t, r) <= z) ++count;
    return static_cast<double>(count) / t;
}

json ThresholdPolicy::to_json() const {
    json bs = json::array();
    bs.push_back(nullptr);
    for (double v : thresholds) bs.push_back(v);
    return {{"nu", nu}, {"b", bs}, {"value", value}};
}

namespace {

bool close_rel(double a, double b) {
    if (a == b) return true;
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

SupportDistribution group_sorted(std::vector<double> values, int t, bool tolerant) {
    std::sort(values.begin(), values.end());
    std::vector<double> atoms, probs;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        while (j < values.size() && (tolerant ? close_rel(values[i], values[j]) : values[i] == values[j])) ++j;
        atoms.push_back(values[i]);
        probs.push_back(static_cast<double>(j - i) / t);
        i = j;
    }
    return SupportDistribution(std::move(atoms), std::move(probs));
}

}  // namespace

SupportDistribution collapse_support(std::span<const double> row) {
    if (row.empty()) throw std::invalid_argument("collapse_support: empty row");
    return group_sorted(std::vector<double>(row.begin(), row.end()), static_cast<int>(row.size()), true);
}

SupportDistribution collapse_banded(std::span<const double> explicit_entries, int tail_count, double tail_value) {
    const int t = static_cast<int>(explicit_entries.size()) + tail_count;
    if (t == 0) throw std::invalid_argument("collapse_banded: empty row");
    std::vector<double> v(explicit_entries.begin(), explicit_entries.end());
    std::sort(v.begin(), v.end());
    std::vector<double> atoms, probs;
    std::vector<int> counts;
    for (double x : v) {
        if (!atoms.empty() && atoms.back() == x)
            ++counts.back();
        else {
            atoms.push_back(x);
            counts.push_back(1);
        }
    }
    if (tail_count > 0) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), tail_value);
        const auto pos = it - atoms.begin();
        if (it != atoms.end() && *it == tail_value)
            counts[pos] += tail_count;
        else {
            atoms.insert(it, tail_value);
            counts.insert(counts.begin() + pos, tail_count);
        }
    }
    probs.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = static_cast<double>(counts[i]) / t;
    return SupportDistribution(std::move(atoms), std::move(probs));
}

ThresholdPolicy backward_thresholds(std::vector<SupportDistribution> supports) {
    const int nu = static_cast<int>(supports.size());
    if (nu < 1) throw std::invalid_argument("backward_thresholds: need at least one law");
    ThresholdPolicy p;
    p.nu = nu;
    p.thresholds.resize(nu);
    // b_2 = E Y_nu; b_{i+1} = E[b_i v Y_{nu-i+1}].
    double b = supports[nu - 1].mean();
    p.thresholds[0] = b;
    for (int i = 2; i <= nu; ++i) {
        b = supports[nu - i].expected_max(b);
        p.thresholds[i - 1] = b;
    }
    p.value = p.thresholds.back();
    p.supports = std::move(supports);
    return p;
}

ThresholdPolicy stop_general(std::vector<SupportDistribution> laws) { return backward_thresholds(std::move(laws)); }

ThresholdPolicy solve_table(std::shared_ptr<const ConditionalRewardTable> table) {
    if (!table) throw std::invalid_argument("solve_table: null table");
    const int nu = table->horizon_bound();
    std::vector<SupportDistribution> supports;
    supports.reserve(nu);
    for (int t = 1; t <= nu; ++t) {
        if (table->banded())
            supports.push_back(collapse_banded(table->explicit_row(t), table->tail_count(t), table->tail_value()));
        else
            supports.push_back(collapse_support(table->explicit_row(t)));
    }
    ThresholdPolicy p = backward_thresholds(std::move(supports));
    p.table = std::move(table);
    return p;
}

Decision decide(const ThresholdPolicy& policy, int t, int r) {
    if (t < 1 || t > policy.nu || r < 1 || r > t) throw std::out_of_range("decide: (t, r) out of range");
    const auto thr = policy.threshold_at(t);
    if (!thr) return Decision::Stop;
    return exceeds_threshold(policy.U(t, r), *thr) ? Decision::Stop : Decision::Continue;
}

StoppingRegion stopping_region(const ThresholdPolicy& policy, int max_rank) {
    if (!policy.has_rank_rows()) throw std::invalid_argument("stopping_region: policy has no rank rows");
    StoppingRegion reg;
    reg.nu = policy.nu;
    reg.max_rank = max_rank <= 0 ? policy.nu : std::min(max_rank, policy.nu);
    reg.stop.resize(policy.nu);
    reg.islands.assign(reg.max_rank, {});
    for (int t = 1; t <= policy.nu; ++t) {
        const int w = std::min(t, reg.max_rank);
        reg.stop[t - 1].resize(w);
        for (int r = 1; r <= w; ++r) {
            const bool s = decide(policy, t, r) == Decision::Stop;
            reg.stop[t - 1][r - 1] = s;
            auto& isl = reg.islands[r - 1];
            if (s) {
                if (!isl.empty() && isl.back().last == t - 1)
                    isl.back().last = t;
                else
                    isl.push_back({t, t});
            }
        }
    }
    return reg;
}

namespace {

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

void write_region_csv(const ThresholdPolicy& policy, const StoppingRegion& region, std::ostream& out) {
    out << "t,r,threshold,U,stop\n";
    for (int t = 1; t <= region.nu; ++t) {
        const auto thr = policy.threshold_at(t);
        const std::string ts = thr ? fmt_num(*thr) : "-inf";
        for (int r = 1; r <= static_cast<int>(region.stop[t - 1].size()); ++r)
            out << t << ',' << r << ',' << ts << ',' << fmt_num(policy.U(t, r)) << ','
                << (region.stop[t - 1][r - 1] ? 1 : 0) << '\n';
    }
}

json region_json(const ThresholdPolicy& policy, const StoppingRegion& region) {
    json thresholds = json::array(), curves = json::array(), stop = json::array(), islands = json::array();
    for (int t = 1; t <= region.nu; ++t) {
        const auto thr = policy.threshold_at(t);
        thresholds.push_back(thr ? json(*thr) : json(nullptr));
        json c = json::array(), s = json::array();
        for (int r = 1; r <= static_cast<int>(region.stop[t - 1].size()); ++r) {
            c.push_back(policy.U(t, r));
            s.push_back(region.stop[t - 1][r - 1] ? 1 : 0);
        }
        curves.push_back(std::move(c));
        stop.push_back(std::move(s));
    }
    for (int r = 1; r <= region.max_rank; ++r) {
        json iv = json::array();
        for (const auto& i : region.islands[r - 1]) iv.push_back({i.first, i.last});
        islands.push_back({{"rank", r}, {"intervals", iv}});
    }
    return {{"nu", region.nu},       {"max_rank", region.max_rank}, {"value", policy.value},
            {"thresholds", thresholds}, {"curves", curves},          {"stop", stop},
            {"islands", islands}};
}

}  // namespace seqsel
