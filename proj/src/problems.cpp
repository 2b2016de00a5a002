#include "seqsel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqsel/metrics.hpp"

namespace seqsel {

using nlohmann::json;

json Solution::to_json(bool with_thresholds) const {
    json j = {{"id", id}, {"value", value}, {"orientation", orientation}, {"engine_value", engine_value}};
    if (policy) {
        j["nu"] = policy->nu;
        if (with_thresholds && !policy->thresholds.empty()) j["b"] = policy->to_json()["b"];
    }
    if (multi) {
        j["n"] = multi->n();
        j["k"] = multi->k();
    }
    j["diagnostics"] = diagnostics;
    return j;
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void attach_stats(Solution& s, const HorizonSpec& horizon) {
    if (!s.policy || s.policy->thresholds.empty()) return;
    const ThresholdPolicy& p = *s.policy;
    const bool fast = !p.supports.empty() || static_cast<bool>(p.law_cdf);
    if (!fast && p.nu > 5000) return;
    if (!fast && !p.has_rank_rows()) return;
    const double e = expected_stop_time(p);
    s.diagnostics["expected_time"] = e;
    s.diagnostics["expected_time_over_nu"] = e / p.nu;
    if (horizon.is_random()) {
        const double ee = expected_effective_stop_time(p, horizon);
        s.diagnostics["expected_effective_time"] = ee;
        s.diagnostics["expected_effective_time_over_nu"] = ee / p.nu;
    }
}

std::string orientation_of(const RewardSpec& q) {
    switch (q.kind()) {
        case RewardKind::BestChoice:
        case RewardKind::OneOfKBest:
        case RewardKind::KthBest: return "probability";
        case RewardKind::NegRank: return "expected_rank";
        case RewardKind::NegSquaredRank: return "expected_squared_rank";
        case RewardKind::NegFactorialMoment: return "expected_factorial_moment";
        case RewardKind::RankImprovement: return "expected_rank_improvement";
        case RewardKind::Custom: return "expected_reward";
    }
    return "expected_reward";
}

bool minimized(const RewardSpec& q) {
    return q.kind() == RewardKind::NegRank || q.kind() == RewardKind::NegSquaredRank ||
           q.kind() == RewardKind::NegFactorialMoment;
}

Solution from_policy(std::string id, ThresholdPolicy policy, const std::string& orientation, bool negate,
                     const HorizonSpec& horizon) {
    Solution s;
    s.id = std::move(id);
    s.engine_value = policy.value;
    s.value = negate ? -policy.value : policy.value;
    s.orientation = orientation;
    s.policy = std::move(policy);
    attach_stats(s, horizon);
    return s;
}

// Least j in [1, m+1] with y(j) <= z for y decreasing in j.
template <class Y>
int first_at_or_below(int m, double z, Y&& y) {
    int lo = 1, hi = m + 1;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (y(mid) <= z)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double two_point_cdf(int t, double top, double z) {
    if (top == 0.0) return z < 0.0 ? 0.0 : 1.0;
    if (z < 0.0) return 0.0;
    if (z < top) return t == 1 ? 0.0 : 1.0 - 1.0 / t;
    return 1.0;
}

}  // namespace

Solution classical_secretary(int n, SolveOptions opt) {
    require(n >= 1, "classical_secretary: n must be >= 1");
    ThresholdPolicy p;
    p.nu = n;
    if (!opt.value_only) p.thresholds.reserve(n);
    double b = 1.0 / n;
    if (!opt.value_only) p.thresholds.push_back(b);
    for (int t = 2; t <= n; ++t) {
        const int m = n - t + 1;
        if (b < static_cast<double>(m) / n) b += 1.0 / n - b / m;
        if (!opt.value_only) p.thresholds.push_back(b);
    }
    p.value = b;
    if (!opt.value_only) {
        p.reward = [n](int t, int r) { return r == 1 ? static_cast<double>(t) / n : 0.0; };
        p.law_cdf = [n](int t, double z) { return two_point_cdf(t, static_cast<double>(t) / n, z); };
    }
    return from_policy("classical", std::move(p), "probability", false, HorizonSpec::fixed(n));
}

Solution gusein_zade(int n, int k) {
    require(n >= 1, "gusein_zade: n must be >= 1");
    require(k >= 1 && k <= n, "gusein_zade: require 1 <= k <= n");
    if (k == 1) {
        Solution s = classical_secretary(n);
        s.id = "gusein_zade";
        return s;
    }
    auto table = std::make_shared<const ConditionalRewardTable>(reward_table_fixed(RewardSpec::one_of_k_best(k), n));
    return from_policy("gusein_zade", solve_table(table), "probability", false, HorizonSpec::fixed(n));
}

namespace {

// Backward pass over streamed rows: threshold, stay probability and the next b per row.
Solution stream_fixed(std::string id, const RewardSpec& q, int n) {
    std::vector<double> stay(n + 1, 0.0);
    std::optional<double> b;
    for_each_fixed_row(q, n, [&](int t, const std::vector<double>& row) {
        const int w = static_cast<int>(row.size());
        const int tail = t - w;
        double sum = 0.0;
        int below = 0;
        if (!b) {
            for (double u : row) sum += u;
        } else {
            for (double u : row) {
                sum += std::max(*b, u);
                if (!exceeds_threshold(u, *b)) ++below;
            }
            sum += tail * std::max(*b, 0.0);
            if (!exceeds_threshold(0.0, *b)) below += tail;
        }
        stay[t] = static_cast<double>(below) / t;
        b = sum / t;
    });
    double e = 0.0, survive = 1.0;
    for (int t = 1; t <= n; ++t) {
        e += survive;
        survive *= stay[t];
    }
    Solution s;
    s.id = std::move(id);
    s.value = *b;
    s.engine_value = *b;
    s.orientation = orientation_of(q);
    s.diagnostics["expected_time"] = e;
    s.diagnostics["expected_time_over_nu"] = e / n;
    return s;
}

}  // namespace

Solution postdoc(int n, int k, SolveOptions opt) {
    require(n >= 1, "postdoc: n must be >= 1");
    require(k >= 1 && k <= n, "postdoc: require 1 <= k <= n");
    if (opt.value_only) return stream_fixed("postdoc", RewardSpec::kth_best(k), n);
    auto table = std::make_shared<const ConditionalRewardTable>(reward_table_fixed(RewardSpec::kth_best(k), n));
    return from_policy("postdoc", solve_table(table), "probability", false, HorizonSpec::fixed(n));
}

Solution chow_expected_rank(int n, SolveOptions opt) {
    require(n >= 1, "chow_expected_rank: n must be >= 1");
    ThresholdPolicy p;
    p.nu = n;
    const double np1 = n + 1.0;
    double b = -np1 / 2.0;
    if (!opt.value_only) {
        p.thresholds.reserve(n);
        p.thresholds.push_back(b);
    }
    for (int t = 2; t <= n; ++t) {
        const int m = n - t + 1;
        // atoms -(n+1) j/(m+1), j = 1..m; count those strictly above b
        auto y = [&](int j) { return -np1 * j / (m + 1); };
        long long j = static_cast<long long>(std::floor(-b * (m + 1) / np1));
        j = std::clamp<long long>(j, 0, m);
        while (j < m && y(static_cast<int>(j + 1)) > b) ++j;
        while (j > 0 && y(static_cast<int>(j)) <= b) --j;
        const double jd = static_cast<double>(j);
        b = b - (np1 / (m + 1) * jd * (jd + 1.0) / 2.0 + jd * b) / m;
        if (!opt.value_only) p.thresholds.push_back(b);
    }
    p.value = b;
    if (!opt.value_only) {
        p.reward = [n](int t, int r) { return RankGridLaw(n, t).atom(r); };
        p.law_cdf = [n](int t, double z) { return RankGridLaw(n, t).cdf(z); };
    }
    return from_policy("chow", std::move(p), "expected_rank", true, HorizonSpec::fixed(n));
}

Solution squared_rank(int n, SolveOptions opt) {
    require(n >= 1, "squared_rank: n must be >= 1");
    ThresholdPolicy p;
    p.nu = n;
    const double np1 = n + 1.0, np2 = n + 2.0;
    double b = -np1 * (2.0 * n + 1.0) / 6.0;
    if (!opt.value_only) {
        p.thresholds.reserve(n);
        p.thresholds.push_back(b);
    }
    for (int t = 2; t <= n; ++t) {
        const int m = n - t + 1;
        const double den = (m + 1.0) * (m + 2.0);
        const double C = np1 * np2 / den;
        const double D = (t - 1.0) * np1 / den;
        // atoms -C j^2 - D j, j = 1..m; count those strictly above b
        auto y = [&](long long j) { return -C * j * j - D * j; };
        const double disc = D * D - 4.0 * C * b;
        long long j = static_cast<long long>(std::floor((-D + std::sqrt(std::max(0.0, disc))) / (2.0 * C)));
        j = std::clamp<long long>(j, 0, m);
        while (j < m && y(j + 1) > b) ++j;
        while (j > 0 && y(j) <= b) --j;
        const double jd = static_cast<double>(j);
        b = (-jd * (jd + 1.0) * (2.0 * jd + 1.0) * C / 6.0 - jd * (jd + 1.0) * D / 2.0 + (m - jd) * b) / m;
        if (!opt.value_only) p.thresholds.push_back(b);
    }
    p.value = b;
    if (!opt.value_only) {
        auto row = [n](int t, double r) {
            const double np1 = n + 1.0, np2 = n + 2.0;
            return -np1 * np2 / ((t + 1.0) * (t + 2.0)) * r * (r + (n - t) / np2);
        };
        p.reward = [row](int t, int r) { return row(t, r); };
        p.law_cdf = [row](int t, double z) {
            const int j = first_at_or_below(t, z, [&](int r) { return row(t, r); });
            return static_cast<double>(t - j + 1) / t;
        };
    }
    return from_policy("squared_rank", std::move(p), "expected_squared_rank", true, HorizonSpec::fixed(n));
}

Solution csp_random(const HorizonSpec& horizon) {
    const int nu = horizon.nu();
    // y_t = t * sum_{k >= t} gamma_k / k
    auto y = std::make_shared<std::vector<double>>(nu + 1, 0.0);
    double acc = 0.0;
    for (int t = nu; t >= 1; --t) {
        acc += horizon.gamma(t) / t;
        (*y)[t] = t * acc;
    }
    ThresholdPolicy p;
    p.nu = nu;
    p.thresholds.reserve(nu);
    double b = (*y)[nu] / nu;
    p.thresholds.push_back(b);
    for (int i = 2; i <= nu; ++i) {
        const int m = nu - i + 1;
        if ((*y)[m] > b) b += ((*y)[m] - b) / m;
        p.thresholds.push_back(b);
    }
    p.value = b;
    p.reward = [y](int t, int r) { return r == 1 ? (*y)[t] : 0.0; };
    p.law_cdf = [y](int t, double z) { return two_point_cdf(t, (*y)[t], z); };
    return from_policy("csp_random", std::move(p), "probability", false, horizon);
}

Solution gusein_random(const HorizonSpec& horizon, int k) {
    require(k >= 1, "gusein_random: k must be >= 1");
    auto table = std::make_shared<const ConditionalRewardTable>(reward_table_random(RewardSpec::one_of_k_best(k), horizon));
    return from_policy("gusein_random", solve_table(table), "probability", false, horizon);
}

Solution pettitt_expected_rank(const HorizonSpec& horizon, bool zero_at_horizon) {
    const int nu = horizon.nu();
    const double mean = horizon.mean();
    require(std::isfinite(mean), "pettitt_expected_rank: E N must be finite");
    // rows U_t(r) = (1/2 - r/(t+1)) W_t with W_t = sum_{k >= t} (k+1) gamma_k,
    // or sum_{k > t} under zero_at_horizon
    auto w = std::make_shared<std::vector<double>>(nu + 2, 0.0);
    {
        double acc = 0.0;
        for (int t = nu; t >= 1; --t) {
            const double before = acc;
            acc += (t + 1.0) * horizon.gamma(t);
            (*w)[t] = zero_at_horizon ? before : acc;
        }
    }
    auto row = [w](int t, int r) { return (0.5 - static_cast<double>(r) / (t + 1)) * (*w)[t]; };
    ThresholdPolicy p;
    p.nu = nu;
    p.thresholds.reserve(nu);
    double b = 0.0;  // E Y_nu: the row is symmetric about 0
    p.thresholds.push_back(b);
    for (int i = 2; i <= nu; ++i) {
        const int m = nu - i + 1;
        const double wm = (*w)[m];
        int j = 0;
        if (wm > 0.0) {
            const double guess = std::ceil((m + 1) * (0.5 - b / wm)) - 1.0;
            j = guess < 0.0 ? 0 : (guess > m ? m : static_cast<int>(guess));
            while (j < m && row(m, j + 1) > b) ++j;
            while (j > 0 && row(m, j) <= b) --j;
        }
        const double jd = j;
        const double top = wm * (jd / 2.0 - jd * (jd + 1.0) / (2.0 * (m + 1)));
        b = b + (top - jd * b) / m;
        p.thresholds.push_back(b);
    }
    p.value = b;
    p.reward = row;
    p.law_cdf = [row](int t, double z) {
        const int j = first_at_or_below(t, z, [&](int r) { return row(t, r); });
        return static_cast<double>(t - j + 1) / t;
    };
    Solution s = from_policy("pettitt", std::move(p), "expected_rank", false, horizon);
    s.value = 0.5 * (1.0 + mean) - s.engine_value;
    s.diagnostics["expected_horizon"] = mean;
    s.diagnostics["zero_at_horizon"] = zero_at_horizon;
    return s;
}

Solution moser_random(const HorizonSpec& horizon, const std::string& observation_law) {
    if (observation_law != "uniform")
        throw std::invalid_argument("closed form implemented for uniform only; use stop_general with caller discretization");
    const int nu = horizon.nu();
    const auto sigma = horizon.tail_sums();
    ThresholdPolicy p;
    p.nu = nu;
    p.thresholds.reserve(nu);
    double b = 0.0;
    p.thresholds.push_back(b);
    for (int i = 2; i <= nu; ++i) {
        const double s = sigma[nu - i];
        if (s > 0.0 && b < s / 2.0) b = (b + s / 2.0) * (b + s / 2.0) / (2.0 * s);
        p.thresholds.push_back(b);
    }
    p.value = b;
    auto sig = std::make_shared<std::vector<double>>(sigma);
    p.law_cdf = [sig](int t, double z) {
        const double s = (*sig)[t - 1];
        if (s <= 0.0) return z < 0.0 ? 0.0 : 1.0;
        return std::clamp(0.5 + z / s, 0.0, 1.0);
    };
    Solution s = from_policy("moser", std::move(p), "expected_value", false, horizon);
    s.value = s.engine_value + 0.5;
    return s;
}

Solution bruss_odds(const std::vector<double>& p) {
    const int n = static_cast<int>(p.size());
    require(n >= 1, "bruss_odds: need at least one trial");
    for (int t = 1; t <= n; ++t) {
        const double pt = p[t - 1];
        require(std::isfinite(pt) && pt > 0.0 && pt <= 1.0, "bruss_odds: success probabilities must lie in (0, 1]");
        if (t >= 2 && pt == 1.0) throw std::invalid_argument("odds undefined");
    }
    auto q = [&](int t) { return 1.0 - p[t - 1]; };
    // tail[t] = prod_{k > t} q_k
    std::vector<double> tail(n + 2, 1.0);
    for (int t = n - 1; t >= 0; --t) tail[t] = tail[t + 1] * q(t + 1);

    double b = p[n - 1];
    std::vector<double> thr;
    thr.reserve(n);
    thr.push_back(b);
    for (int i = 2; i <= n; ++i) {
        const int m = n - i + 1;
        const double gain = tail[m] - b;
        if (gain > 0.0) b += p[m - 1] * gain;
        thr.push_back(b);
    }

    int t_star = 1;
    double odds = 0.0;
    for (int k = n; k >= 1; --k) {
        if (k == 1 && q(1) == 0.0) {
            t_star = 1;
            break;
        }
        odds += p[k - 1] / q(k);
        if (odds >= 1.0) {
            t_star = k;
            break;
        }
    }
    double later_odds = 0.0;
    for (int k = t_star + 1; k <= n; ++k) later_odds += p[k - 1] / q(k);
    const double closed = tail[t_star] * (p[t_star - 1] + q(t_star) * later_odds);

    std::vector<SupportDistribution> laws;
    laws.reserve(n);
    for (int t = 1; t <= n; ++t) {
        const double y = tail[t];
        if (p[t - 1] == 1.0 || y == 0.0)
            laws.push_back(SupportDistribution::point(p[t - 1] == 1.0 ? y : 0.0));
        else
            laws.push_back(SupportDistribution({0.0, y}, {q(t), p[t - 1]}));
    }
    ThresholdPolicy policy = stop_general(std::move(laws));
    policy.thresholds = thr;
    policy.value = b;
    Solution s = from_policy("bruss", std::move(policy), "probability", false, HorizonSpec::fixed(n));
    s.diagnostics["t_star"] = t_star;
    s.diagnostics["recursion_value"] = b;
    s.diagnostics["closed_form_value"] = closed;
    return s;
}

Solution multi_best(int n, int k) {
    MultiChoiceSolution m = multi_choice_best(n, k);
    Solution s;
    s.id = "multi_best";
    s.value = m.value;
    s.engine_value = m.value;
    s.orientation = "probability";
    if (k == 2) {
        auto [e1, e2] = multi_choice_times(m.policy);
        s.diagnostics["expected_tau1"] = e1;
        s.diagnostics["expected_tau2"] = e2;
    }
    s.multi = std::move(m.policy);
    return s;
}

Solution multi_avg_rank(int n, int k) {
    MultiChoiceSolution m = multi_choice_avg_rank(n, k);
    Solution s;
    s.id = "multi_avg_rank";
    s.value = m.value;
    s.engine_value = -m.value * k;
    s.orientation = "expected_average_rank";
    if (k == 2) {
        auto [e1, e2] = multi_choice_times(m.policy);
        s.diagnostics["expected_tau1"] = e1;
        s.diagnostics["expected_tau2"] = e2;
    }
    s.multi = std::move(m.policy);
    return s;
}

Solution solve_rank_problem(const RewardSpec& q, const HorizonSpec& horizon) {
    std::shared_ptr<const ConditionalRewardTable> table;
    if (horizon.is_fixed())
        table = std::make_shared<const ConditionalRewardTable>(reward_table_fixed(q, horizon.n()));
    else
        table = std::make_shared<const ConditionalRewardTable>(reward_table_random(q, horizon));
    return from_policy("rank", solve_table(table), orientation_of(q), minimized(q), horizon);
}

RewardSpec reward_from_json(const json& j) {
    require(j.is_object() && j.contains("type") && j.at("type").is_string(), "reward: object with \"type\" required");
    const std::string type = j.at("type").get<std::string>();
    auto k = [&] {
        require(j.contains("k") && j.at("k").is_number_integer(), "reward: integer \"k\" required");
        return j.at("k").get<int>();
    };
    if (type == "best_choice") return RewardSpec::best_choice();
    if (type == "one_of_k_best") return RewardSpec::one_of_k_best(k());
    if (type == "kth_best") return RewardSpec::kth_best(k());
    if (type == "neg_rank") return RewardSpec::neg_rank();
    if (type == "neg_squared_rank") return RewardSpec::neg_squared_rank();
    if (type == "neg_factorial_moment") return RewardSpec::neg_factorial_moment(k());
    if (type == "rank_improvement") return RewardSpec::rank_improvement(j.value("zero_at_horizon", false));
    if (type == "custom") {
        require(j.contains("values") && j.at("values").is_array(), "reward: custom needs a \"values\" array");
        return RewardSpec::custom(j.at("values").get<std::vector<double>>());
    }
    throw std::invalid_argument("reward: unknown type \"" + type + "\"");
}

json reward_to_json(const RewardSpec& q) {
    switch (q.kind()) {
        case RewardKind::BestChoice: return {{"type", "best_choice"}};
        case RewardKind::OneOfKBest: return {{"type", "one_of_k_best"}, {"k", q.k()}};
        case RewardKind::KthBest: return {{"type", "kth_best"}, {"k", q.k()}};
        case RewardKind::NegRank: return {{"type", "neg_rank"}};
        case RewardKind::NegSquaredRank: return {{"type", "neg_squared_rank"}};
        case RewardKind::NegFactorialMoment: return {{"type", "neg_factorial_moment"}, {"k", q.k()}};
        case RewardKind::RankImprovement: return {{"type", "rank_improvement"}, {"zero_at_horizon", q.zero_at_horizon()}};
        case RewardKind::Custom: return {{"type", "custom"}, {"values", q.values()}};
    }
    return json::object();
}

namespace {

const std::vector<std::string>& known_ids() {
    static const std::vector<std::string> ids = {"classical", "gusein_zade", "postdoc",    "chow",
                                                 "squared_rank", "csp_random", "gusein_random", "pettitt",
                                                 "multi_best", "multi_avg_rank", "moser",   "bruss",
                                                 "rank"};
    return ids;
}

bool needs_horizon(const std::string& id) {
    return id == "csp_random" || id == "gusein_random" || id == "pettitt" || id == "moser" || id == "rank";
}

int param_int(const json& params, const char* key) {
    require(params.contains(key) && params.at(key).is_number_integer(),
            std::string("problem: integer parameter \"") + key + "\" required");
    return params.at(key).get<int>();
}

}  // namespace

ProblemInstance ProblemInstance::from_json(const json& j) {
    require(j.is_object(), "problem: JSON object required");
    require(j.contains("id") && j.at("id").is_string(), "problem: string \"id\" required");
    ProblemInstance p;
    p.id = j.at("id").get<std::string>();
    const auto& ids = known_ids();
    require(std::find(ids.begin(), ids.end(), p.id) != ids.end(), "problem: unknown id \"" + p.id + "\"");
    if (j.contains("params")) {
        require(j.at("params").is_object(), "problem: \"params\" must be an object");
        p.params = j.at("params");
    } else {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "id" && it.key() != "horizon") p.params[it.key()] = it.value();
    }
    if (j.contains("horizon")) p.horizon = HorizonSpec::from_json(j.at("horizon"));
    if (needs_horizon(p.id)) require(p.horizon.has_value(), "problem: \"" + p.id + "\" requires a horizon");
    // validate parameter presence eagerly
    if (p.id == "classical" || p.id == "chow" || p.id == "squared_rank") require(param_int(p.params, "n") >= 1, "problem: n must be >= 1");
    if (p.id == "gusein_zade" || p.id == "postdoc" || p.id == "multi_best" || p.id == "multi_avg_rank") {
        const int n = param_int(p.params, "n"), k = param_int(p.params, "k");
        require(n >= 1 && k >= 1 && k <= n, "problem: require 1 <= k <= n");
    }
    if (p.id == "gusein_random") require(param_int(p.params, "k") >= 1, "problem: k must be >= 1");
    if (p.id == "bruss")
        require(p.params.contains("p") && p.params.at("p").is_array() && !p.params.at("p").empty(),
                "problem: bruss needs a non-empty \"p\" array");
    if (p.id == "rank") reward_from_json(p.params.value("reward", json()));
    return p;
}

json ProblemInstance::to_json() const {
    json j = {{"id", id}, {"params", params}};
    if (horizon) j["horizon"] = horizon->to_json();
    return j;
}

std::optional<RewardSpec> ProblemInstance::reward() const {
    if (id == "classical" || id == "csp_random") return RewardSpec::best_choice();
    if (id == "gusein_zade" || id == "gusein_random") return RewardSpec::one_of_k_best(param_int(params, "k"));
    if (id == "postdoc") return RewardSpec::kth_best(param_int(params, "k"));
    if (id == "chow") return RewardSpec::neg_rank();
    if (id == "squared_rank") return RewardSpec::neg_squared_rank();
    if (id == "pettitt") return RewardSpec::rank_improvement(params.value("zero_at_horizon", false));
    if (id == "rank") return reward_from_json(params.at("reward"));
    return std::nullopt;
}

bool ProblemInstance::is_rank_problem() const { return reward().has_value(); }

HorizonSpec ProblemInstance::resolved_horizon() const {
    if (!needs_horizon(id)) {
        if (id == "bruss") return HorizonSpec::fixed(static_cast<int>(params.at("p").size()));
        return HorizonSpec::fixed(param_int(params, "n"));
    }
    const HorizonSpec& h = *horizon;
    if (!h.is_infinite()) return h;
    // moser uses the survival tail only; truncate against the indicator bound
    const RewardSpec q = reward().value_or(RewardSpec::best_choice());
    return h.truncated_to(truncate(h, q, *h.epsilon()));
}

int ProblemInstance::horizon_bound() const { return resolved_horizon().nu(); }

Solution solve(const ProblemInstance& problem, SolveOptions opt) {
    const auto& id = problem.id;
    const auto& ps = problem.params;
    if (id == "classical") return classical_secretary(param_int(ps, "n"), opt);
    if (id == "gusein_zade") return gusein_zade(param_int(ps, "n"), param_int(ps, "k"));
    if (id == "postdoc") return postdoc(param_int(ps, "n"), param_int(ps, "k"), opt);
    if (id == "chow") return chow_expected_rank(param_int(ps, "n"), opt);
    if (id == "squared_rank") return squared_rank(param_int(ps, "n"), opt);
    if (id == "multi_best") return multi_best(param_int(ps, "n"), param_int(ps, "k"));
    if (id == "multi_avg_rank") return multi_avg_rank(param_int(ps, "n"), param_int(ps, "k"));
    if (id == "bruss") return bruss_odds(ps.at("p").get<std::vector<double>>());
    const HorizonSpec h = problem.resolved_horizon();
    if (id == "csp_random") return csp_random(h);
    if (id == "gusein_random") return gusein_random(h, param_int(ps, "k"));
    if (id == "pettitt") return pettitt_expected_rank(h, ps.value("zero_at_horizon", false));
    if (id == "moser") return moser_random(h, ps.value("observation_law", std::string("uniform")));
    if (id == "rank") return solve_rank_problem(*problem.reward(), h);
    throw std::invalid_argument("problem: unknown id \"" + id + "\"");
}

int default_region_rank(const ProblemInstance& problem, int nu) {
    const auto q = problem.reward();
    const int cap = q && q->support_bound() ? *q->support_bound() : 20;
    return std::max(1, std::min(cap, nu));
}

const std::vector<ProblemDescriptor>& catalog() {
    static const std::vector<ProblemDescriptor> items = [] {
        const json n_param = {{"type", "integer"}, {"minimum", 1}};
        const json k_param = {{"type", "integer"}, {"minimum", 1}};
        const json horizon_param = {{"type", "horizon"},
                                    {"variants", {"fixed", "uniform", "pettitt", "zib_mixture", "u_shaped", "geometric", "explicit"}}};
        return std::vector<ProblemDescriptor>{
            {"classical", "P1", "select the best of n", {{"n", n_param}}},
            {"gusein_zade", "P2", "select one of the k best of n", {{"n", n_param}, {"k", k_param}}},
            {"postdoc", "P3", "select exactly the k-th best of n", {{"n", n_param}, {"k", k_param}}},
            {"chow", "P4", "minimize the expected rank", {{"n", n_param}}},
            {"squared_rank", "P5", "minimize the expected squared rank", {{"n", n_param}}},
            {"csp_random", "P6", "select the best under a random horizon", {{"horizon", horizon_param}}},
            {"gusein_random", "P7", "select one of the k best under a random horizon",
             {{"k", k_param}, {"horizon", horizon_param}}},
            {"pettitt", "P8", "minimize the rank of the selection relative to the last observation",
             {{"horizon", horizon_param}, {"zero_at_horizon", {{"type", "boolean"}, {"default", false}}}}},
            {"multi_best", "P9", "k selections, maximize the probability the best is among them",
             {{"n", n_param}, {"k", k_param}}},
            {"multi_avg_rank", "P10", "k selections, minimize their expected average rank",
             {{"n", n_param}, {"k", k_param}}},
            {"moser", "P11", "maximize the expected uniform observation under a random horizon",
             {{"horizon", horizon_param}}},
            {"bruss", "P12", "stop on the last success of independent trials",
             {{"p", {{"type", "array"}, {"items", {{"type", "number"}, {"exclusiveMinimum", 0}, {"maximum", 1}}}}}}},
            {"rank", "generic", "any rank reward on any horizon",
             {{"reward", {{"type", "reward"},
                          {"variants", {"best_choice", "one_of_k_best", "kth_best", "neg_rank", "neg_squared_rank",
                                        "neg_factorial_moment", "rank_improvement", "custom"}}}},
              {"horizon", horizon_param}}},
        };
    }();
    return items;
}

json catalog_json() {
    json arr = json::array();
    for (const auto& d : catalog())
        arr.push_back({{"id", d.id}, {"tag", d.tag}, {"description", d.description}, {"params", d.params}});
    return arr;
}

}  // namespace seqsel
