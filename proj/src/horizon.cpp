#include "seqsel/horizon.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "seqsel/rank_core.hpp"

namespace seqsel {

using nlohmann::json;

HorizonSpec HorizonSpec::fixed(int n) {
    if (n < 1) throw std::invalid_argument("fixed horizon: n must be >= 1");
    HorizonSpec h;
    h.kind_ = Kind::Fixed;
    h.n_ = n;
    h.descriptor_ = {{"type", "fixed"}, {"n", n}};
    return h;
}

HorizonSpec HorizonSpec::random(std::vector<double> gamma, bool renormalize) {
    if (gamma.empty()) throw std::invalid_argument("random horizon: empty gamma");
    double sum = 0.0;
    for (double g : gamma) {
        if (!std::isfinite(g) || g < 0.0) throw std::invalid_argument("random horizon: gamma entries must be >= 0");
        sum += g;
    }
    if (renormalize) {
        if (sum <= 0.0) throw std::invalid_argument("random horizon: gamma has zero mass");
        for (double& g : gamma) g /= sum;
    } else if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("random horizon: gamma sums to " + std::to_string(sum) + ", not 1");
    }
    HorizonSpec h;
    h.kind_ = Kind::Finite;
    h.n_ = static_cast<int>(gamma.size());
    h.gamma_ = std::move(gamma);
    h.descriptor_ = {{"type", "explicit"}};
    return h;
}

HorizonSpec HorizonSpec::infinite(Generator pmf, std::optional<double> mean, double epsilon, json descriptor) {
    if (!pmf) throw std::invalid_argument("infinite horizon: generator required");
    if (!(epsilon > 0.0)) throw std::invalid_argument("infinite horizon: epsilon must be > 0");
    HorizonSpec h;
    h.kind_ = Kind::Infinite;
    h.pmf_ = std::move(pmf);
    h.mean_ = mean;
    h.epsilon_ = epsilon;
    h.descriptor_ = std::move(descriptor);
    return h;
}

int HorizonSpec::n() const {
    if (!is_fixed()) throw std::logic_error("horizon is not fixed");
    return n_;
}

int HorizonSpec::nu() const {
    if (kind_ == Kind::Infinite && !truncated_)
        throw std::invalid_argument("infinite horizon has no finite bound; truncate first");
    return n_;
}

double HorizonSpec::gamma(int k) const {
    if (k < 1) return 0.0;
    if (kind_ == Kind::Fixed) return k == n_ ? 1.0 : 0.0;
    if (k <= static_cast<int>(gamma_.size())) return gamma_[k - 1];
    if (kind_ == Kind::Infinite && !truncated_) return pmf_(k);
    return 0.0;
}

std::vector<double> HorizonSpec::tail_sums() const {
    const int m = nu();
    std::vector<double> s(m);
    double acc = 0.0;
    for (int t = m; t >= 1; --t) {
        acc += gamma(t);
        s[t - 1] = acc;
    }
    return s;
}

double HorizonSpec::mean() const {
    if (kind_ == Kind::Fixed) return n_;
    if (kind_ == Kind::Infinite) {
        if (!mean_) throw std::invalid_argument("horizon mean unavailable for this generator");
        return *mean_;
    }
    double m = 0.0;
    for (int k = static_cast<int>(gamma_.size()); k >= 1; --k) m += k * gamma_[k - 1];
    return m;
}

HorizonSpec HorizonSpec::truncated_to(int m) const {
    if (kind_ != Kind::Infinite) throw std::logic_error("truncated_to: horizon is not infinite");
    if (m < 1) throw std::invalid_argument("truncated_to: bound must be >= 1");
    HorizonSpec h = *this;
    h.gamma_.resize(m);
    for (int k = 1; k <= m; ++k) h.gamma_[k - 1] = pmf_(k);
    h.n_ = m;
    h.truncated_ = true;
    return h;
}

namespace {

std::string exact_decimal(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_gamma_entry(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        std::size_t pos = 0;
        double x = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("gamma entry is not a decimal: " + s);
        return x;
    }
    throw std::invalid_argument("gamma entries must be numbers or decimal strings");
}

}  // namespace

json HorizonSpec::to_json() const {
    if (kind_ == Kind::Finite && descriptor_.value("type", "") == "explicit") {
        json arr = json::array();
        for (double g : gamma_) arr.push_back(exact_decimal(g));
        return {{"type", "explicit"}, {"gamma", arr}};
    }
    return descriptor_;
}

HorizonSpec HorizonSpec::from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw std::invalid_argument("horizon: object with \"type\" required");
    const std::string type = j.at("type").get<std::string>();
    auto need_int = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_number_integer())
            throw std::invalid_argument(std::string("horizon: integer \"") + key + "\" required");
        return j.at(key).get<int>();
    };
    auto need_num = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_number())
            throw std::invalid_argument(std::string("horizon: number \"") + key + "\" required");
        return j.at(key).get<double>();
    };
    if (type == "fixed") return fixed(need_int("n"));
    if (type == "uniform") return uniform_horizon(need_int("N_max"));
    if (type == "pettitt") return pettitt_horizon(need_num("alpha"), need_int("N_max"));
    if (type == "zib_mixture") return zib_mixture_horizon();
    if (type == "u_shaped") return u_shaped_horizon();
    if (type == "geometric") return geometric_horizon(need_num("p"), j.contains("epsilon") ? need_num("epsilon") : 1e-9);
    if (type == "explicit") {
        if (!j.contains("gamma") || !j.at("gamma").is_array())
            throw std::invalid_argument("horizon: explicit type needs a \"gamma\" array");
        std::vector<double> g;
        for (const auto& v : j.at("gamma")) g.push_back(parse_gamma_entry(v));
        return random(std::move(g), j.value("renormalize", false));
    }
    throw std::invalid_argument("horizon: unknown type \"" + type + "\"");
}

HorizonSpec HorizonSpec::family(std::vector<double> gamma, json descriptor) {
    HorizonSpec h = random(std::move(gamma));
    h.descriptor_ = std::move(descriptor);
    return h;
}

HorizonSpec uniform_horizon(int n_max) {
    if (n_max < 1) throw std::invalid_argument("uniform horizon: N_max must be >= 1");
    return HorizonSpec::family(std::vector<double>(n_max, 1.0 / n_max), {{"type", "uniform"}, {"N_max", n_max}});
}

HorizonSpec pettitt_horizon(double alpha, int n_max) {
    if (!(alpha > 0.0)) throw std::invalid_argument("pettitt horizon: alpha must be > 0");
    if (n_max < 1) throw std::invalid_argument("pettitt horizon: N_max must be >= 1");
    std::vector<double> g(n_max);
    double survive = 1.0, acc = 0.0;
    for (int k = 1; k < n_max; ++k) {
        const double hazard = std::pow(static_cast<double>(n_max - k + 1), -alpha);
        g[k - 1] = hazard * survive;
        acc += g[k - 1];
        survive *= 1.0 - hazard;
    }
    g[n_max - 1] = 1.0 - acc;
    return HorizonSpec::family(std::move(g), {{"type", "pettitt"}, {"alpha", alpha}, {"N_max", n_max}});
}

namespace {

double binomial_pmf(int n, int k, double p) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace

HorizonSpec zib_mixture_horizon() {
    const int n_max = 100;
    const double z1 = 1.0 - std::pow(0.8, 50);
    const double z2 = 1.0 - std::pow(0.2, 100);
    std::vector<double> g(n_max, 0.0);
    for (int k = 1; k <= n_max; ++k) {
        double v = 0.5 * binomial_pmf(100, k, 0.8) / z2;
        if (k <= 50) v += 0.5 * binomial_pmf(50, k, 0.2) / z1;
        g[k - 1] = v;
    }
    return HorizonSpec::family(std::move(g), {{"type", "zib_mixture"}});
}

HorizonSpec u_shaped_horizon() {
    std::vector<double> g(100);
    for (int k = 1; k <= 100; ++k) g[k - 1] = (k <= 20 || k >= 81) ? 0.0249985 : 0.000001;
    return HorizonSpec::family(std::move(g), {{"type", "u_shaped"}});
}

HorizonSpec geometric_horizon(double p, double epsilon) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric horizon: p must lie in (0, 1]");
    auto pmf = [p](int k) { return k < 1 ? 0.0 : p * std::pow(1.0 - p, k - 1); };
    return HorizonSpec::infinite(pmf, 1.0 / p, epsilon, {{"type", "geometric"}, {"p", p}, {"epsilon", epsilon}});
}

int truncate(const HorizonSpec& horizon, const RewardSpec& q, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("truncate: epsilon must be > 0");
    if (!horizon.is_infinite()) return horizon.nu();
    // Bound sup_r |I_{t,k}(r)| by c_k and find the least m with sum_{k>m} c_k gamma_k <= eps.
    double weight_scale = 1.0;  // c_k = scale * w(k)
    bool linear = false;
    switch (q.kind()) {
        case RewardKind::BestChoice:
        case RewardKind::OneOfKBest:
        case RewardKind::KthBest: break;
        case RewardKind::RankImprovement:
            linear = true;
            weight_scale = 0.5;
            break;
        case RewardKind::NegRank: linear = true; break;
        default: throw std::invalid_argument("tail bound unavailable");
    }
    const auto& pmf = horizon.generator();
    double total = 1.0;
    if (linear) {
        double mean = 0.0;
        try {
            mean = horizon.mean();
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("tail bound requires a finite horizon mean");
        }
        if (!std::isfinite(mean)) throw std::invalid_argument("tail bound requires a finite horizon mean");
        total = mean + 1.0;
    }
    const double target = epsilon / weight_scale;
    double head = 0.0, comp = 0.0;
    const int limit = 100000000;
    for (int m = 1; m < limit; ++m) {
        const double w = linear ? (m + 1.0) * pmf(m) : pmf(m);
        const double y = w - comp;  // compensated running sum of the head
        const double t = head + y;
        comp = (t - head) - y;
        head = t;
        if (total - head <= target) return m;
    }
    throw std::runtime_error("truncate: tail condition not reached");
}

}  // namespace seqsel
