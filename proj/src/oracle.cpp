#include "seqsel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "seqsel/rng.hpp"

namespace seqsel {

namespace {

// Ranks of one ordering: x[i] is the quality of the (i+1)-th arrival, larger is better.
struct Ranks {
    std::vector<int> relative;  // among the first t
    std::vector<int> absolute;  // among the first k
};

Ranks ranks_of(const std::vector<int>& x, int k) {
    Ranks out;
    out.relative.resize(k);
    out.absolute.resize(k);
    for (int t = 0; t < k; ++t) {
        int rel = 1, abs = 1;
        for (int j = 0; j < k; ++j) {
            if (j == t) continue;
            if (x[j] > x[t]) {
                ++abs;
                if (j < t) ++rel;
            }
        }
        out.relative[t] = rel;
        out.absolute[t] = abs;
    }
    return out;
}

// Reward for stopping at time t (1-based) with absolute rank a on a horizon of
// length k whose last relative rank is last_rel.
double payoff(const RewardSpec& q, int t, int a, int k, int last_rel) {
    if (t == k) return q.at_horizon(a, k);
    if (q.kind() == RewardKind::RankImprovement) return static_cast<double>(last_rel - a);
    return q.evaluate(a, k);
}

long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

struct Node {
    long double weight = 0.0L;
    long double stop_sum = 0.0L;
    std::vector<int> child;  // indexed by r-1 of the next step
};

class HistoryTrie {
public:
    explicit HistoryTrie(int depth) : depth_(depth) { nodes_.emplace_back(); }

    // walk the relative-rank path, returning node ids for t = 1..len
    void visit(const std::vector<int>& rel, int len, const std::function<void(int t, Node&)>& fn) {
        int id = 0;
        for (int t = 1; t <= len; ++t) {
            if (nodes_[id].child.empty()) nodes_[id].child.assign(t, -1);
            int& slot = nodes_[id].child[rel[t - 1] - 1];
            if (slot < 0) {
                slot = static_cast<int>(nodes_.size());
                nodes_.emplace_back();
            }
            id = slot;
            fn(t, nodes_[id]);
        }
    }

    long double best(int id = 0, int t = 0) const {
        const Node& nd = nodes_[id];
        long double cont = 0.0L;
        for (int c : nd.child)
            if (c >= 0) cont += best(c, t + 1);
        if (t == 0) return cont;
        if (t == depth_ || nd.child.empty()) return nd.stop_sum;
        return std::max(nd.stop_sum, cont);
    }

private:
    int depth_;
    std::vector<Node> nodes_;
};

}  // namespace

double exact_policy_value(const DecisionFn& decide, const RewardSpec& q, int n) {
    if (n < 1 || n > 10) throw std::invalid_argument("exact_policy_value: n must lie in 1..10");
    q.check_bound(n);
    std::vector<int> x(n);
    std::iota(x.begin(), x.end(), 1);
    long double total = 0.0L;
    do {
        const Ranks rk = ranks_of(x, n);
        for (int t = 1; t <= n; ++t) {
            if (decide(t, rk.relative[t - 1])) {
                total += payoff(q, t, rk.absolute[t - 1], n, rk.relative[n - 1]);
                break;
            }
        }
    } while (std::next_permutation(x.begin(), x.end()));
    return static_cast<double>(total / factorial(n));
}

double exact_optimal_value(const RewardSpec& q, int n) {
    if (n < 1 || n > 7) throw std::invalid_argument("exact_optimal_value: n must lie in 1..7");
    q.check_bound(n);
    HistoryTrie trie(n);
    std::vector<int> x(n);
    std::iota(x.begin(), x.end(), 1);
    const long double w = 1.0L / factorial(n);
    do {
        const Ranks rk = ranks_of(x, n);
        trie.visit(rk.relative, n, [&](int t, Node& nd) {
            nd.weight += w;
            nd.stop_sum += w * payoff(q, t, rk.absolute[t - 1], n, rk.relative[n - 1]);
        });
    } while (std::next_permutation(x.begin(), x.end()));
    return static_cast<double>(trie.best());
}

double exact_optimal_value_random(const RewardSpec& q, std::span<const double> gamma) {
    const int nu = static_cast<int>(gamma.size());
    if (nu < 1 || nu > 6) throw std::invalid_argument("exact_optimal_value_random: nu must lie in 1..6");
    q.check_bound(nu);
    HistoryTrie trie(nu);
    std::vector<int> x(nu);
    std::iota(x.begin(), x.end(), 1);
    const long double perms = factorial(nu);
    do {
        for (int k = 1; k <= nu; ++k) {
            if (gamma[k - 1] == 0.0) continue;
            const long double w = gamma[k - 1] / perms;
            const Ranks rk = ranks_of(x, k);
            trie.visit(rk.relative, k, [&](int t, Node& nd) {
                nd.weight += w;
                nd.stop_sum += w * payoff(q, t, rk.absolute[t - 1], k, rk.relative[k - 1]);
            });
        }
    } while (std::next_permutation(x.begin(), x.end()));
    return static_cast<double>(trie.best());
}

nlohmann::json SimulationReport::to_json() const {
    nlohmann::json j = {{"trials", trials}, {"seed", seed}, {"mean", mean}, {"stop_time_mean", stop_time_mean},
                        {"generator", kGeneratorName}};
    j["std_error"] = std_error ? nlohmann::json(*std_error) : nlohmann::json(nullptr);
    j["std_error_defined"] = std_error.has_value();
    return j;
}

namespace {

struct Moments {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double time_sum = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const long long n = count + o.count;
        const double d = o.mean - mean;
        mean += d * o.count / n;
        m2 += o.m2 + d * d * (static_cast<double>(count) * o.count / n);
        time_sum += o.time_sum;
        count = n;
    }
};

constexpr long long kBlock = 4096;

}  // namespace

SimulationReport simulate(const DecisionFn& decide, const RewardSpec& q, const HorizonSpec& horizon, long long trials,
                          std::uint64_t seed, int threads) {
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    const int nu = horizon.nu();
    q.check_bound(nu);
    std::vector<double> cum(nu);
    {
        double acc = 0.0;
        for (int k = 1; k <= nu; ++k) cum[k - 1] = (acc += horizon.gamma(k));
    }
    auto run_trial = [&](long long i, std::vector<double>& x, std::vector<double>& seen, double& time) {
        Xoshiro256 g = Xoshiro256::for_trial(seed, static_cast<std::uint64_t>(i));
        int n = nu;
        if (horizon.is_random()) {
            const double u = g.uniform() * cum.back();
            n = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()) + 1;
            n = std::min(n, nu);
        }
        x.resize(n);
        for (double& v : x) v = g.uniform();
        seen.clear();
        for (int t = 1; t <= n; ++t) {
            const double v = x[t - 1];
            auto lo = std::lower_bound(seen.begin(), seen.end(), v);
            const int r = static_cast<int>(seen.end() - lo) + 1;
            seen.insert(lo, v);
            if (decide(t, r)) {
                time = t;
                int a = r;
                for (int j = t; j < n; ++j)
                    if (x[j] >= v) ++a;
                int last = 1;
                for (int j = 0; j < n - 1; ++j)
                    if (x[j] >= x[n - 1]) ++last;
                return payoff(q, t, a, n, last);
            }
        }
        time = n;
        return 0.0;
    };

    const long long blocks = (trials + kBlock - 1) / kBlock;
    std::vector<Moments> block_stats(blocks);
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<long long>(workers, blocks));
    auto work = [&](int w) {
        std::vector<double> x, seen;
        x.reserve(nu);
        seen.reserve(nu);
        for (long long b = w; b < blocks; b += workers) {
            Moments m;
            const long long end = std::min(trials, (b + 1) * kBlock);
            for (long long i = b * kBlock; i < end; ++i) {
                double time = 0.0;
                m.add(run_trial(i, x, seen, time));
                m.time_sum += time;
            }
            block_stats[b] = m;
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    Moments all;
    for (const auto& m : block_stats) all.merge(m);

    SimulationReport rep;
    rep.trials = trials;
    rep.seed = seed;
    rep.mean = all.mean;
    rep.stop_time_mean = all.time_sum / trials;
    if (trials > 1) rep.std_error = std::sqrt(all.m2 / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    return rep;
}

}  // namespace seqsel
