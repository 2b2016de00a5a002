#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace seqsel::testing {

// Calls fn(abs) for every ordering of n candidates; abs[t-1] is the absolute
// rank (1 = best) of the t-th arrival.
inline void for_each_order(int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> abs(n);
    std::iota(abs.begin(), abs.end(), 1);
    do {
        fn(abs);
    } while (std::next_permutation(abs.begin(), abs.end()));
}

// Relative rank of arrival t among the first t, by direct counting.
inline int relative_rank(const std::vector<int>& abs, int t) {
    int r = 1;
    for (int j = 0; j < t - 1; ++j)
        if (abs[j] < abs[t - 1]) ++r;
    return r;
}

// Relative tolerance with an absolute floor.
inline bool close(double a, double b, double rel, double abs_floor = 1e-300) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

// A random probability vector over 1..nu with every entry positive.
inline std::vector<double> random_gamma(int nu, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> g(nu);
    for (auto& x : g) x = u(gen);
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    for (auto& x : g) x /= s;
    return g;
}

}  // namespace seqsel::testing
