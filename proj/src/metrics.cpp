#include "seqsel/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace seqsel {

namespace {

// F_t(b_{nu-t+1}) for t = 1..nu (index t-1); the last entry is 0.
std::vector<double> continue_probs(const ThresholdPolicy& policy) {
    std::vector<double> c(policy.nu);
    for (int t = 1; t <= policy.nu; ++t) {
        const auto thr = policy.threshold_at(t);
        c[t - 1] = thr ? policy.cdf(t, tie_ceiling(*thr)) : 0.0;
    }
    return c;
}

}  // namespace

std::vector<double> stop_time_pmf(const ThresholdPolicy& policy) {
    const auto c = continue_probs(policy);
    std::vector<double> pmf(policy.nu);
    double survive = 1.0;
    for (int t = 1; t <= policy.nu; ++t) {
        pmf[t - 1] = (1.0 - c[t - 1]) * survive;
        survive *= c[t - 1];
    }
    return pmf;
}

double expected_stop_time(const ThresholdPolicy& policy) {
    const auto c = continue_probs(policy);
    double e = 1.0, prod = 1.0;
    for (int i = 1; i <= policy.nu - 1; ++i) {
        prod *= c[i - 1];
        e += prod;
    }
    return e;
}

double expected_effective_stop_time(const ThresholdPolicy& policy, const HorizonSpec& horizon) {
    if (horizon.is_fixed()) throw std::invalid_argument("expected_effective_stop_time: horizon is fixed, use expected_stop_time");
    if (horizon.nu() != policy.nu) throw std::invalid_argument("expected_effective_stop_time: horizon bound mismatch");
    // E(tau ^ N) = sum_t P(tau >= t) P(N >= t)
    const auto c = continue_probs(policy);
    const auto sigma = horizon.tail_sums();
    double e = 0.0, reach = 1.0;
    for (int t = 1; t <= policy.nu; ++t) {
        e += reach * sigma[t - 1];
        reach *= c[t - 1];
    }
    return e;
}

StopTimeStats stop_time_stats(const ThresholdPolicy& policy, const HorizonSpec& horizon) {
    StopTimeStats s;
    s.pmf = stop_time_pmf(policy);
    s.expected_time = expected_stop_time(policy);
    if (horizon.is_random()) s.expected_effective_time = expected_effective_stop_time(policy, horizon);
    return s;
}

void StopTimeStats::write_csv(std::ostream& out) const {
    out << "t,pmf\n";
    char buf[40];
    for (std::size_t t = 0; t < pmf.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", pmf[t]);
        out << t + 1 << ',' << buf << '\n';
    }
}

nlohmann::json StopTimeStats::to_json() const {
    nlohmann::json j = {{"expected_time", expected_time}, {"nu", pmf.size()}};
    j["expected_effective_time"] = expected_effective_time ? nlohmann::json(*expected_effective_time) : nlohmann::json(nullptr);
    return j;
}

}  // namespace seqsel
