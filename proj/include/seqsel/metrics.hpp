#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "seqsel/horizon.hpp"
#include "seqsel/stop_engine.hpp"

namespace seqsel {

struct StopTimeStats {
    // pmf[t-1] = P(tau = t)
    std::vector<double> pmf;
    double expected_time = 0.0;
    std::optional<double> expected_effective_time;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

std::vector<double> stop_time_pmf(const ThresholdPolicy& policy);
double expected_stop_time(const ThresholdPolicy& policy);
double expected_effective_stop_time(const ThresholdPolicy& policy, const HorizonSpec& horizon);
StopTimeStats stop_time_stats(const ThresholdPolicy& policy, const HorizonSpec& horizon);

}  // namespace seqsel
