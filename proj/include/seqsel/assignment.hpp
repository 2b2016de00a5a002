#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "seqsel/horizon.hpp"
#include "seqsel/stop_engine.hpp"

namespace seqsel {

// Uniform law on the atoms -(n+1) l / (t+1), l = 1..t: the job value of an
// observation with uniformly random relative rank at time t.
class RankGridLaw {
public:
    RankGridLaw(int n, int t);

    double atom(int l) const { return -scale_ * l; }
    double mean() const;
    double cdf(double z) const;
    double clamp_mean(std::optional<double> lo, std::optional<double> hi) const;

private:
    // least l with atom(l) <= z, or t+1 if none
    int first_at_or_below(double z) const;

    int n_;
    int t_;
    double scale_;
};

struct BreakpointOptions {
    // Keep only the top `band` entries of every row; 0 keeps full rows.
    int band = 0;
    // Retain every row instead of only the latest one.
    bool keep_rows = false;
};

// DLR rows a_{j,m} for m = 1..n+1; row m has entries j = 1..m-1, bounded by
// a_{0,m} = -inf and a_{m,m} = +inf.
class BreakpointArray {
public:
    BreakpointArray(int n, int band, std::vector<std::vector<double>> rows, std::vector<double> final_row);

    int n() const { return n_; }
    int band() const { return band_; }
    bool has_rows() const { return !rows_.empty(); }

    // a_{j,m} for 0 <= j <= m; nullopt stands for -inf (j = 0) or +inf (j = m).
    std::optional<double> at(int j, int m) const;
    // a_{j,n+1} for the retained j (all of 1..n when full).
    const std::vector<double>& final_row() const { return final_; }
    // first j stored in final_row()
    int final_first_index() const { return n_ - static_cast<int>(final_.size()) + 1; }

    void write_csv(std::ostream& out) const;

private:
    int n_;
    int band_;
    // rows_[m-1]: top entries of row m, ascending in j
    std::vector<std::vector<double>> rows_;
    std::vector<double> final_;
};

// laws[t-1] is the law of the t-th arriving job.
BreakpointArray dlr_breakpoints(std::span<const SupportDistribution> laws, BreakpointOptions opt = {});
BreakpointArray dlr_breakpoints_rank_grid(int n, BreakpointOptions opt = {});

double assignment_value(std::span<const double> p, const BreakpointArray& bps);

std::vector<SupportDistribution> scale_for_random_horizon(std::span<const SupportDistribution> laws,
                                                          const HorizonSpec& horizon);

enum class MultiChoiceJobs { BestChoice, AverageRank };

class MultiChoicePolicy {
public:
    MultiChoicePolicy(int n, int k, MultiChoiceJobs jobs, BreakpointArray bps);

    int n() const { return n_; }
    int k() const { return k_; }
    MultiChoiceJobs jobs() const { return jobs_; }
    const BreakpointArray& breakpoints() const { return bps_; }

    // Y_t for relative rank r at time t.
    double job_value(int t, int r) const;
    // a_{n-t+1-s, n-t+1}: nullopt is -inf; +inf never occurs for s >= 1.
    std::optional<double> threshold(int t, int remaining) const;
    bool select(int t, double y, int remaining) const;
    bool select_rank(int t, int r, int remaining) const { return select(t, job_value(t, r), remaining); }
    // P(Y_t <= z)
    double cdf(int t, double z) const;

private:
    int n_;
    int k_;
    MultiChoiceJobs jobs_;
    BreakpointArray bps_;
};

struct MultiChoiceSolution {
    double value;
    MultiChoicePolicy policy;
};

MultiChoiceSolution multi_choice_best(int n, int k);
// value is the minimized expected average rank of the k selections
MultiChoiceSolution multi_choice_avg_rank(int n, int k);
std::pair<double, double> multi_choice_times(const MultiChoicePolicy& policy);

}  // namespace seqsel
