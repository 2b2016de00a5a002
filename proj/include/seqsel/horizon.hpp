#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace seqsel {

class RewardSpec;

// Fixed length n, a law gamma over {1..N_max}, or an infinite-support law given
// by a generator that must be truncated before solving.
class HorizonSpec {
public:
    using Generator = std::function<double(int)>;

    static HorizonSpec fixed(int n);
    static HorizonSpec random(std::vector<double> gamma, bool renormalize = false);
    // A finite law tagged with its family descriptor for serialization.
    static HorizonSpec family(std::vector<double> gamma, nlohmann::json descriptor);
    static HorizonSpec infinite(Generator pmf, std::optional<double> mean, double epsilon,
                                nlohmann::json descriptor);

    bool is_fixed() const { return kind_ == Kind::Fixed; }
    bool is_random() const { return kind_ != Kind::Fixed; }
    bool is_infinite() const { return kind_ == Kind::Infinite; }
    bool is_truncated() const { return truncated_; }

    int n() const;
    // Effective horizon bound nu.
    int nu() const;
    // gamma_k for k >= 1; a fixed horizon is the point mass at n.
    double gamma(int k) const;
    const std::vector<double>& gammas() const { return gamma_; }
    // sigma_t = sum_{k >= t} gamma_k for t = 1..nu (index t-1).
    std::vector<double> tail_sums() const;
    double mean() const;
    std::optional<double> epsilon() const { return epsilon_; }
    const Generator& generator() const { return pmf_; }

    // Keeps gamma_1..gamma_m of an infinite law; the tail mass is dropped.
    HorizonSpec truncated_to(int m) const;

    nlohmann::json to_json() const;
    static HorizonSpec from_json(const nlohmann::json& j);

private:
    enum class Kind { Fixed, Finite, Infinite };
    HorizonSpec() = default;

    Kind kind_ = Kind::Fixed;
    int n_ = 1;
    std::vector<double> gamma_;
    Generator pmf_;
    std::optional<double> mean_;
    std::optional<double> epsilon_;
    bool truncated_ = false;
    nlohmann::json descriptor_;
};

HorizonSpec uniform_horizon(int n_max);
HorizonSpec pettitt_horizon(double alpha, int n_max);
HorizonSpec zib_mixture_horizon();
HorizonSpec u_shaped_horizon();
// gamma_k = p (1-p)^{k-1}, k >= 1.
HorizonSpec geometric_horizon(double p, double epsilon);

int truncate(const HorizonSpec& horizon, const RewardSpec& q, double epsilon);

}  // namespace seqsel
