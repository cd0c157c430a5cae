#pragma once

#include <string>
#include <vector>

#include "optimist/errors.hpp"

namespace optimist {

// True arm outcome distributions used by the calibration harness.
// Bernoulli(mean) or Gaussian(mean, sd) per arm.
struct ArmModel {
    enum class Kind { Bernoulli, Gaussian };

    Kind kind = Kind::Bernoulli;
    std::vector<double> means;
    std::vector<double> sds;  // Gaussian only

    int K() const { return static_cast<int>(means.size()); }

    static ArmModel bernoulli(std::vector<double> means) {
        ArmModel m;
        m.kind = Kind::Bernoulli;
        m.means = std::move(means);
        m.validate();
        return m;
    }

    static ArmModel gaussian(std::vector<double> means, std::vector<double> sds) {
        ArmModel m;
        m.kind = Kind::Gaussian;
        m.means = std::move(means);
        m.sds = std::move(sds);
        m.validate();
        return m;
    }

    void validate() const {
        if (means.empty()) throw config_error("arm model: needs at least one arm");
        if (kind == Kind::Bernoulli) {
            for (double p : means)
                if (!(p >= 0.0 && p <= 1.0))
                    throw config_error("arm model: bernoulli mean " + std::to_string(p) +
                                       " outside [0,1]");
        } else {
            if (sds.size() != means.size())
                throw config_error("arm model: gaussian needs one sd per arm");
            for (double s : sds)
                if (!(s >= 0.0))
                    throw config_error("arm model: gaussian sd must be >= 0");
        }
    }
};

// Inference target: a single arm's mean, or the difference mu_a - mu_a'.
// For the difference target, `arm` is the statistic arm (its sample mean is
// the test statistic) and must be fixed at configuration time, never chosen
// by looking at the data.
struct TargetSpec {
    enum class Kind { ArmMean, DiffMeans };

    Kind kind = Kind::ArmMean;
    int arm = 1;
    int other_arm = 2;  // DiffMeans only

    static TargetSpec arm_mean(int a) { return {Kind::ArmMean, a, 0}; }
    static TargetSpec diff_means(int a, int a_prime) { return {Kind::DiffMeans, a, a_prime}; }

    // The arm whose sample mean is the test statistic rho(H_T).
    int statistic_arm() const { return arm; }

    void validate(int K) const {
        if (arm < 1 || arm > K)
            throw config_error("target: arm " + std::to_string(arm) + " outside [1, " +
                               std::to_string(K) + "]");
        if (kind == Kind::DiffMeans) {
            if (other_arm < 1 || other_arm > K)
                throw config_error("target: arm " + std::to_string(other_arm) + " outside [1, " +
                                   std::to_string(K) + "]");
            if (other_arm == arm) throw config_error("target: diff arms must be distinct");
        }
    }

    std::string describe() const {
        if (kind == Kind::ArmMean) return "mean(arm " + std::to_string(arm) + ")";
        return "mean(arm " + std::to_string(arm) + ") - mean(arm " + std::to_string(other_arm) +
               ")";
    }

    bool operator==(const TargetSpec&) const = default;
};

// A point null hypothesis theta = theta0 for the given target.
struct NullSpec {
    TargetSpec target;
    double theta0 = 0.0;
};

// True target value under an ArmModel (synthetic mode; used for coverage
// and MSE accounting in the harness).
inline double true_target_value(const ArmModel& model, const TargetSpec& target) {
    target.validate(model.K());
    if (target.kind == TargetSpec::Kind::ArmMean) return model.means[target.arm - 1];
    return model.means[target.arm - 1] - model.means[target.other_arm - 1];
}

}  // namespace optimist
