#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optimist/errors.hpp"
#include "optimist/model.hpp"
#include "optimist/trajectory.hpp"

namespace optimist {

// Positive bias added to each non-target arm's estimated mean before
// resimulation. The named kinds:
//   bias1: log log N / sqrt(N)   (default; just above the LIL rate)
//   bias2: log N / sqrt(N)
//   bias3: 1                     (constant)
//   plugin: 0                    (no optimism; baseline only, known to
//                                 inflate type I error)
// bias1/bias2 fall back to 1 for N <= 3, where log log N is nonpositive
// or undefined. A custom positive function of N may be supplied.
struct BiasSpec {
    enum class Kind { Bias1, Bias2, Bias3, PlugIn, Custom };

    Kind kind = Kind::Bias1;
    std::function<double(std::int64_t)> custom;

    static BiasSpec bias1() { return {Kind::Bias1, nullptr}; }
    static BiasSpec bias2() { return {Kind::Bias2, nullptr}; }
    static BiasSpec bias3() { return {Kind::Bias3, nullptr}; }
    static BiasSpec plugin() { return {Kind::PlugIn, nullptr}; }
    static BiasSpec custom_fn(std::function<double(std::int64_t)> f) {
        return {Kind::Custom, std::move(f)};
    }

    double epsilon(std::int64_t pulls) const {
        const double n = static_cast<double>(pulls);
        switch (kind) {
            case Kind::Bias1:
                if (pulls <= 3) return 1.0;
                return std::log(std::log(n)) / std::sqrt(n);
            case Kind::Bias2:
                if (pulls <= 3) return 1.0;
                return std::log(n) / std::sqrt(n);
            case Kind::Bias3: return 1.0;
            case Kind::PlugIn: return 0.0;
            case Kind::Custom: return custom(pulls);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::Bias1: return "bias1";
            case Kind::Bias2: return "bias2";
            case Kind::Bias3: return "bias3";
            case Kind::PlugIn: return "plugin";
            case Kind::Custom: return "custom";
        }
        return "?";
    }

    static BiasSpec from_string(const std::string& s) {
        if (s == "bias1") return bias1();
        if (s == "bias2") return bias2();
        if (s == "bias3") return bias3();
        if (s == "plugin") return plugin();
        throw config_error("bias: unknown kind \"" + s + "\" (expected bias1|bias2|bias3|plugin)");
    }
};

// Everything the trajectory simulator needs besides the null value:
// optimistically biased means for the non-target arms, plug-in variances
// for all arms, and the raw means for reference. The statistic arm's mean
// is excluded by construction (it is replaced by theta0 when simulating).
struct NuisanceVector {
    TargetSpec target;
    std::vector<std::optional<double>> biased_mean;  // per arm; nullopt for the statistic arm
    std::vector<double> raw_mean;
    std::vector<double> varhat;
    BiasSpec bias;

    int K() const { return static_cast<int>(varhat.size()); }

    bool has_biased_mean(int arm) const {
        return biased_mean[static_cast<std::size_t>(arm - 1)].has_value();
    }
    double biased(int arm) const {
        const auto& v = biased_mean[static_cast<std::size_t>(arm - 1)];
        if (!v)
            throw config_error("nuisance vector: no biased mean for arm " + std::to_string(arm));
        return *v;
    }
    double variance(int arm) const { return varhat[static_cast<std::size_t>(arm - 1)]; }

    void validate() const {
        target.validate(K());
        const int stat_arm = target.statistic_arm();
        for (int a = 1; a <= K(); ++a) {
            if (a == stat_arm) continue;
            if (!has_biased_mean(a))
                throw config_error("nuisance vector: missing biased mean for arm " +
                                   std::to_string(a));
        }
        for (double v : varhat)
            if (!(v >= 0.0)) throw config_error("nuisance vector: negative variance");
    }
};

// Estimate the nuisance vector from observed data: biased_mean(a) =
// raw_mean(a) + eps_a for every arm other than the statistic arm, plus the
// divide-by-N variance of every arm. Every arm must have been pulled at
// least once (the statistic arm contributes its variance).
inline NuisanceVector estimate_nuisances(const Trajectory& h, const TargetSpec& target,
                                         const BiasSpec& bias) {
    target.validate(h.K);
    const ArmStats stats = compute_arm_stats(h);
    const int stat_arm = target.statistic_arm();

    NuisanceVector nv;
    nv.target = target;
    nv.bias = bias;
    nv.biased_mean.assign(h.K, std::nullopt);
    nv.raw_mean.assign(h.K, 0.0);
    nv.varhat.assign(h.K, 0.0);

    for (int a = 1; a <= h.K; ++a) {
        if (!stats.defined(a)) {
            throw insufficient_data_error("arm " + std::to_string(a) +
                                          " has zero pulls; cannot estimate nuisances");
        }
        nv.raw_mean[a - 1] = stats.mean(a);
        nv.varhat[a - 1] = stats.varhat(a);
        if (a != stat_arm) {
            const double eps = bias.epsilon(stats.pulls(a));
            if (bias.kind != BiasSpec::Kind::PlugIn && !(eps > 0.0))
                throw config_error("bias function produced nonpositive epsilon " +
                                   std::to_string(eps) + " for arm " + std::to_string(a));
            nv.biased_mean[a - 1] = stats.mean(a) + eps;
        }
    }
    return nv;
}

// Numerical check of the bias-rate condition: the ratio
// sqrt(log log N / N) / eps(N) must vanish as N grows, i.e. eps must
// dominate the law-of-iterated-logarithm fluctuation scale. We sample a
// log-spaced grid over [n_lo, n_hi] and test that the ratio decreases
// monotonically; a bias that decays too fast (e.g. 1/N) fails. The
// terminal ratio is reported so slowly-vanishing choices can be judged.
struct BiasRateReport {
    bool pass = false;
    bool monotone_decreasing = false;
    double first_ratio = 0.0;
    double last_ratio = 0.0;
    std::vector<std::int64_t> n_grid;
    std::vector<double> ratios;
};

inline BiasRateReport validate_bias_rate(const std::function<double(std::int64_t)>& bias_fn,
                                         std::int64_t n_lo = 1000,
                                         std::int64_t n_hi = 10000000,
                                         int grid_points = 25) {
    if (n_lo < 10 || n_hi <= n_lo) throw config_error("validate_bias_rate: bad N range");
    BiasRateReport rep;
    const double log_lo = std::log(static_cast<double>(n_lo));
    const double log_hi = std::log(static_cast<double>(n_hi));
    for (int i = 0; i < grid_points; ++i) {
        const double f = grid_points == 1 ? 0.0
                                          : static_cast<double>(i) /
                                                static_cast<double>(grid_points - 1);
        const auto n = static_cast<std::int64_t>(std::llround(std::exp(log_lo + f * (log_hi - log_lo))));
        const double eps = bias_fn(n);
        const double lil = std::sqrt(std::log(std::log(static_cast<double>(n))) /
                                     static_cast<double>(n));
        rep.n_grid.push_back(n);
        rep.ratios.push_back(eps > 0.0 ? lil / eps : std::numeric_limits<double>::infinity());
    }
    rep.monotone_decreasing = true;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
        if (!(rep.ratios[i] < rep.ratios[i - 1] * (1.0 + 1e-12))) {
            rep.monotone_decreasing = false;
            break;
        }
    }
    rep.first_ratio = rep.ratios.front();
    rep.last_ratio = rep.ratios.back();
    rep.pass = rep.monotone_decreasing && rep.last_ratio < rep.first_ratio;
    return rep;
}

}  // namespace optimist
