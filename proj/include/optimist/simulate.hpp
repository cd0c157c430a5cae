#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "optimist/designs.hpp"
#include "optimist/errors.hpp"
#include "optimist/model.hpp"
#include "optimist/nuisance.hpp"
#include "optimist/parallel.hpp"
#include "optimist/rng.hpp"
#include "optimist/trajectory.hpp"

namespace optimist {

namespace detail {

// Per-arm simulation means and sds under the null: the statistic arm is
// centered on theta0 (plus the biased mean of the comparison arm for a
// difference target); every other arm uses its optimistically biased mean.
// All outcomes are gaussian regardless of the true arm family.
struct NullSimParams {
    std::vector<double> mean;
    std::vector<double> sd;
};

inline NullSimParams null_sim_params(const NullSpec& null, const NuisanceVector& nuis) {
    nuis.validate();
    null.target.validate(nuis.K());
    if (!(null.target == nuis.target))
        throw config_error("null target does not match the nuisance vector's target");

    const int K = nuis.K();
    const int stat_arm = null.target.statistic_arm();
    NullSimParams p;
    p.mean.resize(K);
    p.sd.resize(K);
    for (int a = 1; a <= K; ++a) {
        if (a == stat_arm) {
            p.mean[a - 1] = null.theta0;
            if (null.target.kind == TargetSpec::Kind::DiffMeans)
                p.mean[a - 1] += nuis.biased(null.target.other_arm);
        } else {
            p.mean[a - 1] = nuis.biased(a);
        }
        p.sd[a - 1] = std::sqrt(nuis.variance(a));
    }
    return p;
}

// Drive one simulated run of `design` for T steps, feeding each
// (arm, outcome) to the sink. Shared by the materializing and
// statistic-only paths so both perform identical arithmetic.
template <typename Sink>
void run_null_simulation(const DesignSpec& design, const NullSimParams& params, std::int64_t T,
                         RngStream& rng, Sink&& sink) {
    auto d = make_design(design.with_horizon(design.K, T));
    for (std::int64_t t = 1; t <= T; ++t) {
        const int arm = d->select_arm(rng);
        const double sd = params.sd[arm - 1];
        const double x = sd == 0.0 ? params.mean[arm - 1] : rng.gaussian(params.mean[arm - 1], sd);
        d->update(arm, x);
        sink(t, arm, x);
    }
}

}  // namespace detail

// Generate one synthetic trajectory under the point null theta = theta0
// with gaussian outcomes driven by the nuisance vector. T = 0 yields an
// empty trajectory.
inline Trajectory simulate_null_trajectory(const DesignSpec& design, const NullSpec& null,
                                           const NuisanceVector& nuis, std::int64_t T,
                                           SeedSpec seed) {
    if (design.K != nuis.K())
        throw config_error("design has K=" + std::to_string(design.K) +
                           " but nuisance vector has K=" + std::to_string(nuis.K()));
    const auto params = detail::null_sim_params(null, nuis);
    Trajectory h;
    h.K = design.K;
    h.records.reserve(static_cast<std::size_t>(T));
    RngStream rng(seed);
    detail::run_null_simulation(design, params, T, rng,
                                [&](std::int64_t t, int arm, double x) {
                                    h.records.push_back({t, arm, x});
                                });
    return h;
}

// Run the design against a true arm model (Bernoulli or Gaussian outcomes).
inline Trajectory run_true_experiment(const DesignSpec& design, const ArmModel& model,
                                      std::int64_t T, SeedSpec seed) {
    model.validate();
    if (model.K() != design.K)
        throw config_error("arm model has " + std::to_string(model.K()) +
                           " arms but design has K=" + std::to_string(design.K));
    auto d = make_design(design.with_horizon(design.K, T));
    Trajectory h;
    h.K = design.K;
    h.records.reserve(static_cast<std::size_t>(T));
    RngStream rng(seed);
    for (std::int64_t t = 1; t <= T; ++t) {
        const int arm = d->select_arm(rng);
        double x;
        if (model.kind == ArmModel::Kind::Bernoulli) {
            x = rng.bernoulli(model.means[arm - 1]) ? 1.0 : 0.0;
        } else {
            const double sd = model.sds[arm - 1];
            x = sd == 0.0 ? model.means[arm - 1] : rng.gaussian(model.means[arm - 1], sd);
        }
        d->update(arm, x);
        h.records.push_back({t, arm, x});
    }
    return h;
}

// The test statistic rho(H) = sample mean of the statistic arm.
inline std::optional<double> trajectory_statistic(const Trajectory& h, const TargetSpec& target) {
    return arm_mean(h, target.statistic_arm());
}

// B simulated statistic values. stats[i] is NaN when replicate i never
// pulled the statistic arm; such replicates are excluded from downstream
// CDFs and counted in `exclusions`.
struct BatchResult {
    std::vector<double> stats;
    std::size_t exclusions = 0;

    std::size_t effective() const { return stats.size() - exclusions; }

    std::vector<double> valid() const {
        std::vector<double> out;
        out.reserve(stats.size());
        for (double s : stats)
            if (!std::isnan(s)) out.push_back(s);
        return out;
    }
};

// Resimulate the experiment B times under the null and return the B
// statistic values. Replicate i owns the random stream seed.stream_id + i,
// so results are identical for any worker count and extending B only
// appends to the sequence.
inline BatchResult batch_simulate(const DesignSpec& design, const NullSpec& null,
                                  const NuisanceVector& nuis, std::int64_t T, std::size_t B,
                                  SeedSpec seed, int workers = 1) {
    if (B < 1) throw config_error("batch_simulate: B must be >= 1");
    if (design.K != nuis.K())
        throw config_error("design has K=" + std::to_string(design.K) +
                           " but nuisance vector has K=" + std::to_string(nuis.K()));
    const auto params = detail::null_sim_params(null, nuis);
    const int stat_arm = null.target.statistic_arm();

    BatchResult result;
    result.stats.assign(B, 0.0);
    parallel_for(B, workers, [&](std::size_t i) {
        RngStream rng(seed.offset(i));
        detail::KahanSum sum;
        std::int64_t n = 0;
        detail::run_null_simulation(design, params, T, rng,
                                    [&](std::int64_t, int arm, double x) {
                                        if (arm == stat_arm) {
                                            sum.add(x);
                                            ++n;
                                        }
                                    });
        result.stats[i] = n > 0 ? sum.sum / static_cast<double>(n)
                                : std::numeric_limits<double>::quiet_NaN();
    });
    for (double s : result.stats)
        if (std::isnan(s)) ++result.exclusions;
    return result;
}

}  // namespace optimist
