#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "optimist/errors.hpp"
#include "optimist/model.hpp"
#include "optimist/nuisance.hpp"
#include "optimist/simulate.hpp"
#include "optimist/trajectory.hpp"

namespace optimist {

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Standard normal quantile via Acklam's rational approximation, polished
// with one Halley step (relative error near machine precision).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw config_error("normal_quantile: p must be in [0,1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

// Empirical CDF of the simulated statistics evaluated with "<=", i.e. a
// right-continuous step function with F(-inf)=0, F(+inf)=1. NaN entries
// (excluded replicates) are ignored; the denominator is the effective count.
inline double empirical_cdf(const std::vector<double>& stats, double x) {
    std::size_t le = 0, n = 0;
    for (double s : stats) {
        if (std::isnan(s)) continue;
        ++n;
        if (s <= x) ++le;
    }
    if (n == 0) throw insufficient_data_error("empirical_cdf: no valid statistics");
    return static_cast<double>(le) / static_cast<double>(n);
}

// Decision and evidence from one point-null test. The null is accepted
// exactly when alpha/2 <= cdf_value <= 1 - alpha/2 (closed band; boundary
// values accept). cdf_value is the simulated-CDF value at the observed
// statistic, reported as-is.
struct TestOutcome {
    double theta0 = 0.0;
    double observed_stat = 0.0;
    double cdf_value = 0.0;
    bool reject = false;
    std::size_t B_effective = 0;
};

struct TestConfig {
    double alpha = 0.1;
    std::size_t B = 200;
    BiasSpec bias = BiasSpec::bias1();
    SeedSpec seed{};
    int workers = 1;
    // Abort when more than this fraction of replicates never pulled the
    // statistic arm.
    double max_exclusion_fraction = 0.01;
};

namespace detail {

inline void check_design_matches(const DesignSpec& design, const Trajectory& h) {
    if (design.K != h.K)
        throw config_error("design.K=" + std::to_string(design.K) +
                           " does not match trajectory K=" + std::to_string(h.K));
    if (design.T != h.T())
        throw config_error("design.T=" + std::to_string(design.T) +
                           " does not match trajectory length T=" + std::to_string(h.T()));
}

inline TestOutcome outcome_from_batch(const BatchResult& batch, double theta0,
                                      double observed_stat, double alpha,
                                      double max_exclusion_fraction) {
    if (static_cast<double>(batch.exclusions) >
        max_exclusion_fraction * static_cast<double>(batch.stats.size()))
        throw data_error("batch excluded " + std::to_string(batch.exclusions) + " of " +
                         std::to_string(batch.stats.size()) +
                         " replicates (statistic arm never pulled); exceeds " +
                         std::to_string(max_exclusion_fraction * 100.0) + "% tolerance");
    TestOutcome out;
    out.theta0 = theta0;
    out.observed_stat = observed_stat;
    out.B_effective = batch.effective();
    out.cdf_value = empirical_cdf(batch.stats, observed_stat);
    out.reject = out.cdf_value < alpha / 2.0 || out.cdf_value > 1.0 - alpha / 2.0;
    return out;
}

}  // namespace detail

// Point null test via resimulation: compute the observed statistic, estimate
// optimistic nuisances, simulate B trajectories under theta0, and locate the
// observed statistic in the simulated CDF.
inline TestOutcome test_point_null(const Trajectory& h, const DesignSpec& design,
                                   const NullSpec& null, const TestConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw config_error("alpha must be in (0,1), got " + std::to_string(cfg.alpha));
    detail::check_design_matches(design, h);
    const auto rho = trajectory_statistic(h, null.target);
    if (!rho)
        throw insufficient_data_error("statistic arm " +
                                      std::to_string(null.target.statistic_arm()) +
                                      " was never pulled in the observed data");
    const NuisanceVector nuis = estimate_nuisances(h, null.target, cfg.bias);
    const BatchResult batch =
        batch_simulate(design, null, nuis, h.T(), cfg.B, cfg.seed, cfg.workers);
    return detail::outcome_from_batch(batch, null.theta0, *rho, cfg.alpha,
                                      cfg.max_exclusion_fraction);
}

// Evenly spaced grid of count values over [lo, hi], endpoints included.
inline std::vector<double> linspace_grid(double lo, double hi, int count) {
    if (count < 1) throw config_error("grid.count: must be >= 1");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi))
        throw config_error("grid: bounds must be finite with lo <= hi");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = (lo + hi) / 2.0;
        return g;
    }
    for (int i = 0; i < count; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return g;
}

struct PerNullResult {
    double theta0 = 0.0;
    double cdf_value = 0.0;
    bool reject = false;
};

// Test-inversion confidence set. `accepted` holds the non-rejected grid
// values plus, always, the observed statistic (so the set is never empty);
// the interval is the hull of the accepted set; the point estimate is the
// accepted value whose simulated CDF is closest to 1/2 (ties: nearest the
// observed statistic, then lowest).
struct ConfidenceResult {
    double observed_stat = 0.0;
    double alpha = 0.0;
    // Nonzero only for the bounded-then-refine construction (alpha split).
    double alpha_bound = 0.0;
    std::vector<double> grid;
    std::vector<PerNullResult> per_null;       // one entry per grid value
    PerNullResult observed_null;               // the observed statistic tested as a null
    std::vector<double> accepted;              // sorted, includes observed_stat
    double lo = 0.0;
    double hi = 0.0;
    double point_estimate = 0.0;
    // The accepted grid values form one contiguous run (diagnostic; gaps can
    // occur at finite B and are legal).
    bool contiguous = true;

    double width() const { return hi - lo; }
    bool contains(double theta) const { return theta >= lo && theta <= hi; }
};

struct CiConfig {
    double alpha = 0.1;
    std::size_t B = 200;
    BiasSpec bias = BiasSpec::bias1();
    SeedSpec seed{};
    int workers = 1;
    double max_exclusion_fraction = 0.01;
    // Reuse the same stream block for every tested null (common random
    // numbers). Smooths the accepted set at finite B; disable to give each
    // null a disjoint stream-id block.
    bool common_random_numbers = true;
    std::vector<double> grid;
};

inline ConfidenceResult confidence_interval(const Trajectory& h, const DesignSpec& design,
                                            const TargetSpec& target, const CiConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw config_error("alpha must be in (0,1), got " + std::to_string(cfg.alpha));
    if (cfg.grid.empty()) throw config_error("grid: must be nonempty");
    for (double g : cfg.grid)
        if (!std::isfinite(g)) throw config_error("grid: values must be finite");
    if (!std::is_sorted(cfg.grid.begin(), cfg.grid.end()))
        throw config_error("grid: values must be sorted ascending");
    detail::check_design_matches(design, h);

    const auto rho = trajectory_statistic(h, target);
    if (!rho)
        throw insufficient_data_error("statistic arm " + std::to_string(target.statistic_arm()) +
                                      " was never pulled in the observed data");
    const NuisanceVector nuis = estimate_nuisances(h, target, cfg.bias);

    const std::size_t G = cfg.grid.size();
    // One task per grid value, plus the observed statistic tested as an
    // extra null so it carries a CDF value of its own.
    std::vector<TestOutcome> outcomes(G + 1);
    std::vector<std::string> failures(G + 1);
    parallel_for(G + 1, cfg.workers, [&](std::size_t g) {
        const double theta0 = g < G ? cfg.grid[g] : *rho;
        const SeedSpec base =
            cfg.common_random_numbers ? cfg.seed : cfg.seed.offset(g * cfg.B);
        try {
            const BatchResult batch = batch_simulate(design, {target, theta0}, nuis, h.T(),
                                                     cfg.B, base, /*workers=*/1);
            outcomes[g] = detail::outcome_from_batch(batch, theta0, *rho, cfg.alpha,
                                                     cfg.max_exclusion_fraction);
        } catch (const std::exception& e) {
            failures[g] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw data_error("confidence_interval: " + f);

    ConfidenceResult res;
    res.observed_stat = *rho;
    res.alpha = cfg.alpha;
    res.grid = cfg.grid;
    res.per_null.resize(G);

    std::vector<std::pair<double, double>> candidates;  // (theta, cdf)
    bool in_run = false, run_ended = false;
    for (std::size_t g = 0; g < G; ++g) {
        const auto& o = outcomes[g];
        res.per_null[g] = {o.theta0, o.cdf_value, o.reject};
        if (!o.reject) {
            if (run_ended) res.contiguous = false;
            in_run = true;
            candidates.emplace_back(o.theta0, o.cdf_value);
        } else if (in_run) {
            run_ended = true;
        }
    }
    res.observed_null = {outcomes[G].theta0, outcomes[G].cdf_value, outcomes[G].reject};
    // The observed statistic is always retained, whatever its own test said.
    if (std::none_of(candidates.begin(), candidates.end(),
                     [&](const auto& c) { return c.first == *rho; }))
        candidates.emplace_back(*rho, outcomes[G].cdf_value);

    for (const auto& c : candidates) res.accepted.push_back(c.first);
    std::sort(res.accepted.begin(), res.accepted.end());
    res.lo = res.accepted.front();
    res.hi = res.accepted.back();

    const auto better = [&](const std::pair<double, double>& x,
                            const std::pair<double, double>& y) {
        const double dx = std::abs(x.second - 0.5), dy = std::abs(y.second - 0.5);
        if (dx != dy) return dx < dy;
        const double rx = std::abs(x.first - *rho), ry = std::abs(y.first - *rho);
        if (rx != ry) return rx < ry;
        return x.first < y.first;
    };
    res.point_estimate =
        std::min_element(candidates.begin(), candidates.end(), better)->first;
    return res;
}

// Confidence interval for unbounded parameter spaces: spend alpha_bound on
// an externally supplied bounding interval (claimed to cover the target
// with probability >= 1 - alpha_bound), then run the grid inversion at
// level alpha_refine over that interval. Valid by a union bound; callers
// should keep alpha_bound much smaller than alpha_refine.
inline ConfidenceResult ci_unbounded(const Trajectory& h, const DesignSpec& design,
                                     const TargetSpec& target, double alpha_bound,
                                     double alpha_refine,
                                     const std::function<std::pair<double, double>()>& bound_provider,
                                     int grid_size, CiConfig cfg) {
    if (!(alpha_bound >= 0.0) || !(alpha_refine > 0.0) ||
        !(alpha_bound + alpha_refine < 1.0))
        throw config_error("alpha split: need alpha_bound >= 0, alpha_refine > 0, sum < 1");
    const auto [lo, hi] = bound_provider();
    if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi))
        throw config_error("bound provider returned an empty or unbounded interval [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    cfg.alpha = alpha_refine;
    cfg.grid = linspace_grid(lo, hi, grid_size);
    ConfidenceResult res = confidence_interval(h, design, target, cfg);
    res.alpha_bound = alpha_bound;
    return res;
}

// Naive Wald interval on the observed data: mean +/- z_{1-alpha/2} *
// sqrt(varhat / N); for a difference target, the difference of means with
// variances summed. Comparison baseline only; it ignores the adaptivity of
// the design.
struct WaldInterval {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double theta) const { return theta >= lo && theta <= hi; }
};

inline WaldInterval wald_baseline(const Trajectory& h, const TargetSpec& target, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw config_error("alpha must be in (0,1], got " + std::to_string(alpha));
    target.validate(h.K);
    const ArmStats stats = compute_arm_stats(h);
    const auto require_pulls = [&](int arm) {
        if (stats.pulls(arm) < 2)
            throw insufficient_data_error("wald baseline: arm " + std::to_string(arm) +
                                          " needs >= 2 pulls, has " +
                                          std::to_string(stats.pulls(arm)));
    };
    const double z = alpha == 1.0 ? 0.0 : normal_quantile(1.0 - alpha / 2.0);

    WaldInterval w;
    if (target.kind == TargetSpec::Kind::ArmMean) {
        require_pulls(target.arm);
        const double n = static_cast<double>(stats.pulls(target.arm));
        w.estimate = stats.mean(target.arm);
        const double hw = z * std::sqrt(stats.varhat(target.arm) / n);
        w.lo = w.estimate - hw;
        w.hi = w.estimate + hw;
    } else {
        require_pulls(target.arm);
        require_pulls(target.other_arm);
        const double na = static_cast<double>(stats.pulls(target.arm));
        const double nb = static_cast<double>(stats.pulls(target.other_arm));
        w.estimate = stats.mean(target.arm) - stats.mean(target.other_arm);
        const double hw = z * std::sqrt(stats.varhat(target.arm) / na +
                                        stats.varhat(target.other_arm) / nb);
        w.lo = w.estimate - hw;
        w.hi = w.estimate + hw;
    }
    return w;
}

}  // namespace optimist
