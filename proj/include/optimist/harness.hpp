#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "optimist/designs.hpp"
#include "optimist/inference.hpp"
#include "optimist/model.hpp"
#include "optimist/parallel.hpp"
#include "optimist/version.hpp"

namespace optimist {

// One experiment recipe: design, true arm model, target, sweep axes,
// inference settings and replication budget, plus named pass/fail checks
// evaluated on the resulting metric table.
struct ExperimentPlan {
    enum class Kind { Calibration, Sweep, BiasAblation, RuntimeScaling };

    std::string name = "plan";
    Kind kind = Kind::Sweep;
    DesignSpec design;  // K set; T/horizon filled in per t_values entry
    ArmModel model;
    TargetSpec target = TargetSpec::arm_mean(1);

    std::vector<std::int64_t> t_values = {200};
    double alpha = 0.1;
    std::vector<double> alpha_sweep = {0.05, 0.1, 0.2};  // calibration only
    std::size_t B = 200;
    double grid_lo = 0.0;
    double grid_hi = 1.0;
    int grid_count = 100;
    std::vector<BiasSpec> bias_kinds = {BiasSpec::bias1()};
    double power_delta = 0.02;                 // ablation: offset of the power null
    std::vector<int> g_values = {50, 100};     // runtime scaling
    std::vector<int> b_values = {50, 100};
    int R = 200;
    std::uint64_t master_seed = 0;
    int workers = 1;
    int runtime_reps = 3;

    std::map<std::string, std::string> checks;

    static std::string kind_name(Kind k) {
        switch (k) {
            case Kind::Calibration: return "calibration";
            case Kind::Sweep: return "sweep";
            case Kind::BiasAblation: return "bias_ablation";
            case Kind::RuntimeScaling: return "runtime_scaling";
        }
        return "?";
    }

    double theta_star() const { return true_target_value(model, target); }

    // Stable content hash over everything that determines the results
    // (FNV-1a over a canonical serialization, excluding worker count).
    std::uint64_t content_hash() const;
};

// One aggregated result row. NaN marks metrics a row does not carry; the
// CSV writer emits only defined metrics (long format, one metric per row).
struct MetricRow {
    std::string plan;
    std::string method;  // "sim-bias1", "sim-plugin", "wald", ...
    std::int64_t T = 0;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double theta0 = std::numeric_limits<double>::quiet_NaN();
    int grid_size = 0;       // runtime scaling rows
    std::size_t sim_count = 0;

    double coverage = std::numeric_limits<double>::quiet_NaN();
    double coverage_se = std::numeric_limits<double>::quiet_NaN();
    double reject_rate = std::numeric_limits<double>::quiet_NaN();
    double reject_se = std::numeric_limits<double>::quiet_NaN();
    double width = std::numeric_limits<double>::quiet_NaN();
    double width_se = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    double mse_se = std::numeric_limits<double>::quiet_NaN();
    double runtime_s = std::numeric_limits<double>::quiet_NaN();
    double runtime_se = std::numeric_limits<double>::quiet_NaN();
};

// Per-replication distribution summary for one metric.
struct QuantileRow {
    std::string plan;
    std::string method;
    std::int64_t T = 0;
    std::string metric;
    double q10 = 0, q25 = 0, q50 = 0, q75 = 0, q90 = 0;
};

namespace detail {

inline double binomial_se(double p, int n) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

inline double mean_of(const std::vector<double>& v) {
    KahanSum s;
    for (double x : v) s.add(x);
    return v.empty() ? 0.0 : s.sum / static_cast<double>(v.size());
}

inline double se_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    KahanSum s;
    for (double x : v) s.add((x - m) * (x - m));
    const auto n = static_cast<double>(v.size());
    return std::sqrt(s.sum / (n - 1.0) / n);
}

// Type-7 quantile on a copy (linear interpolation of order statistics).
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
}

inline QuantileRow quantile_row(const std::string& plan, const std::string& method,
                                std::int64_t T, const std::string& metric,
                                const std::vector<double>& v) {
    return {plan, method, T, metric, quantile(v, 0.10), quantile(v, 0.25),
            quantile(v, 0.50), quantile(v, 0.75), quantile(v, 0.90)};
}

inline void fnv_mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
}

inline std::string describe_design(const DesignSpec& d) {
    std::string s = to_string(d.kind);
    char buf[160];
    switch (d.kind) {
        case DesignKind::Etc:
            std::snprintf(buf, sizeof(buf), "(f=%.6g,%s)", d.explore_fraction,
                          d.explore_style == DesignSpec::ExploreStyle::Uniform ? "uniform"
                                                                               : "round_robin");
            s += buf;
            break;
        case DesignKind::EpsGreedy:
            if (d.epsilon_decay)
                std::snprintf(buf, sizeof(buf), "(c=%.6g)", d.c);
            else
                std::snprintf(buf, sizeof(buf), "(eps=%.6g)", d.epsilon);
            s += buf;
            break;
        case DesignKind::ClippedDecay:
            std::snprintf(buf, sizeof(buf), "(beta=%.6g)", d.beta);
            s += buf;
            break;
        case DesignKind::GammaMixture:
            std::snprintf(buf, sizeof(buf), "(gamma=%.6g)", d.gamma);
            s += buf;
            break;
        case DesignKind::BatchedThompson:
            std::snprintf(buf, sizeof(buf), "(batch=%lld)", static_cast<long long>(d.batch_size));
            s += buf;
            break;
        default: break;
    }
    if (d.base) s += "<" + describe_design(*d.base) + ">";
    return s;
}

}  // namespace detail

inline std::uint64_t ExperimentPlan::content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    char buf[256];
    detail::fnv_mix(h, name);
    detail::fnv_mix(h, kind_name(kind));
    detail::fnv_mix(h, detail::describe_design(design));
    detail::fnv_mix(h, model.kind == ArmModel::Kind::Bernoulli ? "bernoulli" : "gaussian");
    for (std::size_t i = 0; i < model.means.size(); ++i) {
        const double sd = model.kind == ArmModel::Kind::Gaussian ? model.sds[i] : 0.0;
        std::snprintf(buf, sizeof(buf), "%.17g:%.17g", model.means[i], sd);
        detail::fnv_mix(h, buf);
    }
    detail::fnv_mix(h, target.describe());
    for (auto t : t_values) detail::fnv_mix(h, std::to_string(t));
    for (auto a : alpha_sweep) {
        std::snprintf(buf, sizeof(buf), "%.17g", a);
        detail::fnv_mix(h, buf);
    }
    std::snprintf(buf, sizeof(buf), "a=%.17g B=%zu g=[%.17g,%.17g]x%d d=%.17g R=%d s=%llu",
                  alpha, B, grid_lo, grid_hi, grid_count, power_delta, R,
                  static_cast<unsigned long long>(master_seed));
    detail::fnv_mix(h, buf);
    for (const auto& b : bias_kinds) detail::fnv_mix(h, b.name());
    for (auto g : g_values) detail::fnv_mix(h, std::to_string(g));
    for (auto b : b_values) detail::fnv_mix(h, std::to_string(b));
    return h;
}

struct HarnessResult {
    std::vector<MetricRow> metrics;
    std::vector<QuantileRow> quantiles;
};

// ---------------------------------------------------------------------------
// Calibration: replay the experiment R times under the true model, test the
// true null theta0 = theta* once per bias mode, and report realized vs
// nominal rejection rates across the alpha sweep. Each replication derives
// its own master seed so streams never collide; results are independent of
// scheduling.
// ---------------------------------------------------------------------------
inline HarnessResult run_calibration(const ExperimentPlan& plan) {
    const std::int64_t T = plan.t_values.front();
    const DesignSpec design = plan.design.with_horizon(plan.design.K, T);
    const double theta_star = plan.theta_star();
    const std::size_t n_bias = plan.bias_kinds.size();

    std::vector<std::vector<double>> cdf(n_bias, std::vector<double>(plan.R, 0.0));
    parallel_for(static_cast<std::size_t>(plan.R), plan.workers, [&](std::size_t r) {
        const std::uint64_t seed_r = derive_seed(plan.master_seed, r);
        const Trajectory h = run_true_experiment(design, plan.model, T, {seed_r, 0});
        for (std::size_t bi = 0; bi < n_bias; ++bi) {
            TestConfig tc;
            tc.alpha = plan.alpha;
            tc.B = plan.B;
            tc.bias = plan.bias_kinds[bi];
            tc.seed = {seed_r, 1};
            const TestOutcome out = test_point_null(h, design, {plan.target, theta_star}, tc);
            cdf[bi][r] = out.cdf_value;
        }
    });

    HarnessResult res;
    for (std::size_t bi = 0; bi < n_bias; ++bi) {
        for (double a : plan.alpha_sweep) {
            int rejects = 0;
            for (double c : cdf[bi])
                if (c < a / 2.0 || c > 1.0 - a / 2.0) ++rejects;
            MetricRow row;
            row.plan = plan.name;
            row.method = "sim-" + plan.bias_kinds[bi].name();
            row.T = T;
            row.alpha = a;
            row.theta0 = theta_star;
            row.sim_count = plan.B;
            row.reject_rate = static_cast<double>(rejects) / static_cast<double>(plan.R);
            // SE of the nominal rate: the acceptance band is nominal +/- k SE.
            row.reject_se = detail::binomial_se(a, plan.R);
            res.metrics.push_back(row);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Coverage / width / MSE sweep over T, simulation CI vs the Wald baseline.
// ---------------------------------------------------------------------------
inline HarnessResult run_sweep(const ExperimentPlan& plan) {
    HarnessResult res;
    const double theta_star = plan.theta_star();
    const BiasSpec bias = plan.bias_kinds.front();
    const std::vector<double> grid = linspace_grid(plan.grid_lo, plan.grid_hi, plan.grid_count);

    for (const std::int64_t T : plan.t_values) {
        const DesignSpec design = plan.design.with_horizon(plan.design.K, T);

        struct RepMetrics {
            double cover_sim, width_sim, sqerr_sim, abserr_sim, time_sim;
            double cover_wald, width_wald, sqerr_wald;
        };
        std::vector<RepMetrics> reps(plan.R);

        parallel_for(static_cast<std::size_t>(plan.R), plan.workers, [&](std::size_t r) {
            const std::uint64_t seed_r =
                derive_seed(derive_seed(plan.master_seed, static_cast<std::uint64_t>(T)), r);
            const Trajectory h = run_true_experiment(design, plan.model, T, {seed_r, 0});

            CiConfig cc;
            cc.alpha = plan.alpha;
            cc.B = plan.B;
            cc.bias = bias;
            cc.seed = {seed_r, 1};
            cc.grid = grid;
            const auto start = std::chrono::steady_clock::now();
            const ConfidenceResult ci = confidence_interval(h, design, plan.target, cc);
            const auto stop = std::chrono::steady_clock::now();

            const WaldInterval w = wald_baseline(h, plan.target, plan.alpha);
            RepMetrics m;
            m.cover_sim = ci.contains(theta_star) ? 1.0 : 0.0;
            m.width_sim = ci.width();
            m.sqerr_sim = (ci.point_estimate - theta_star) * (ci.point_estimate - theta_star);
            m.abserr_sim = std::abs(ci.point_estimate - theta_star);
            m.time_sim = std::chrono::duration<double>(stop - start).count();
            m.cover_wald = w.contains(theta_star) ? 1.0 : 0.0;
            m.width_wald = w.width();
            m.sqerr_wald = (w.estimate - theta_star) * (w.estimate - theta_star);
            reps[r] = m;
        });

        auto collect = [&](auto proj) {
            std::vector<double> v(plan.R);
            for (int r = 0; r < plan.R; ++r) v[r] = proj(reps[r]);
            return v;
        };
        const auto cover_sim = collect([](const RepMetrics& m) { return m.cover_sim; });
        const auto width_sim = collect([](const RepMetrics& m) { return m.width_sim; });
        const auto sqerr_sim = collect([](const RepMetrics& m) { return m.sqerr_sim; });
        const auto abserr_sim = collect([](const RepMetrics& m) { return m.abserr_sim; });
        const auto time_sim = collect([](const RepMetrics& m) { return m.time_sim; });
        const auto cover_wald = collect([](const RepMetrics& m) { return m.cover_wald; });
        const auto width_wald = collect([](const RepMetrics& m) { return m.width_wald; });
        const auto sqerr_wald = collect([](const RepMetrics& m) { return m.sqerr_wald; });

        MetricRow sim;
        sim.plan = plan.name;
        sim.method = "sim-" + bias.name();
        sim.T = T;
        sim.alpha = plan.alpha;
        sim.sim_count = plan.B;
        sim.coverage = detail::mean_of(cover_sim);
        sim.coverage_se = detail::binomial_se(sim.coverage, plan.R);
        sim.width = detail::mean_of(width_sim);
        sim.width_se = detail::se_of_mean(width_sim);
        sim.mse = detail::mean_of(sqerr_sim);
        sim.mse_se = detail::se_of_mean(sqerr_sim);
        sim.runtime_s = detail::mean_of(time_sim);
        sim.runtime_se = detail::se_of_mean(time_sim);
        res.metrics.push_back(sim);

        MetricRow wald;
        wald.plan = plan.name;
        wald.method = "wald";
        wald.T = T;
        wald.alpha = plan.alpha;
        wald.coverage = detail::mean_of(cover_wald);
        wald.coverage_se = detail::binomial_se(wald.coverage, plan.R);
        wald.width = detail::mean_of(width_wald);
        wald.width_se = detail::se_of_mean(width_wald);
        wald.mse = detail::mean_of(sqerr_wald);
        wald.mse_se = detail::se_of_mean(sqerr_wald);
        res.metrics.push_back(wald);

        res.quantiles.push_back(detail::quantile_row(plan.name, sim.method, T, "width", width_sim));
        res.quantiles.push_back(
            detail::quantile_row(plan.name, sim.method, T, "abs_err", abserr_sim));
        res.quantiles.push_back(detail::quantile_row(plan.name, "wald", T, "width", width_wald));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Bias ablation: realized type I error at theta0 = theta*, and power at the
// near null theta0 = theta* + power_delta, for each bias kind in the plan.
// ---------------------------------------------------------------------------
inline HarnessResult run_bias_ablation(const ExperimentPlan& plan) {
    const std::int64_t T = plan.t_values.front();
    const DesignSpec design = plan.design.with_horizon(plan.design.K, T);
    const double theta_star = plan.theta_star();
    const double theta_near = theta_star + plan.power_delta;
    const std::size_t n_bias = plan.bias_kinds.size();

    std::vector<std::vector<int>> reject_null(n_bias, std::vector<int>(plan.R, 0));
    std::vector<std::vector<int>> reject_near(n_bias, std::vector<int>(plan.R, 0));
    parallel_for(static_cast<std::size_t>(plan.R), plan.workers, [&](std::size_t r) {
        const std::uint64_t seed_r = derive_seed(plan.master_seed, r);
        const Trajectory h = run_true_experiment(design, plan.model, T, {seed_r, 0});
        for (std::size_t bi = 0; bi < n_bias; ++bi) {
            TestConfig tc;
            tc.alpha = plan.alpha;
            tc.B = plan.B;
            tc.bias = plan.bias_kinds[bi];
            tc.seed = {seed_r, 1};
            reject_null[bi][r] =
                test_point_null(h, design, {plan.target, theta_star}, tc).reject ? 1 : 0;
            reject_near[bi][r] =
                test_point_null(h, design, {plan.target, theta_near}, tc).reject ? 1 : 0;
        }
    });

    HarnessResult res;
    for (std::size_t bi = 0; bi < n_bias; ++bi) {
        auto rate = [&](const std::vector<int>& v) {
            int n = 0;
            for (int x : v) n += x;
            return static_cast<double>(n) / static_cast<double>(plan.R);
        };
        MetricRow type1;
        type1.plan = plan.name;
        type1.method = "sim-" + plan.bias_kinds[bi].name();
        type1.T = T;
        type1.alpha = plan.alpha;
        type1.theta0 = theta_star;
        type1.sim_count = plan.B;
        type1.reject_rate = rate(reject_null[bi]);
        type1.reject_se = detail::binomial_se(plan.alpha, plan.R);
        res.metrics.push_back(type1);

        MetricRow power = type1;
        power.theta0 = theta_near;
        power.reject_rate = rate(reject_near[bi]);
        power.reject_se = detail::binomial_se(power.reject_rate, plan.R);
        res.metrics.push_back(power);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Runtime scaling: wall-clock per confidence interval over the G x B grid
// on one fixed trajectory; cost should scale linearly in both axes.
// ---------------------------------------------------------------------------
inline HarnessResult run_runtime_scaling(const ExperimentPlan& plan) {
    const std::int64_t T = plan.t_values.front();
    const DesignSpec design = plan.design.with_horizon(plan.design.K, T);
    const std::uint64_t seed0 = derive_seed(plan.master_seed, 0);
    const Trajectory h = run_true_experiment(design, plan.model, T, {seed0, 0});

    HarnessResult res;
    for (int g : plan.g_values) {
        for (int b : plan.b_values) {
            std::vector<double> times;
            for (int rep = 0; rep < plan.runtime_reps; ++rep) {
                CiConfig cc;
                cc.alpha = plan.alpha;
                cc.B = static_cast<std::size_t>(b);
                cc.bias = plan.bias_kinds.front();
                cc.seed = {seed0, 1};
                cc.workers = plan.workers;
                cc.grid = linspace_grid(plan.grid_lo, plan.grid_hi, g);
                const auto start = std::chrono::steady_clock::now();
                const ConfidenceResult ci = confidence_interval(h, design, plan.target, cc);
                const auto stop = std::chrono::steady_clock::now();
                (void)ci;
                times.push_back(std::chrono::duration<double>(stop - start).count());
            }
            MetricRow row;
            row.plan = plan.name;
            row.method = "sim-" + plan.bias_kinds.front().name();
            row.T = T;
            row.alpha = plan.alpha;
            row.grid_size = g;
            row.sim_count = static_cast<std::size_t>(b);
            row.runtime_s = detail::mean_of(times);
            row.runtime_se = detail::se_of_mean(times);
            res.metrics.push_back(row);
        }
    }
    return res;
}

inline HarnessResult run_plan(const ExperimentPlan& plan) {
    switch (plan.kind) {
        case ExperimentPlan::Kind::Calibration: return run_calibration(plan);
        case ExperimentPlan::Kind::Sweep: return run_sweep(plan);
        case ExperimentPlan::Kind::BiasAblation: return run_bias_ablation(plan);
        case ExperimentPlan::Kind::RuntimeScaling: return run_runtime_scaling(plan);
    }
    throw config_error("plan.kind: unhandled kind");
}

// ---------------------------------------------------------------------------
// CSV output. metrics.csv is long format (one metric per row); both files
// open with a run-manifest comment line. Runtime metrics are the only
// nondeterministic content, isolated under metric names runtime_*.
// ---------------------------------------------------------------------------

inline std::string manifest_line(const ExperimentPlan& plan) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# plan=%s kind=%s hash=%016llx seed=%llu version=%s",
                  plan.name.c_str(), ExperimentPlan::kind_name(plan.kind).c_str(),
                  static_cast<unsigned long long>(plan.content_hash()),
                  static_cast<unsigned long long>(plan.master_seed), kVersion);
    return buf;
}

inline std::string metrics_to_csv(const ExperimentPlan& plan,
                                  const std::vector<MetricRow>& rows) {
    std::string out = manifest_line(plan) + "\n";
    out += "plan,T,method,alpha,theta0,grid_size,B,metric,value,se\n";
    char buf[512];
    auto emit = [&](const MetricRow& r, const char* metric, double value, double se) {
        if (std::isnan(value)) return;
        std::snprintf(buf, sizeof(buf), "%s,%lld,%s,%.10g,", r.plan.c_str(),
                      static_cast<long long>(r.T), r.method.c_str(), r.alpha);
        out += buf;
        if (std::isnan(r.theta0))
            out += "";
        else {
            std::snprintf(buf, sizeof(buf), "%.10g", r.theta0);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%d,%zu,%s,%.10g,%.10g\n", r.grid_size, r.sim_count,
                      metric, value, se);
        out += buf;
    };
    for (const auto& r : rows) {
        emit(r, "coverage", r.coverage, r.coverage_se);
        emit(r, "reject_rate", r.reject_rate, r.reject_se);
        emit(r, "width", r.width, r.width_se);
        emit(r, "mse", r.mse, r.mse_se);
        emit(r, "runtime_s", r.runtime_s, r.runtime_se);
    }
    return out;
}

inline std::string quantiles_to_csv(const ExperimentPlan& plan,
                                    const std::vector<QuantileRow>& rows) {
    std::string out = manifest_line(plan) + "\n";
    out += "plan,T,method,metric,q10,q25,q50,q75,q90\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.plan.c_str(), static_cast<long long>(r.T), r.method.c_str(),
                      r.metric.c_str(), r.q10, r.q25, r.q50, r.q75, r.q90);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plan checks: named acceptance thresholds carried by the plan file. A run
// "passes" when every check holds; the CLI turns failures into exit code 4.
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline const MetricRow* find_row(const std::vector<MetricRow>& rows, const std::string& method,
                                 std::int64_t T, double alpha, const double* theta0 = nullptr) {
    for (const auto& r : rows) {
        if (r.method != method || r.T != T) continue;
        if (alpha >= 0 && r.alpha != alpha) continue;
        if (theta0 && !(r.theta0 == *theta0)) continue;
        return &r;
    }
    return nullptr;
}

}  // namespace detail

inline std::vector<CheckResult> evaluate_checks(const ExperimentPlan& plan,
                                                const HarnessResult& result) {
    std::vector<CheckResult> out;
    char buf[256];
    const auto& rows = result.metrics;

    auto get = [&](const std::string& key) -> const std::string* {
        auto it = plan.checks.find(key);
        return it == plan.checks.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("calibration_within_sigma")) {
        const double k = std::stod(*v);
        bool pass = true;
        std::string detail;
        for (const auto& r : rows) {
            if (std::isnan(r.reject_rate) || r.method == "sim-plugin") continue;
            if (plan.kind == ExperimentPlan::Kind::BiasAblation && r.theta0 != plan.theta_star())
                continue;
            const double excess = r.reject_rate - r.alpha;
            if (std::abs(excess) > k * r.reject_se) {
                pass = false;
                std::snprintf(buf, sizeof(buf), "%s@alpha=%.3g excess=%+.4f band=%.4f; ",
                              r.method.c_str(), r.alpha, excess, k * r.reject_se);
                detail += buf;
            } else {
                std::snprintf(buf, sizeof(buf), "%s@alpha=%.3g excess=%+.4f ok; ",
                              r.method.c_str(), r.alpha, excess);
                detail += buf;
            }
        }
        out.push_back({"calibration_within_sigma", pass, detail});
    }

    if (const auto* v = get("plugin_exceeds_optimistic_at")) {
        const double a = std::stod(*v);
        const std::string opt = "sim-" + plan.bias_kinds.front().name();
        const auto* ro = detail::find_row(rows, opt, plan.t_values.front(), a);
        const auto* rp = detail::find_row(rows, "sim-plugin", plan.t_values.front(), a);
        bool pass = ro && rp && rp->reject_rate > ro->reject_rate;
        std::snprintf(buf, sizeof(buf), "plugin=%.4f vs %s=%.4f at alpha=%.3g",
                      rp ? rp->reject_rate : -1.0, opt.c_str(), ro ? ro->reject_rate : -1.0, a);
        out.push_back({"plugin_exceeds_optimistic_at", pass, buf});
    }

    if (const auto* v = get("min_coverage")) {
        const double floor_cov = std::stod(*v);
        bool pass = true;
        std::string detail;
        for (const auto& r : rows) {
            if (std::isnan(r.coverage) || r.method == "wald") continue;
            std::snprintf(buf, sizeof(buf), "T=%lld cov=%.4f; ", static_cast<long long>(r.T),
                          r.coverage);
            detail += buf;
            if (r.coverage < floor_cov) pass = false;
        }
        out.push_back({"min_coverage", pass, detail});
    }

    if (get("monotone_median_width")) {
        std::vector<double> medians;
        for (const auto& q : result.quantiles)
            if (q.metric == "width" && q.method != "wald") medians.push_back(q.q50);
        bool pass = medians.size() >= 2;
        std::string detail = "medians: ";
        for (std::size_t i = 0; i < medians.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.4f ", medians[i]);
            detail += buf;
            if (i > 0 && !(medians[i] < medians[i - 1])) pass = false;
        }
        out.push_back({"monotone_median_width", pass, detail});
    }

    if (get("monotone_mse")) {
        std::vector<double> mses;
        for (const auto& r : rows)
            if (!std::isnan(r.mse) && r.method != "wald") mses.push_back(r.mse);
        bool pass = mses.size() >= 2;
        std::string detail = "mse: ";
        for (std::size_t i = 0; i < mses.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f ", mses[i]);
            detail += buf;
            if (i > 0 && !(mses[i] < mses[i - 1])) pass = false;
        }
        out.push_back({"monotone_mse", pass, detail});
    }

    if (const auto* v = get("width_vs_wald_max_ratio")) {
        const double max_ratio = std::stod(*v);
        const std::int64_t T = plan.t_values.back();
        const std::string sim = "sim-" + plan.bias_kinds.front().name();
        const auto* rs = detail::find_row(rows, sim, T, plan.alpha);
        const auto* rw = detail::find_row(rows, "wald", T, plan.alpha);
        bool pass = rs && rw && rw->width > 0 && rs->width <= max_ratio * rw->width;
        std::snprintf(buf, sizeof(buf), "T=%lld sim width=%.4f wald width=%.4f ratio=%.3f",
                      static_cast<long long>(T), rs ? rs->width : -1.0, rw ? rw->width : -1.0,
                      (rs && rw && rw->width > 0) ? rs->width / rw->width : -1.0);
        out.push_back({"width_vs_wald_max_ratio", pass, buf});
    }

    if (get("bias1_power_ge_bias3")) {
        const double near = plan.theta_star() + plan.power_delta;
        const auto* r1 = detail::find_row(rows, "sim-bias1", plan.t_values.front(), plan.alpha,
                                          &near);
        const auto* r3 = detail::find_row(rows, "sim-bias3", plan.t_values.front(), plan.alpha,
                                          &near);
        bool pass = r1 && r3 && r1->reject_rate >= r3->reject_rate;
        std::snprintf(buf, sizeof(buf), "power bias1=%.4f bias3=%.4f at theta0=%.4g",
                      r1 ? r1->reject_rate : -1.0, r3 ? r3->reject_rate : -1.0, near);
        out.push_back({"bias1_power_ge_bias3", pass, buf});
    }

    const auto* rlo = get("runtime_ratio_lo");
    const auto* rhi = get("runtime_ratio_hi");
    if (rlo && rhi) {
        const double lo = std::stod(*rlo), hi = std::stod(*rhi);
        bool pass = true;
        std::string detail;
        auto cell = [&](int g, int b) -> const MetricRow* {
            for (const auto& r : rows)
                if (r.grid_size == g && r.sim_count == static_cast<std::size_t>(b)) return &r;
            return nullptr;
        };
        for (int g : plan.g_values)
            for (int b : plan.b_values) {
                for (int g2 : plan.g_values) {
                    if (g2 != 2 * g) continue;
                    const auto *r1 = cell(g, b), *r2 = cell(g2, b);
                    if (!r1 || !r2) continue;
                    const double ratio = r2->runtime_s / r1->runtime_s;
                    std::snprintf(buf, sizeof(buf), "G %d->%d @B=%d ratio=%.2f; ", g, g2, b,
                                  ratio);
                    detail += buf;
                    if (!(ratio >= lo && ratio <= hi)) pass = false;
                }
                for (int b2 : plan.b_values) {
                    if (b2 != 2 * b) continue;
                    const auto *r1 = cell(g, b), *r2 = cell(g, b2);
                    if (!r1 || !r2) continue;
                    const double ratio = r2->runtime_s / r1->runtime_s;
                    std::snprintf(buf, sizeof(buf), "B %d->%d @G=%d ratio=%.2f; ", b, b2, g,
                                  ratio);
                    detail += buf;
                    if (!(ratio >= lo && ratio <= hi)) pass = false;
                }
            }
        out.push_back({"runtime_ratio", pass, detail});
    }

    if (const auto* v = get("max_seconds")) {
        const double ceiling = std::stod(*v);
        const int g = *std::min_element(plan.g_values.begin(), plan.g_values.end());
        const int b = *std::min_element(plan.b_values.begin(), plan.b_values.end());
        const MetricRow* r0 = nullptr;
        for (const auto& r : rows)
            if (r.grid_size == g && r.sim_count == static_cast<std::size_t>(b)) r0 = &r;
        bool pass = r0 && r0->runtime_s <= ceiling;
        std::snprintf(buf, sizeof(buf), "G=%d B=%d runtime=%.2fs ceiling=%.0fs", g, b,
                      r0 ? r0->runtime_s : -1.0, ceiling);
        out.push_back({"max_seconds", pass, buf});
    }

    return out;
}

}  // namespace optimist
