// optimist: simulation-based tests, confidence intervals and point
// estimates for adaptively collected bandit data, plus the experiment
// harness that reproduces the calibration/coverage studies.
//
// Subcommands: simulate | test | ci | experiment | designs
// Exit codes: 0 ok, 2 config error, 3 data error, 4 acceptance failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "optimist/config.hpp"
#include "optimist/harness.hpp"
#include "optimist/inference.hpp"
#include "optimist/json_results.hpp"
#include "optimist/version.hpp"

namespace {

using namespace optimist;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitAcceptance = 4;

struct CommonOpts {
    std::string config_path;
    std::string design_name;
    std::vector<std::string> design_params;  // key=value overrides
    int K = 0;
    std::int64_t T = -1;
    double alpha = -1;
    std::int64_t B = -1;
    std::string bias;
    std::string seed_str;
    int workers = 0;
    std::string out;
};

std::uint64_t sample_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Assemble the effective key-value config: file first, flags override.
KeyValues effective_config(const CommonOpts& o) {
    KeyValues kv =
        o.config_path.empty() ? KeyValues::parse_string("") : KeyValues::parse_file(o.config_path);
    if (!o.design_name.empty()) {
        if (find_catalog_entry(o.design_name))
            kv.set("design.template", o.design_name);
        else
            kv.set("design.kind", o.design_name);
    }
    for (const auto& p : o.design_params) {
        auto eq = p.find('=');
        if (eq == std::string::npos)
            throw config_error("--param: expected key=value, got \"" + p + "\"");
        kv.set("design." + p.substr(0, eq), p.substr(eq + 1));
    }
    if (o.alpha >= 0) kv.set("test.alpha", std::to_string(o.alpha));
    if (o.B >= 0) kv.set("test.B", std::to_string(o.B));
    if (!o.bias.empty()) kv.set("test.bias", o.bias);
    return kv;
}

int resolve_worker_count(int flag_value, const KeyValues& kv) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("OPTIMIST_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return static_cast<int>(kv.get_int_or("run.workers", 0));
}

SeedSpec resolve_seed(const std::string& seed_str, const KeyValues& kv) {
    if (!seed_str.empty()) {
        KeyValues tmp = KeyValues::parse_string("seed = " + seed_str);
        return {tmp.get_uint("seed"), 0};
    }
    if (kv.has("run.seed")) return {kv.get_uint("run.seed"), 0};
    const std::uint64_t s = sample_seed();
    std::fprintf(stderr, "seed: %llu (sampled; pass --seed %llu to reproduce)\n",
                 static_cast<unsigned long long>(s), static_cast<unsigned long long>(s));
    return {s, 0};
}

ArmModel parse_arms(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw config_error("--arms: expected kind:params, e.g. bernoulli:0.5,0.5");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    std::vector<std::string> parts;
    {
        std::istringstream in(rest);
        std::string item;
        while (std::getline(in, item, ',')) parts.push_back(item);
    }
    if (parts.empty()) throw config_error("--arms: no arm parameters given");
    if (kind == "bernoulli") {
        std::vector<double> means;
        for (const auto& p : parts) means.push_back(std::stod(p));
        return ArmModel::bernoulli(means);
    }
    if (kind == "gaussian") {
        std::vector<double> means, sds;
        for (const auto& p : parts) {
            auto c = p.find(':');
            if (c == std::string::npos)
                throw config_error("--arms: gaussian arms need mean:sd, got \"" + p + "\"");
            means.push_back(std::stod(p.substr(0, c)));
            sds.push_back(std::stod(p.substr(c + 1)));
        }
        return ArmModel::gaussian(means, sds);
    }
    throw config_error("--arms: unknown kind \"" + kind + "\" (expected bernoulli|gaussian)");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw data_error("write failed: " + path);
}

// Echo of every resolved parameter, written next to each output so a run
// can be reproduced without the original command line.
std::string manifest_text(const KeyValues& kv, const SeedSpec& seed, int workers) {
    std::string out = "# optimist run manifest, version " + std::string(kVersion) + "\n";
    out += "seed = " + std::to_string(seed.master_seed) + "\n";
    out += "workers = " + std::to_string(workers) + "\n";
    for (const auto& [k, v] : kv.all()) out += k + " = " + v + "\n";
    return out;
}

TargetSpec target_from_flags(int arm, const std::string& diff, const KeyValues& kv) {
    if (arm > 0 && !diff.empty())
        throw config_error("--arm and --diff are mutually exclusive");
    if (arm > 0) return TargetSpec::arm_mean(arm);
    if (!diff.empty()) {
        auto comma = diff.find(',');
        if (comma == std::string::npos)
            throw config_error("--diff: expected two arms, e.g. --diff 1,2");
        return TargetSpec::diff_means(std::stoi(diff.substr(0, comma)),
                                      std::stoi(diff.substr(comma + 1)));
    }
    if (kv.has("target.arm") || kv.has("target.diff")) return target_from_config(kv);
    throw config_error("target: set --arm N or --diff a,b (or [target] in the config file)");
}

std::string designs_help_footer() {
    std::string s = "Designs (for --design / design.template):\n";
    for (const auto& e : design_catalog()) s += "  " + e.name + ": " + e.summary + "\n";
    s += "Bias kinds (for --bias / run.bias): bias1 (log log N / sqrt N, default), "
         "bias2 (log N / sqrt N), bias3 (constant 1), plugin (no optimism; baseline only)\n";
    return s;
}

int cmd_designs() {
    std::printf("available designs:\n");
    for (const auto& e : design_catalog())
        std::printf("  %-18s %s\n  %*s params: %s\n", e.name.c_str(), e.summary.c_str(), 18, "",
                    e.params_doc.c_str());
    std::printf("bias kinds: bias1 | bias2 | bias3 | plugin\n");
    return kExitOk;
}

int cmd_simulate(const CommonOpts& o, const std::string& arms) {
    KeyValues kv = effective_config(o);
    ArmModel model = [&] {
        if (!arms.empty()) return parse_arms(arms);
        if (kv.has("model.kind")) return model_from_config(kv);
        throw config_error("--arms: required (or a [model] block in the config file)");
    }();
    const int K = o.K > 0 ? o.K : model.K();
    if (K != model.K()) throw config_error("--K: does not match the number of arms");
    const std::int64_t T = o.T >= 0 ? o.T : kv.get_int("run.T");
    if (T < 0) throw config_error("run.T: must be >= 0");
    const DesignSpec design = design_from_config(kv, K, T);
    const SeedSpec seed = resolve_seed(o.seed_str, kv);

    const Trajectory h = run_true_experiment(design, model, T, seed);
    const std::string out_path = o.out.empty() ? "trajectory.csv" : o.out;
    write_trajectory_csv(h, out_path);

    kv.set("run.T", std::to_string(T));
    kv.set("design.resolved", optimist::detail::describe_design(design));
    write_text_file(out_path + ".manifest", manifest_text(kv, seed, 1));
    std::fprintf(stderr, "wrote %s (%lld rows)\n", out_path.c_str(),
                 static_cast<long long>(h.T()));
    return kExitOk;
}

int cmd_test(const CommonOpts& o, const std::string& trajectory, int arm, const std::string& diff,
             double theta0) {
    KeyValues kv = effective_config(o);
    const Trajectory h = read_trajectory_csv(trajectory, o.K);
    const DesignSpec design = design_from_config(kv, h.K, h.T());
    const TargetSpec target = target_from_flags(arm, diff, kv);
    const SeedSpec seed = resolve_seed(o.seed_str, kv);
    const int workers = resolve_workers(resolve_worker_count(o.workers, kv));

    TestConfig tc;
    tc.alpha = kv.get_double_or("test.alpha", 0.1);
    tc.B = static_cast<std::size_t>(kv.get_int_or("test.B", 200));
    tc.bias = BiasSpec::from_string(kv.get_string_or("test.bias", "bias1"));
    tc.seed = seed;
    tc.workers = workers;

    const TestOutcome out = test_point_null(h, design, {target, theta0}, tc);
    nlohmann::json j = to_json(out, tc.alpha);
    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!o.out.empty()) write_text_file(o.out, text);
    return kExitOk;
}

int cmd_ci(const CommonOpts& o, const std::string& trajectory, int arm, const std::string& diff,
           double grid_lo, double grid_hi, int grid_count, const std::string& grid_list,
           bool no_crn, double bound_lo, double bound_hi, double alpha_bound) {
    KeyValues kv = effective_config(o);
    const Trajectory h = read_trajectory_csv(trajectory, o.K);
    const DesignSpec design = design_from_config(kv, h.K, h.T());
    const TargetSpec target = target_from_flags(arm, diff, kv);
    const SeedSpec seed = resolve_seed(o.seed_str, kv);
    const int workers = resolve_workers(resolve_worker_count(o.workers, kv));

    CiConfig cc;
    cc.alpha = kv.get_double_or("test.alpha", 0.1);
    cc.B = static_cast<std::size_t>(kv.get_int_or("test.B", 200));
    cc.bias = BiasSpec::from_string(kv.get_string_or("test.bias", "bias1"));
    cc.seed = seed;
    cc.workers = workers;
    cc.common_random_numbers = !no_crn && kv.get_bool_or("test.crn", true);

    ConfidenceResult res;
    const bool unbounded = std::isfinite(bound_lo) && std::isfinite(bound_hi);
    if (unbounded) {
        const double a2 = cc.alpha - alpha_bound;
        res = ci_unbounded(
            h, design, target, alpha_bound, a2,
            [&] { return std::pair<double, double>(bound_lo, bound_hi); },
            grid_count > 0 ? grid_count : static_cast<int>(kv.get_int_or("grid.count", 100)), cc);
    } else {
        if (!grid_list.empty()) {
            KeyValues tmp = KeyValues::parse_string("grid = " + grid_list);
            cc.grid = tmp.get_double_list("grid");
        } else {
            const double lo = std::isfinite(grid_lo) ? grid_lo : kv.get_double_or("grid.lo", 0.0);
            const double hi = std::isfinite(grid_hi) ? grid_hi : kv.get_double_or("grid.hi", 1.0);
            const int count =
                grid_count > 0 ? grid_count : static_cast<int>(kv.get_int_or("grid.count", 100));
            cc.grid = linspace_grid(lo, hi, count);
        }
        res = confidence_interval(h, design, target, cc);
    }

    nlohmann::json j = to_json(res);
    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!o.out.empty()) write_text_file(o.out, text);
    return kExitOk;
}

int cmd_experiment(const std::string& plan_path, int workers_flag, const std::string& out_dir,
                   const std::string& seed_str) {
    KeyValues kv = KeyValues::parse_file(plan_path);
    if (!seed_str.empty()) kv.set("run.seed", seed_str);
    ExperimentPlan plan = plan_from_config(kv);
    plan.workers = resolve_workers(resolve_worker_count(workers_flag, kv));

    const HarnessResult result = run_plan(plan);

    namespace fs = std::filesystem;
    fs::path dir;
    if (!out_dir.empty()) {
        dir = out_dir;
    } else {
        const auto now = std::chrono::system_clock::now();
        const auto tt = std::chrono::system_clock::to_time_t(now);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::gmtime(&tt));
        dir = fs::path("results") / plan.name / stamp;
    }
    fs::create_directories(dir);
    write_text_file((dir / "metrics.csv").string(), metrics_to_csv(plan, result.metrics));
    write_text_file((dir / "quantiles.csv").string(), quantiles_to_csv(plan, result.quantiles));
    std::fprintf(stderr, "wrote %s\n", (dir / "metrics.csv").c_str());

    const auto checks = evaluate_checks(plan, result);
    bool all_pass = true;
    for (const auto& c : checks) {
        std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all_pass = all_pass && c.pass;
    }
    if (checks.empty()) std::printf("(plan has no checks)\n");
    return all_pass ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation-based inference for adaptively collected bandit data"};
    app.require_subcommand(1);
    app.footer(designs_help_footer());

    CommonOpts common;
    std::string arms, trajectory, diff, grid_list, plan_path, exp_out, exp_seed;
    int arm = 0, grid_count = 0, exp_workers = 0;
    double theta0 = 0.0;
    double grid_lo = std::numeric_limits<double>::quiet_NaN();
    double grid_hi = std::numeric_limits<double>::quiet_NaN();
    double bound_lo = std::numeric_limits<double>::quiet_NaN();
    double bound_hi = std::numeric_limits<double>::quiet_NaN();
    double alpha_bound = 0.01;
    bool no_crn = false;

    auto add_common = [&](CLI::App* sub, bool with_design = true) {
        sub->add_option("--config", common.config_path, "key-value config file");
        if (with_design) {
            sub->add_option("--design", common.design_name,
                            "design: catalog name (see `optimist designs`) or raw kind");
            sub->add_option("--param", common.design_params,
                            "design parameter override, key=value (repeatable)");
        }
        sub->add_option("--K", common.K, "number of arms (otherwise inferred)");
        sub->add_option("--seed", common.seed_str, "master seed (omit to sample and print one)");
        sub->add_option("--workers", common.workers,
                        "worker threads (0 = auto; env OPTIMIST_WORKERS overrides config)");
        sub->add_option("--out", common.out, "output path");
    };

    auto* sim = app.add_subcommand("simulate", "run a design against a true arm model, emit CSV");
    add_common(sim);
    sim->add_option("--T", common.T, "horizon");
    sim->add_option("--arms", arms, "true arms, e.g. bernoulli:0.5,0.5 or gaussian:0:1,0:1");

    auto* test = app.add_subcommand("test", "point null test on a trajectory, emit JSON");
    add_common(test);
    test->add_option("--trajectory", trajectory, "trajectory CSV path")->required();
    test->add_option("--theta0", theta0, "null value to test")->required();
    test->add_option("--arm", arm, "target arm (mean target)");
    test->add_option("--diff", diff, "target arm pair a,b (difference target; a is statistic arm)");
    test->add_option("--alpha", common.alpha, "type I error level (default 0.1)");
    test->add_option("--B", common.B, "simulations per null (default 200)");
    test->add_option("--bias", common.bias, "bias1|bias2|bias3|plugin (default bias1)");

    auto* ci = app.add_subcommand("ci", "test-inversion confidence interval, emit JSON");
    add_common(ci);
    ci->add_option("--trajectory", trajectory, "trajectory CSV path")->required();
    ci->add_option("--arm", arm, "target arm (mean target)");
    ci->add_option("--diff", diff, "target arm pair a,b (difference target; a is statistic arm)");
    ci->add_option("--alpha", common.alpha, "type I error level (default 0.1)");
    ci->add_option("--B", common.B, "simulations per null (default 200)");
    ci->add_option("--bias", common.bias, "bias1|bias2|bias3|plugin (default bias1)");
    ci->add_option("--grid-lo", grid_lo, "grid lower bound (default 0)");
    ci->add_option("--grid-hi", grid_hi, "grid upper bound (default 1)");
    ci->add_option("--grid-count", grid_count, "grid size (default 100)");
    ci->add_option("--grid", grid_list, "explicit comma-separated null values");
    ci->add_flag("--no-crn", no_crn, "disjoint random streams per tested null");
    ci->add_option("--bound-lo", bound_lo,
                   "external bounding interval lower end (unbounded-parameter mode)");
    ci->add_option("--bound-hi", bound_hi, "external bounding interval upper end");
    ci->add_option("--alpha-bound", alpha_bound,
                   "alpha spent on the external bound (refine level = alpha - alpha_bound)");

    auto* exp = app.add_subcommand("experiment", "run an experiment plan, emit metric CSVs");
    exp->add_option("plan", plan_path, "plan file")->required();
    exp->add_option("--workers", exp_workers, "worker threads (0 = auto)");
    exp->add_option("--out", exp_out, "output directory (default results/<plan>/<timestamp>/)");
    exp->add_option("--seed", exp_seed, "override the plan's master seed");

    auto* designs = app.add_subcommand("designs", "list the design catalog");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(common, arms);
        if (test->parsed()) return cmd_test(common, trajectory, arm, diff, theta0);
        if (ci->parsed())
            return cmd_ci(common, trajectory, arm, diff, grid_lo, grid_hi, grid_count, grid_list,
                          no_crn, bound_lo, bound_hi, alpha_bound);
        if (exp->parsed()) return cmd_experiment(plan_path, exp_workers, exp_out, exp_seed);
        if (designs->parsed()) return cmd_designs();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitOk;
}
