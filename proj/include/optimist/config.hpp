#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "optimist/designs.hpp"
#include "optimist/errors.hpp"
#include "optimist/harness.hpp"
#include "optimist/model.hpp"
#include "optimist/nuisance.hpp"

namespace optimist {

// Flat key-value configuration text. Lines are `key = value`; a `[section]`
// line prefixes the keys that follow (`[design]` + `kind = ucb` is the same
// as `design.kind = ucb`); `#` starts a comment. Unknown keys are rejected
// by consumers via require_known().
class KeyValues {
public:
    static KeyValues parse_string(const std::string& text, const std::string& source = "<config>") {
        KeyValues kv;
        kv.source_ = source;
        std::istringstream in(text);
        std::string line, prefix;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error(source + ":" + std::to_string(lineno) +
                                       ": malformed section header");
                prefix = trim(line.substr(1, line.size() - 2));
                if (!prefix.empty()) prefix += ".";
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(source + ":" + std::to_string(lineno) +
                                   ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error(source + ":" + std::to_string(lineno) + ": empty key");
            kv.map_[prefix + key] = value;
        }
        return kv;
    }

    static KeyValues parse_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw config_error("cannot open config file: " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse_string(ss.str(), path);
    }

    bool has(const std::string& key) const { return map_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { map_[key] = value; }

    std::string get_string(const std::string& key) const {
        auto it = map_.find(key);
        if (it == map_.end()) throw config_error(key + ": required key missing");
        return it->second;
    }

    std::string get_string_or(const std::string& key, const std::string& dflt) const {
        auto it = map_.find(key);
        return it == map_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
    double get_double_or(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    std::int64_t get_int(const std::string& key) const { return to_int(key, get_string(key)); }
    std::int64_t get_int_or(const std::string& key, std::int64_t dflt) const {
        return has(key) ? get_int(key) : dflt;
    }

    std::uint64_t get_uint(const std::string& key) const {
        const std::string s = get_string(key);
        try {
            std::size_t pos = 0;
            auto v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error(key + ": expected unsigned integer, got \"" + s + "\"");
        }
    }

    bool get_bool_or(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        const std::string s = get_string(key);
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw config_error(key + ": expected boolean, got \"" + s + "\"");
    }

    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(get_string(key));
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        if (out.empty()) throw config_error(key + ": expected comma-separated list");
        return out;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : get_list(key)) out.push_back(to_double(key, s));
        return out;
    }

    std::vector<std::int64_t> get_int_list(const std::string& key) const {
        std::vector<std::int64_t> out;
        for (const auto& s : get_list(key)) out.push_back(to_int(key, s));
        return out;
    }

    std::map<std::string, std::string> with_prefix(const std::string& prefix) const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : map_)
            if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
        return out;
    }

    const std::map<std::string, std::string>& all() const { return map_; }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    double to_double(const std::string& key, const std::string& s) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error(key + ": expected number, got \"" + s + "\"");
        }
    }

    std::int64_t to_int(const std::string& key, const std::string& s) const {
        try {
            std::size_t pos = 0;
            auto v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error(key + ": expected integer, got \"" + s + "\"");
        }
    }

    std::map<std::string, std::string> map_;
    std::string source_;
};

// ---------------------------------------------------------------------------
// Builders from configuration keys. Every design parameter has an exact key
// under [design]; templates from the catalog can be named instead and then
// overridden field by field.
// ---------------------------------------------------------------------------

namespace detail {

inline DesignSpec leaf_design_from(const KeyValues& kv, const std::string& p, int K,
                                   std::int64_t T) {
    const DesignKind kind = design_kind_from_string(kv.get_string(p + "kind"));
    DesignSpec s;
    s.kind = kind;
    s.K = K;
    s.T = T;
    switch (kind) {
        case DesignKind::Etc: {
            s.explore_fraction = kv.get_double_or(p + "explore_fraction", 0.5);
            const std::string style = kv.get_string_or(p + "explore_style", "uniform");
            if (style == "uniform")
                s.explore_style = DesignSpec::ExploreStyle::Uniform;
            else if (style == "round_robin")
                s.explore_style = DesignSpec::ExploreStyle::RoundRobin;
            else
                throw config_error(p + "explore_style: expected uniform|round_robin, got \"" +
                                   style + "\"");
            break;
        }
        case DesignKind::EpsGreedy:
            if (kv.has(p + "c")) {
                s.epsilon_decay = true;
                s.c = kv.get_double(p + "c");
            } else {
                s.epsilon = kv.get_double_or(p + "epsilon", 0.1);
            }
            break;
        case DesignKind::BatchedThompson:
            s.batch_size = kv.get_int_or(p + "batch_size", 100);
            break;
        case DesignKind::FixedUniform:
        case DesignKind::Ucb: break;
        default:
            throw config_error(p + "kind: \"" + to_string(kind) +
                               "\" is a wrapper; specify it at the top level with a base");
    }
    s.validate();
    return s;
}

}  // namespace detail

// Build a design from `[design]` keys. Either `design.template` names a
// catalog entry, or `design.kind` (+ parameters, and `design.base.*` for
// wrapper kinds) spells the design out.
inline DesignSpec design_from_config(const KeyValues& kv, int K, std::int64_t T,
                                     const std::string& prefix = "design.") {
    if (kv.has(prefix + "template")) {
        const std::string name = kv.get_string(prefix + "template");
        const CatalogEntry* e = find_catalog_entry(name);
        if (!e) throw config_error(prefix + "template: no catalog design named \"" + name + "\"");
        DesignSpec s = e->make(K, T);
        // Field overrides on the template.
        if (kv.has(prefix + "beta")) s.beta = kv.get_double(prefix + "beta");
        if (kv.has(prefix + "gamma")) s.gamma = kv.get_double(prefix + "gamma");
        if (kv.has(prefix + "explore_fraction"))
            s.explore_fraction = kv.get_double(prefix + "explore_fraction");
        if (kv.has(prefix + "epsilon")) s.epsilon = kv.get_double(prefix + "epsilon");
        if (kv.has(prefix + "c")) s.c = kv.get_double(prefix + "c");
        if (kv.has(prefix + "batch_size")) s.batch_size = kv.get_int(prefix + "batch_size");
        s.validate();
        return s;
    }
    const DesignKind kind = design_kind_from_string(kv.get_string(prefix + "kind"));
    if (kind == DesignKind::ClippedDecay || kind == DesignKind::GammaMixture) {
        DesignSpec base = detail::leaf_design_from(kv, prefix + "base.", K, T);
        if (kind == DesignKind::ClippedDecay)
            return DesignSpec::clipped(kv.get_double_or(prefix + "beta", 0.7), base);
        return DesignSpec::gamma_mixture(kv.get_double_or(prefix + "gamma", 0.2), base);
    }
    return detail::leaf_design_from(kv, prefix, K, T);
}

// Build an arm model from `[model]` keys: kind = bernoulli|gaussian,
// means = comma list, sds = comma list (gaussian only).
inline ArmModel model_from_config(const KeyValues& kv, const std::string& prefix = "model.") {
    const std::string kind = kv.get_string(prefix + "kind");
    if (kind == "bernoulli") return ArmModel::bernoulli(kv.get_double_list(prefix + "means"));
    if (kind == "gaussian")
        return ArmModel::gaussian(kv.get_double_list(prefix + "means"),
                                  kv.get_double_list(prefix + "sds"));
    throw config_error(prefix + "kind: expected bernoulli|gaussian, got \"" + kind + "\"");
}

// Build a target from `[target]` keys: either arm = a, or diff = a,b
// (the first arm of the pair is the statistic arm).
inline TargetSpec target_from_config(const KeyValues& kv, const std::string& prefix = "target.") {
    const bool has_arm = kv.has(prefix + "arm");
    const bool has_diff = kv.has(prefix + "diff");
    if (has_arm == has_diff)
        throw config_error(prefix + "arm / " + prefix + "diff: exactly one must be set");
    if (has_arm) return TargetSpec::arm_mean(static_cast<int>(kv.get_int(prefix + "arm")));
    const auto arms = kv.get_int_list(prefix + "diff");
    if (arms.size() != 2) throw config_error(prefix + "diff: expected two arm indices");
    return TargetSpec::diff_means(static_cast<int>(arms[0]), static_cast<int>(arms[1]));
}

inline std::vector<BiasSpec> bias_list_from(const KeyValues& kv, const std::string& key,
                                            const std::string& dflt) {
    std::vector<BiasSpec> out;
    if (kv.has(key)) {
        for (const auto& s : kv.get_list(key)) out.push_back(BiasSpec::from_string(s));
    } else {
        out.push_back(BiasSpec::from_string(dflt));
    }
    return out;
}

// A fully validated experiment plan from a plan file.
inline ExperimentPlan plan_from_config(const KeyValues& kv) {
    ExperimentPlan plan;
    plan.name = kv.get_string("name");
    const std::string kind = kv.get_string("kind");
    if (kind == "calibration")
        plan.kind = ExperimentPlan::Kind::Calibration;
    else if (kind == "sweep")
        plan.kind = ExperimentPlan::Kind::Sweep;
    else if (kind == "bias_ablation")
        plan.kind = ExperimentPlan::Kind::BiasAblation;
    else if (kind == "runtime_scaling")
        plan.kind = ExperimentPlan::Kind::RuntimeScaling;
    else
        throw config_error(
            "kind: expected calibration|sweep|bias_ablation|runtime_scaling, got \"" + kind +
            "\"");

    plan.model = model_from_config(kv);
    const int K = plan.model.K();
    if (kv.has("design.K") && kv.get_int("design.K") != K)
        throw config_error("design.K: does not match the number of model arms");
    plan.t_values = kv.get_int_list("run.T");
    for (auto t : plan.t_values)
        if (t < 1) throw config_error("run.T: values must be >= 1");
    plan.design = design_from_config(kv, K, plan.t_values.front());
    plan.target = target_from_config(kv);
    plan.target.validate(K);

    plan.alpha = kv.get_double_or("run.alpha", 0.1);
    if (kv.has("run.alpha_sweep")) plan.alpha_sweep = kv.get_double_list("run.alpha_sweep");
    plan.B = static_cast<std::size_t>(kv.get_int_or("run.B", 200));
    plan.R = static_cast<int>(kv.get_int_or("run.R", 200));
    if (plan.R < 1) throw config_error("run.R: must be >= 1");
    plan.master_seed = kv.has("run.seed") ? kv.get_uint("run.seed") : 0;
    plan.power_delta = kv.get_double_or("run.power_delta", 0.02);
    plan.bias_kinds = bias_list_from(kv, "run.bias", "bias1");

    plan.grid_lo = kv.get_double_or("grid.lo", 0.0);
    plan.grid_hi = kv.get_double_or("grid.hi", 1.0);
    plan.grid_count = static_cast<int>(kv.get_int_or("grid.count", 100));

    if (kv.has("runtime.G")) {
        plan.g_values.clear();
        for (auto g : kv.get_int_list("runtime.G")) plan.g_values.push_back(static_cast<int>(g));
    }
    if (kv.has("runtime.B")) {
        plan.b_values.clear();
        for (auto b : kv.get_int_list("runtime.B")) plan.b_values.push_back(static_cast<int>(b));
    }
    plan.runtime_reps = static_cast<int>(kv.get_int_or("runtime.reps", 3));

    plan.checks = kv.with_prefix("check.");
    return plan;
}

}  // namespace optimist
