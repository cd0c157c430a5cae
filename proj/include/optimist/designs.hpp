#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "optimist/errors.hpp"
#include "optimist/rng.hpp"

namespace optimist {

enum class DesignKind {
    FixedUniform,
    Etc,
    Ucb,
    EpsGreedy,
    ClippedDecay,
    GammaMixture,
    BatchedThompson,
};

inline std::string to_string(DesignKind k) {
    switch (k) {
        case DesignKind::FixedUniform: return "fixed_uniform";
        case DesignKind::Etc: return "etc";
        case DesignKind::Ucb: return "ucb";
        case DesignKind::EpsGreedy: return "eps_greedy";
        case DesignKind::ClippedDecay: return "clipped_decay";
        case DesignKind::GammaMixture: return "gamma_mixture";
        case DesignKind::BatchedThompson: return "batched_thompson";
    }
    return "?";
}

inline DesignKind design_kind_from_string(const std::string& s) {
    if (s == "fixed_uniform") return DesignKind::FixedUniform;
    if (s == "etc") return DesignKind::Etc;
    if (s == "ucb") return DesignKind::Ucb;
    if (s == "eps_greedy") return DesignKind::EpsGreedy;
    if (s == "clipped_decay") return DesignKind::ClippedDecay;
    if (s == "gamma_mixture") return DesignKind::GammaMixture;
    if (s == "batched_thompson") return DesignKind::BatchedThompson;
    throw config_error("design.kind: unknown value \"" + s + "\"");
}

// UCB exploration bonus sqrt(2 log T / N).
inline double ucb_bonus(std::int64_t pulls, std::int64_t horizon) {
    return std::sqrt(2.0 * std::log(static_cast<double>(horizon)) /
                     static_cast<double>(pulls));
}

// Probability of the forced-uniform branch of the decaying-exploration
// wrapper at time t: t^(-beta).
inline double clip_probability(std::int64_t t, double beta) {
    return std::pow(static_cast<double>(t), -beta);
}

// A bandit sampling scheme pi with its parameters. The horizon T is a
// construction parameter (UCB's bonus and the decay wrapper need it) and a
// design cannot be run past its configured T. Wrapper kinds (ClippedDecay,
// GammaMixture) carry a base spec; one level of nesting, base must be a
// leaf kind.
struct DesignSpec {
    DesignKind kind = DesignKind::FixedUniform;
    int K = 1;
    std::int64_t T = 1;

    enum class ExploreStyle { Uniform, RoundRobin };

    // etc
    double explore_fraction = 0.5;
    ExploreStyle explore_style = ExploreStyle::Uniform;
    // eps_greedy: fixed epsilon, or decaying eps_t = min(1, c / t)
    double epsilon = 0.1;
    bool epsilon_decay = false;
    double c = 1.0;
    // clipped_decay
    double beta = 0.7;
    // gamma_mixture
    double gamma = 0.2;
    // batched_thompson
    std::int64_t batch_size = 100;

    std::shared_ptr<DesignSpec> base;

    DesignSpec with_horizon(int K_, std::int64_t T_) const {
        DesignSpec s = *this;
        s.K = K_;
        s.T = T_;
        if (s.base) {
            auto b = std::make_shared<DesignSpec>(*s.base);
            b->K = K_;
            b->T = T_;
            s.base = b;
        }
        return s;
    }

    void validate() const {
        if (K < 1) throw config_error("design.K: must be >= 1");
        if (T < 0) throw config_error("design.T: must be >= 0");
        switch (kind) {
            case DesignKind::Etc:
                if (!(explore_fraction > 0.0 && explore_fraction < 1.0))
                    throw config_error("design.explore_fraction: must be in (0,1)");
                break;
            case DesignKind::EpsGreedy:
                if (epsilon_decay) {
                    if (!(c > 0.0)) throw config_error("design.c: must be > 0");
                } else if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
                    throw config_error("design.epsilon: must be in [0,1]");
                }
                break;
            case DesignKind::ClippedDecay:
                if (!(beta >= 0.0 && beta <= 1.0))
                    throw config_error("design.beta: must be in [0,1]");
                break;
            case DesignKind::GammaMixture:
                if (!(gamma > 0.0 && gamma <= 1.0))
                    throw config_error("design.gamma: must be in (0,1]");
                break;
            case DesignKind::BatchedThompson:
                if (batch_size < 1) throw config_error("design.batch_size: must be >= 1");
                break;
            default: break;
        }
        const bool is_wrapper =
            kind == DesignKind::ClippedDecay || kind == DesignKind::GammaMixture;
        if (is_wrapper) {
            if (!base) throw config_error("design." + to_string(kind) + ": missing base design");
            if (base->kind == DesignKind::ClippedDecay ||
                base->kind == DesignKind::GammaMixture)
                throw config_error("design.base: nested wrappers are not supported");
            DesignSpec b = *base;
            b.K = K;
            b.T = T;
            b.validate();
        } else if (base) {
            throw config_error("design." + to_string(kind) + ": base only valid for wrappers");
        }
    }

    // ---- constructors for the catalog entries ----

    static DesignSpec fixed_uniform(int K, std::int64_t T) {
        DesignSpec s;
        s.kind = DesignKind::FixedUniform;
        s.K = K;
        s.T = T;
        return s;
    }

    static DesignSpec etc(int K, std::int64_t T, double fraction,
                          ExploreStyle style = ExploreStyle::Uniform) {
        DesignSpec s;
        s.kind = DesignKind::Etc;
        s.K = K;
        s.T = T;
        s.explore_fraction = fraction;
        s.explore_style = style;
        s.validate();
        return s;
    }

    static DesignSpec ucb(int K, std::int64_t T) {
        DesignSpec s;
        s.kind = DesignKind::Ucb;
        s.K = K;
        s.T = T;
        return s;
    }

    static DesignSpec eps_greedy(int K, std::int64_t T, double epsilon) {
        DesignSpec s;
        s.kind = DesignKind::EpsGreedy;
        s.K = K;
        s.T = T;
        s.epsilon = epsilon;
        s.validate();
        return s;
    }

    static DesignSpec greedy_decaying(int K, std::int64_t T, double c) {
        DesignSpec s;
        s.kind = DesignKind::EpsGreedy;
        s.K = K;
        s.T = T;
        s.epsilon_decay = true;
        s.c = c;
        s.validate();
        return s;
    }

    static DesignSpec clipped(double beta, DesignSpec base_spec) {
        DesignSpec s;
        s.kind = DesignKind::ClippedDecay;
        s.K = base_spec.K;
        s.T = base_spec.T;
        s.beta = beta;
        s.base = std::make_shared<DesignSpec>(std::move(base_spec));
        s.validate();
        return s;
    }

    static DesignSpec gamma_mixture(double gamma, DesignSpec base_spec) {
        DesignSpec s;
        s.kind = DesignKind::GammaMixture;
        s.K = base_spec.K;
        s.T = base_spec.T;
        s.gamma = gamma;
        s.base = std::make_shared<DesignSpec>(std::move(base_spec));
        s.validate();
        return s;
    }

    static DesignSpec batched_thompson(int K, std::int64_t T, std::int64_t batch) {
        DesignSpec s;
        s.kind = DesignKind::BatchedThompson;
        s.K = K;
        s.T = T;
        s.batch_size = batch;
        s.validate();
        return s;
    }
};

// Mutable per-run state of a design. One instance per simulated trajectory;
// single-owner, mutated sequentially. The state after processing a prefix is
// a pure function of (spec, prefix, stream), so replay is deterministic.
class Design {
public:
    explicit Design(const DesignSpec& spec) : spec_(spec) {
        spec_.validate();
        pulls_.assign(spec_.K, 0);
        sums_.assign(spec_.K, 0.0);
    }
    virtual ~Design() = default;

    const DesignSpec& spec() const { return spec_; }
    int K() const { return spec_.K; }
    std::int64_t horizon() const { return spec_.T; }
    // Next time index (1-based).
    std::int64_t t() const { return steps_done_ + 1; }
    std::int64_t steps_done() const { return steps_done_; }
    std::int64_t pulls(int arm) const { return pulls_[arm - 1]; }

    // Arm to pull at time t(). Deterministic rules consume no randomness.
    int select_arm(RngStream& rng) {
        if (steps_done_ >= spec_.T)
            throw horizon_error("design horizon exhausted: t=" + std::to_string(t()) +
                                " > T=" + std::to_string(spec_.T));
        return do_select(rng);
    }

    // Incorporate the observed (arm, outcome) for time t() and advance.
    void update(int arm, double outcome) {
        pulls_[arm - 1] += 1;
        sums_[arm - 1] += outcome;
        ++steps_done_;
        post_update(arm, outcome);
    }

protected:
    virtual int do_select(RngStream& rng) = 0;
    virtual void post_update(int arm, double outcome) {}

    double running_mean(int arm) const {
        return sums_[arm - 1] / static_cast<double>(pulls_[arm - 1]);
    }

    // Lowest-index arm with zero pulls, or 0 if all have been pulled.
    int first_unpulled() const {
        for (int a = 1; a <= spec_.K; ++a)
            if (pulls_[a - 1] == 0) return a;
        return 0;
    }

    // Greedy choice on running sample means; unpulled arms are served
    // round-robin first; ties break to the lowest index.
    int greedy_arm() const {
        if (int a = first_unpulled(); a != 0) return a;
        int best = 1;
        double best_mean = running_mean(1);
        for (int a = 2; a <= spec_.K; ++a) {
            double m = running_mean(a);
            if (m > best_mean) {
                best = a;
                best_mean = m;
            }
        }
        return best;
    }

    int uniform_arm(RngStream& rng) const {
        return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec_.K))) + 1;
    }

    DesignSpec spec_;
    std::int64_t steps_done_ = 0;
    std::vector<std::int64_t> pulls_;
    std::vector<double> sums_;
};

namespace detail {

class FixedUniformDesign final : public Design {
public:
    using Design::Design;

private:
    int do_select(RngStream& rng) override { return uniform_arm(rng); }
};

// Explore-then-commit. Exploration lasts floor(fraction * T) steps, either
// uniformly at random or round-robin; the commit arm is the argmax of the
// exploration-phase sample means (ties to the lowest index), fixed exactly
// once when the update count crosses the boundary.
class EtcDesign final : public Design {
public:
    explicit EtcDesign(const DesignSpec& spec) : Design(spec) {
        explore_steps_ =
            static_cast<std::int64_t>(std::floor(spec.explore_fraction *
                                                 static_cast<double>(spec.T)));
        if (explore_steps_ == 0) commit();
    }

    int committed_arm() const { return committed_; }

private:
    int do_select(RngStream& rng) override {
        if (steps_done_ < explore_steps_) {
            if (spec_.explore_style == DesignSpec::ExploreStyle::RoundRobin)
                return static_cast<int>(steps_done_ % spec_.K) + 1;
            return uniform_arm(rng);
        }
        return committed_;
    }

    void post_update(int, double) override {
        if (steps_done_ == explore_steps_ && committed_ == 0) commit();
    }

    void commit() {
        int best = 1;
        double best_mean = -std::numeric_limits<double>::infinity();
        for (int a = 1; a <= spec_.K; ++a) {
            if (pulls_[a - 1] == 0) continue;
            double m = running_mean(a);
            if (m > best_mean) {
                best = a;
                best_mean = m;
            }
        }
        committed_ = best;
    }

    std::int64_t explore_steps_ = 0;
    int committed_ = 0;
};

// UCB with bonus sqrt(2 log T / N). Each arm is pulled exactly once (in
// index order) before any bonus comparison; afterwards the choice is the
// deterministic argmax of mean + bonus, ties to the lowest index. Consumes
// no randomness. Per-arm bonuses are cached and refreshed only on pull.
class UcbDesign final : public Design {
public:
    explicit UcbDesign(const DesignSpec& spec)
        : Design(spec),
          coef_(std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::int64_t>(spec.T, 1))))),
          bonus_(spec.K, 0.0) {}

private:
    int do_select(RngStream&) override {
        if (int a = first_unpulled(); a != 0) return a;
        int best = 1;
        double best_score = running_mean(1) + bonus_[0];
        for (int a = 2; a <= spec_.K; ++a) {
            double s = running_mean(a) + bonus_[a - 1];
            if (s > best_score) {
                best = a;
                best_score = s;
            }
        }
        return best;
    }

    void post_update(int arm, double) override {
        bonus_[arm - 1] = coef_ / std::sqrt(static_cast<double>(pulls_[arm - 1]));
    }

    double coef_;
    std::vector<double> bonus_;
};

// Greedy on sample means with an exploration kick: with probability
// epsilon (fixed) or min(1, c/t) (decaying) pull a uniform arm, otherwise
// the greedy arm. Unpulled arms are served first without consuming
// randomness.
class EpsGreedyDesign final : public Design {
public:
    using Design::Design;

private:
    int do_select(RngStream& rng) override {
        if (int a = first_unpulled(); a != 0) return a;
        double eps = spec_.epsilon;
        if (spec_.epsilon_decay) eps = std::min(1.0, spec_.c / static_cast<double>(t()));
        if (eps > 0.0 && rng.uniform01() < eps) return uniform_arm(rng);
        return greedy_arm();
    }
};

// Decaying-exploration wrapper: at time t, with probability t^(-beta) pull
// a uniform arm, otherwise defer to the base design. The base sees every
// update regardless of which branch picked the arm.
class ClippedDecayDesign final : public Design {
public:
    ClippedDecayDesign(const DesignSpec& spec, std::unique_ptr<Design> base)
        : Design(spec), base_(std::move(base)) {}

    std::int64_t uniform_branches() const { return uniform_branches_; }

private:
    int do_select(RngStream& rng) override {
        const double b = rng.uniform01();
        if (b <= clip_probability(t(), spec_.beta)) {
            ++uniform_branches_;
            return uniform_arm(rng);
        }
        return base_->select_arm(rng);
    }

    void post_update(int arm, double outcome) override { base_->update(arm, outcome); }

    std::unique_ptr<Design> base_;
    std::int64_t uniform_branches_ = 0;
};

// Fixed-rate uniform mixture: with probability gamma pull a uniform arm,
// otherwise defer to the base design.
class GammaMixtureDesign final : public Design {
public:
    GammaMixtureDesign(const DesignSpec& spec, std::unique_ptr<Design> base)
        : Design(spec), base_(std::move(base)) {}

    std::int64_t uniform_branches() const { return uniform_branches_; }

private:
    int do_select(RngStream& rng) override {
        if (rng.uniform01() < spec_.gamma) {
            ++uniform_branches_;
            return uniform_arm(rng);
        }
        return base_->select_arm(rng);
    }

    void post_update(int arm, double outcome) override { base_->update(arm, outcome); }

    std::unique_ptr<Design> base_;
    std::int64_t uniform_branches_ = 0;
};

// Batched Thompson sampling with Beta(1,1) priors over Bernoulli arms.
// Arm draws use the posterior frozen at the last batch boundary; the
// posterior refreshes every batch_size updates. Outcomes must be 0 or 1.
class BatchedThompsonDesign final : public Design {
public:
    explicit BatchedThompsonDesign(const DesignSpec& spec)
        : Design(spec),
          successes_(spec.K, 0),
          failures_(spec.K, 0),
          frozen_successes_(spec.K, 0),
          frozen_failures_(spec.K, 0) {}

    // Frozen posterior parameters (alpha, beta) for an arm; test hook.
    std::pair<double, double> frozen_posterior(int arm) const {
        return {1.0 + static_cast<double>(frozen_successes_[arm - 1]),
                1.0 + static_cast<double>(frozen_failures_[arm - 1])};
    }

private:
    int do_select(RngStream& rng) override {
        int best = 1;
        double best_draw = -1.0;
        for (int a = 1; a <= spec_.K; ++a) {
            double d = rng.beta(1.0 + static_cast<double>(frozen_successes_[a - 1]),
                                1.0 + static_cast<double>(frozen_failures_[a - 1]));
            if (d > best_draw) {
                best = a;
                best_draw = d;
            }
        }
        return best;
    }

    void post_update(int arm, double outcome) override {
        if (outcome == 1.0) {
            successes_[arm - 1] += 1;
        } else if (outcome == 0.0) {
            failures_[arm - 1] += 1;
        } else {
            throw data_error("batched_thompson: outcome " + std::to_string(outcome) +
                             " is not in {0,1}");
        }
        if (steps_done_ % spec_.batch_size == 0) {
            frozen_successes_ = successes_;
            frozen_failures_ = failures_;
        }
    }

    std::vector<std::int64_t> successes_;
    std::vector<std::int64_t> failures_;
    std::vector<std::int64_t> frozen_successes_;
    std::vector<std::int64_t> frozen_failures_;
};

}  // namespace detail

inline std::unique_ptr<Design> make_design(const DesignSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case DesignKind::FixedUniform:
            return std::make_unique<detail::FixedUniformDesign>(spec);
        case DesignKind::Etc: return std::make_unique<detail::EtcDesign>(spec);
        case DesignKind::Ucb: return std::make_unique<detail::UcbDesign>(spec);
        case DesignKind::EpsGreedy: return std::make_unique<detail::EpsGreedyDesign>(spec);
        case DesignKind::ClippedDecay: {
            DesignSpec b = spec.base->with_horizon(spec.K, spec.T);
            return std::make_unique<detail::ClippedDecayDesign>(spec, make_design(b));
        }
        case DesignKind::GammaMixture: {
            DesignSpec b = spec.base->with_horizon(spec.K, spec.T);
            return std::make_unique<detail::GammaMixtureDesign>(spec, make_design(b));
        }
        case DesignKind::BatchedThompson:
            return std::make_unique<detail::BatchedThompsonDesign>(spec);
    }
    throw config_error("design.kind: unhandled kind");
}

// A named, parameter-documented design template. `make` instantiates the
// template for a given arm count and horizon.
struct CatalogEntry {
    std::string name;
    std::string summary;
    std::string params_doc;
    DesignSpec (*make)(int K, std::int64_t T);
};

// Every sampling scheme used in the experiments, under stable names.
inline const std::vector<CatalogEntry>& design_catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"etc", "explore-then-commit: uniform exploration for half the horizon, then commit",
         "explore_fraction=0.5, explore_style=uniform",
         [](int K, std::int64_t T) { return DesignSpec::etc(K, T, 0.5); }},
        {"etc_tenth",
         "explore-then-commit variant: round-robin each arm T/(5K) of the horizon, commit at T/5",
         "explore_fraction=0.2, explore_style=round_robin",
         [](int K, std::int64_t T) {
             return DesignSpec::etc(K, T, 0.2, DesignSpec::ExploreStyle::RoundRobin);
         }},
        {"ucb", "upper confidence bound with bonus sqrt(2 log T / N)", "(none)",
         [](int K, std::int64_t T) { return DesignSpec::ucb(K, T); }},
        {"eps_greedy", "epsilon-greedy on running sample means", "epsilon=0.1",
         [](int K, std::int64_t T) { return DesignSpec::eps_greedy(K, T, 0.1); }},
        {"clipped_ucb", "UCB with forced uniform exploration at decaying rate t^(-beta)",
         "beta=0.7, base=ucb",
         [](int K, std::int64_t T) {
             return DesignSpec::clipped(0.7, DesignSpec::ucb(K, T));
         }},
        {"clipped_greedy", "greedy with forced uniform exploration at decaying rate t^(-beta)",
         "beta=0.7, base=eps_greedy(epsilon=0)",
         [](int K, std::int64_t T) {
             return DesignSpec::clipped(0.7, DesignSpec::eps_greedy(K, T, 0.0));
         }},
        {"gamma_mixture",
         "fixed-rate uniform mixture over a reward-maximizing rule (greedy with a uniform pull "
         "at rate min(1, c/t))",
         "gamma=0.2, c=1.0",
         [](int K, std::int64_t T) {
             return DesignSpec::gamma_mixture(0.2, DesignSpec::greedy_decaying(K, T, 1.0));
         }},
        {"batched_thompson",
         "Thompson sampling with Beta(1,1) priors over Bernoulli arms, posterior refresh at "
         "batch boundaries",
         "batch_size=100",
         [](int K, std::int64_t T) { return DesignSpec::batched_thompson(K, T, 100); }},
        {"fixed_uniform", "uniform arm at every step (non-adaptive reference design)", "(none)",
         [](int K, std::int64_t T) { return DesignSpec::fixed_uniform(K, T); }},
    };
    return entries;
}

inline const CatalogEntry* find_catalog_entry(const std::string& name) {
    for (const auto& e : design_catalog())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace optimist
