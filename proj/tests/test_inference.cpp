#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "optimist/inference.hpp"
#include "support/oracles.hpp"

using namespace optimist;

namespace {

Trajectory etc_trajectory(std::uint64_t seed, std::int64_t T = 300,
                          std::vector<double> means = {0.5, 0.5}) {
    const auto design = DesignSpec::etc(2, T, 0.5);
    return run_true_experiment(design, ArmModel::bernoulli(means), T, {seed, 0});
}

}  // namespace

TEST_CASE("normal quantile values", "[inference]") {
    CHECK_THAT(normal_quantile(0.95), Catch::Matchers::WithinAbs(1.6448536269514722, 1e-9));
    CHECK_THAT(normal_quantile(0.975), Catch::Matchers::WithinAbs(1.959963984540054, 1e-9));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THAT(normal_quantile(0.025), Catch::Matchers::WithinAbs(-1.959963984540054, 1e-9));
    CHECK_THAT(normal_quantile(1e-6), Catch::Matchers::WithinAbs(-4.753424308822899, 1e-8));
}

TEST_CASE("empirical cdf uses <= and is right-continuous", "[inference]") {
    const std::vector<double> sims{1.0, 2.0, 3.0};
    CHECK(empirical_cdf(sims, 0.5) == 0.0);
    CHECK(empirical_cdf(sims, 1.0) == 1.0 / 3.0);  // point mass included
    CHECK(empirical_cdf(sims, 2.5) == 2.0 / 3.0);
    CHECK(empirical_cdf(sims, 3.0) == 1.0);
    CHECK(empirical_cdf(sims, 1e308) == 1.0);
    CHECK(empirical_cdf(sims, -1e308) == 0.0);
    // NaN entries are excluded replicates.
    const std::vector<double> with_nan{1.0, std::nan(""), 3.0};
    CHECK(empirical_cdf(with_nan, 1.5) == 0.5);
}

TEST_CASE("acceptance band is closed at its boundaries", "[inference]") {
    BatchResult batch;
    batch.stats.assign(200, 0.0);
    // 10 of 200 sims at/below the observed statistic: cdf exactly 0.05.
    for (std::size_t i = 0; i < 10; ++i) batch.stats[i] = -1.0;
    for (std::size_t i = 10; i < 200; ++i) batch.stats[i] = 1.0;
    const auto at_lower = detail::outcome_from_batch(batch, 0.0, -0.5, 0.1, 0.01);
    CHECK(at_lower.cdf_value == 0.05);
    CHECK_FALSE(at_lower.reject);  // boundary accepts

    // 9 of 200: cdf 0.045 < alpha/2 rejects.
    batch.stats[9] = 1.0;
    const auto below = detail::outcome_from_batch(batch, 0.0, -0.5, 0.1, 0.01);
    CHECK(below.cdf_value == 0.045);
    CHECK(below.reject);
}

TEST_CASE("extreme observed statistic rejects", "[inference]") {
    const Trajectory h = etc_trajectory(1001);
    const auto design = DesignSpec::etc(2, h.T(), 0.5);
    TestConfig tc;
    tc.seed = {9, 0};
    // theta0 far above the data: every simulated statistic lands above the
    // observed one.
    const TestOutcome out = test_point_null(h, design, {TargetSpec::arm_mean(1), 0.99}, tc);
    CHECK(out.cdf_value == 0.0);
    CHECK(out.reject);
    CHECK(out.B_effective == 200);
}

TEST_CASE("test statistic and cdf match a plain recomputation", "[inference]") {
    const Trajectory h = etc_trajectory(77);
    const auto design = DesignSpec::etc(2, h.T(), 0.5);
    const NullSpec null{TargetSpec::arm_mean(1), 0.5};
    TestConfig tc;
    tc.seed = {123, 0};
    const TestOutcome out = test_point_null(h, design, null, tc);

    const auto oracle_stat = testsupport::plain_arm_stats(h, 1);
    CHECK_THAT(out.observed_stat, Catch::Matchers::WithinRel(oracle_stat.mean, 1e-12));

    const NuisanceVector nv = estimate_nuisances(h, null.target, tc.bias);
    const BatchResult batch = batch_simulate(design, null, nv, h.T(), tc.B, tc.seed);
    CHECK(out.cdf_value == testsupport::plain_cdf(batch.stats, out.observed_stat));
}

TEST_CASE("unpulled statistic arm fails fast", "[inference]") {
    Trajectory h;
    h.K = 2;
    h.records = {{1, 2, 0.5}, {2, 2, 0.5}};
    h.validate();
    const auto design = DesignSpec::fixed_uniform(2, 2);
    CHECK_THROWS_AS(test_point_null(h, design, {TargetSpec::arm_mean(1), 0.5}, {}),
                    insufficient_data_error);
}

TEST_CASE("excess exclusions abort with a diagnostic", "[inference]") {
    // One observed step on arm 1; resimulations pull arm 1 only about half
    // the time, far beyond the 1% exclusion tolerance.
    Trajectory h;
    h.K = 2;
    h.records = {{1, 1, 0.5}};
    h.validate();
    // Give arm 2 a pull so nuisances exist, horizon 2.
    h.records.push_back({2, 2, 0.25});
    const auto design = DesignSpec::fixed_uniform(2, 2);
    TestConfig tc;
    tc.seed = {3, 0};
    CHECK_THROWS_WITH(test_point_null(h, design, {TargetSpec::arm_mean(1), 0.5}, tc),
                      Catch::Matchers::ContainsSubstring("exceeds"));
}

TEST_CASE("confidence interval accepts around the truth and always keeps the statistic",
          "[inference]") {
    const Trajectory h = etc_trajectory(2024, 400);
    const auto design = DesignSpec::etc(2, 400, 0.5);
    CiConfig cc;
    cc.grid = linspace_grid(0.0, 1.0, 101);
    cc.seed = {7, 0};
    const ConfidenceResult res = confidence_interval(h, design, TargetSpec::arm_mean(1), cc);

    REQUIRE_FALSE(res.accepted.empty());
    CHECK(std::find(res.accepted.begin(), res.accepted.end(), res.observed_stat) !=
          res.accepted.end());
    CHECK(res.contains(res.point_estimate));
    CHECK(std::find(res.accepted.begin(), res.accepted.end(), res.point_estimate) !=
          res.accepted.end());
    CHECK(res.contains(0.5));  // truth is covered on this seed
    CHECK(res.lo == res.accepted.front());
    CHECK(res.hi == res.accepted.back());
    CHECK(res.per_null.size() == 101);
    CHECK(std::is_sorted(res.accepted.begin(), res.accepted.end()));
}

TEST_CASE("zero-variance data collapses the interval to the observed mean", "[inference]") {
    Trajectory h;
    h.K = 2;
    for (std::int64_t t = 1; t <= 40; ++t)
        h.records.push_back({t, t % 2 == 0 ? 2 : 1, 0.5});
    h.validate();
    const auto design = DesignSpec::fixed_uniform(2, 40);
    CiConfig cc;
    cc.grid = linspace_grid(0.0, 1.0, 101);  // includes 0.5 exactly
    cc.seed = {2, 0};
    const ConfidenceResult res = confidence_interval(h, design, TargetSpec::arm_mean(1), cc);
    // Every simulated statistic equals theta0 exactly, so every grid null is
    // rejected (cdf lands on 0 or 1); the observed mean survives via the
    // always-include rule and is the point estimate.
    REQUIRE(res.accepted.size() == 1);
    CHECK(res.accepted[0] == 0.5);
    CHECK(res.point_estimate == 0.5);
    CHECK(res.width() == 0.0);
}

TEST_CASE("common random numbers make per-null values match standalone tests", "[inference]") {
    const Trajectory h = etc_trajectory(555, 200);
    const auto design = DesignSpec::etc(2, 200, 0.5);
    CiConfig cc;
    cc.grid = {0.3, 0.5, 0.7};
    cc.seed = {99, 0};
    REQUIRE(cc.common_random_numbers);
    const ConfidenceResult res = confidence_interval(h, design, TargetSpec::arm_mean(1), cc);
    for (std::size_t i = 0; i < cc.grid.size(); ++i) {
        TestConfig tc;
        tc.seed = {99, 0};
        const TestOutcome out =
            test_point_null(h, design, {TargetSpec::arm_mean(1), cc.grid[i]}, tc);
        CHECK(res.per_null[i].cdf_value == out.cdf_value);
        CHECK(res.per_null[i].reject == out.reject);
    }
}

TEST_CASE("disjoint stream blocks change the draws but not the geometry", "[inference]") {
    const Trajectory h = etc_trajectory(556, 200);
    const auto design = DesignSpec::etc(2, 200, 0.5);
    CiConfig crn;
    crn.grid = linspace_grid(0.0, 1.0, 51);
    crn.seed = {11, 0};
    CiConfig split = crn;
    split.common_random_numbers = false;
    const auto a = confidence_interval(h, design, TargetSpec::arm_mean(1), crn);
    const auto b = confidence_interval(h, design, TargetSpec::arm_mean(1), split);
    CHECK(a.observed_stat == b.observed_stat);
    // Same data, same level: the intervals agree to within a grid step.
    CHECK(std::abs(a.lo - b.lo) <= 0.1);
    CHECK(std::abs(a.hi - b.hi) <= 0.1);
}

TEST_CASE("ci runs deterministically across worker counts", "[inference]") {
    const Trajectory h = etc_trajectory(77, 200);
    const auto design = DesignSpec::etc(2, 200, 0.5);
    CiConfig cc;
    cc.grid = linspace_grid(0.0, 1.0, 41);
    cc.seed = {5, 0};
    cc.workers = 1;
    const auto one = confidence_interval(h, design, TargetSpec::arm_mean(1), cc);
    cc.workers = 4;
    const auto four = confidence_interval(h, design, TargetSpec::arm_mean(1), cc);
    CHECK(one.accepted == four.accepted);
    CHECK(one.point_estimate == four.point_estimate);
    for (std::size_t i = 0; i < one.per_null.size(); ++i)
        CHECK(one.per_null[i].cdf_value == four.per_null[i].cdf_value);
}

TEST_CASE("vacuous bound makes the unbounded construction match the plain one", "[inference]") {
    const Trajectory h = etc_trajectory(31, 200);
    const auto design = DesignSpec::etc(2, 200, 0.5);
    CiConfig cc;
    cc.seed = {1, 0};
    cc.alpha = 0.1;
    const auto split = ci_unbounded(
        h, design, TargetSpec::arm_mean(1), 0.0, 0.1,
        [] { return std::pair<double, double>{0.0, 1.0}; }, 100, cc);
    CiConfig plain = cc;
    plain.grid = linspace_grid(0.0, 1.0, 100);
    const auto direct = confidence_interval(h, design, TargetSpec::arm_mean(1), plain);
    CHECK(split.lo == direct.lo);
    CHECK(split.hi == direct.hi);
    CHECK(split.point_estimate == direct.point_estimate);
    CHECK(split.alpha_bound == 0.0);
}

TEST_CASE("unbounded construction stays inside the provided bound", "[inference]") {
    const Trajectory h = etc_trajectory(32, 200);
    const auto design = DesignSpec::etc(2, 200, 0.5);
    CiConfig cc;
    cc.seed = {1, 0};
    const auto res = ci_unbounded(
        h, design, TargetSpec::arm_mean(1), 0.01, 0.09,
        [] { return std::pair<double, double>{-2.0, 2.0}; }, 100, cc);
    CHECK(res.lo >= -2.0);
    CHECK(res.hi <= 2.0);
    CHECK(res.alpha_bound == 0.01);
    CHECK(res.alpha == 0.09);
}

TEST_CASE("bad bounds are configuration errors", "[inference]") {
    const Trajectory h = etc_trajectory(33, 100);
    const auto design = DesignSpec::etc(2, 100, 0.5);
    CiConfig cc;
    const auto inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ci_unbounded(h, design, TargetSpec::arm_mean(1), 0.01, 0.09,
                                 [&] { return std::pair<double, double>{0.0, inf}; }, 10, cc),
                    config_error);
    CHECK_THROWS_AS(ci_unbounded(h, design, TargetSpec::arm_mean(1), 0.01, 0.09,
                                 [] { return std::pair<double, double>{1.0, 1.0}; }, 10, cc),
                    config_error);
}

TEST_CASE("wald baseline matches the normal-quantile arithmetic", "[inference]") {
    // 100 pulls of arm 1 with mean 0.5 and varhat 0.25.
    Trajectory h;
    h.K = 1;
    for (std::int64_t t = 1; t <= 100; ++t) h.records.push_back({t, 1, t % 2 ? 0.0 : 1.0});
    h.validate();
    const WaldInterval w = wald_baseline(h, TargetSpec::arm_mean(1), 0.1);
    CHECK_THAT(w.lo, Catch::Matchers::WithinAbs(0.41776, 1e-4));
    CHECK_THAT(w.hi, Catch::Matchers::WithinAbs(0.58224, 1e-4));
    CHECK(w.estimate == 0.5);

    // alpha = 1 collapses to a zero-width interval.
    const WaldInterval degenerate = wald_baseline(h, TargetSpec::arm_mean(1), 1.0);
    CHECK(degenerate.lo == degenerate.hi);

    // zero variance collapses too.
    Trajectory flat;
    flat.K = 1;
    for (std::int64_t t = 1; t <= 10; ++t) flat.records.push_back({t, 1, 0.3});
    flat.validate();
    const WaldInterval zero = wald_baseline(flat, TargetSpec::arm_mean(1), 0.1);
    CHECK(zero.lo == 0.3);
    CHECK(zero.hi == 0.3);
}

TEST_CASE("wald difference target sums the variances", "[inference]") {
    Trajectory h;
    h.K = 2;
    std::int64_t t = 1;
    for (int i = 0; i < 100; ++i) h.records.push_back({t++, 1, i % 2 ? 0.0 : 1.0});
    for (int i = 0; i < 50; ++i) h.records.push_back({t++, 2, i % 2 ? 0.0 : 0.5});
    h.validate();
    const WaldInterval w = wald_baseline(h, TargetSpec::diff_means(1, 2), 0.1);
    const double hw = 1.6448536269514722 * std::sqrt(0.25 / 100.0 + 0.0625 / 50.0);
    CHECK_THAT(w.estimate, Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_THAT(w.hi - w.estimate, Catch::Matchers::WithinAbs(hw, 1e-9));

    Trajectory tiny;
    tiny.K = 2;
    tiny.records = {{1, 1, 0.5}, {2, 1, 0.5}, {3, 2, 0.5}};
    tiny.validate();
    CHECK_THROWS_AS(wald_baseline(tiny, TargetSpec::diff_means(1, 2), 0.1),
                    insufficient_data_error);
}

TEST_CASE("difference-target test centers on the shifted null", "[inference]") {
    // Bernoulli arms with true difference 0.2; the test should accept the
    // true difference and reject a far one.
    const auto design = DesignSpec::fixed_uniform(2, 600);
    const auto model = ArmModel::bernoulli({0.7, 0.5});
    const Trajectory h = run_true_experiment(design, model, 600, {64, 0});
    TestConfig tc;
    tc.seed = {65, 0};
    const auto at_truth =
        test_point_null(h, design, {TargetSpec::diff_means(1, 2), 0.2}, tc);
    const auto far =
        test_point_null(h, design, {TargetSpec::diff_means(1, 2), -0.4}, tc);
    CHECK_FALSE(at_truth.reject);
    CHECK(far.reject);
}
