#pragma once

// Straight-line recomputation oracles for the statistics the library
// reports: plain textbook formulas, no compensation, no shortcuts. Kept
// independent of the implementation under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "optimist/trajectory.hpp"

namespace testsupport {

struct PlainStats {
    std::int64_t pulls = 0;
    double mean = 0.0;
    double varhat = 0.0;
};

// mean = sum(x)/N, varhat = sum((x - mean)^2)/N, left to right.
inline PlainStats plain_arm_stats(const optimist::Trajectory& h, int arm) {
    PlainStats s;
    double sum = 0.0;
    for (const auto& r : h.records) {
        if (r.arm != arm) continue;
        sum += r.outcome;
        ++s.pulls;
    }
    if (s.pulls == 0) return s;
    s.mean = sum / static_cast<double>(s.pulls);
    double sq = 0.0;
    for (const auto& r : h.records) {
        if (r.arm != arm) continue;
        sq += (r.outcome - s.mean) * (r.outcome - s.mean);
    }
    s.varhat = sq / static_cast<double>(s.pulls);
    return s;
}

// Empirical CDF value by direct counting with <=.
inline double plain_cdf(const std::vector<double>& sims, double x) {
    std::size_t le = 0;
    for (double s : sims)
        if (s <= x) ++le;
    return static_cast<double>(le) / static_cast<double>(sims.size());
}

}  // namespace testsupport
