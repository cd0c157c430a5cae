#pragma once

// One-sample Kolmogorov-Smirnov utilities for the distribution oracles.
// Independent of the library's statistics code on purpose.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

// KS statistic D_n = sup_x |F_n(x) - F(x)| against a reference CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

// Asymptotic critical value at significance alpha: sqrt(ln(2/alpha)/2)/sqrt(n).
inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(std::log(2.0 / alpha) / 2.0) / std::sqrt(static_cast<double>(n));
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline std::function<double(double)> normal_cdf_fn(double mean, double sd) {
    return [mean, sd](double x) { return std_normal_cdf((x - mean) / sd); };
}

}  // namespace testsupport
