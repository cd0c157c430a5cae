#pragma once

#include <json.hpp>

#include "optimist/inference.hpp"

namespace optimist {

// JSON result schemas. Key names are part of the external interface:
//   test: theta0, cdf_value, reject, observed_stat, B_effective, alpha
//   ci:   interval [lo, hi], accepted, point_estimate, per_null
//         (theta0/cdf_value/reject each), observed_stat, alpha, grid,
//         contiguous, alpha_bound (alpha-split runs only)

inline nlohmann::json to_json(const TestOutcome& out, double alpha) {
    return nlohmann::json{{"theta0", out.theta0},
                          {"cdf_value", out.cdf_value},
                          {"reject", out.reject},
                          {"observed_stat", out.observed_stat},
                          {"B_effective", out.B_effective},
                          {"alpha", alpha}};
}

inline nlohmann::json to_json(const ConfidenceResult& res) {
    nlohmann::json per_null = nlohmann::json::array();
    for (const auto& p : res.per_null)
        per_null.push_back(
            {{"theta0", p.theta0}, {"cdf_value", p.cdf_value}, {"reject", p.reject}});
    nlohmann::json j{{"interval", {res.lo, res.hi}},
                     {"accepted", res.accepted},
                     {"point_estimate", res.point_estimate},
                     {"per_null", per_null},
                     {"observed_stat", res.observed_stat},
                     {"alpha", res.alpha},
                     {"grid", res.grid},
                     {"contiguous", res.contiguous}};
    if (res.alpha_bound > 0.0) j["alpha_bound"] = res.alpha_bound;
    return j;
}

}  // namespace optimist
