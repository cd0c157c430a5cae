#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optimist/errors.hpp"

namespace optimist {

// One observation of an experiment: at time t (1-based), arm `arm`
// (1-based, in [1, K]) was pulled and produced `outcome`.
struct Record {
    std::int64_t t;
    int arm;
    double outcome;

    bool operator==(const Record&) const = default;
};

// The full history H_T of one experiment run: a time-ordered sequence of
// (arm, outcome) pairs. Immutable after construction; validate() enforces
// the schema (times exactly 1..T, arms in [1, K]).
struct Trajectory {
    std::vector<Record> records;
    int K = 1;

    std::int64_t T() const { return static_cast<std::int64_t>(records.size()); }

    void validate() const {
        if (K < 1) throw data_error("trajectory: K must be >= 1, got " + std::to_string(K));
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (r.t != static_cast<std::int64_t>(i) + 1)
                throw data_error("trajectory: record " + std::to_string(i + 1) +
                                 " has t=" + std::to_string(r.t) +
                                 ", expected t=" + std::to_string(i + 1));
            if (r.arm < 1 || r.arm > K)
                throw data_error("trajectory: record t=" + std::to_string(r.t) + " has arm " +
                                 std::to_string(r.arm) + " outside [1, " + std::to_string(K) + "]");
        }
    }
};

// Per-arm pull counts, sample means and plug-in variances (divide-by-N,
// not N-1, matching the variance estimator used by the test procedure).
// Arms with zero pulls have no mean/varhat; callers must check defined().
class ArmStats {
public:
    explicit ArmStats(int K = 0) : pulls_(K, 0), mean_(K, 0.0), varhat_(K, 0.0) {}

    int K() const { return static_cast<int>(pulls_.size()); }
    std::int64_t pulls(int arm) const { return pulls_.at(idx(arm)); }
    bool defined(int arm) const { return pulls_.at(idx(arm)) > 0; }

    double mean(int arm) const {
        require_defined(arm, "mean");
        return mean_[idx(arm)];
    }
    double varhat(int arm) const {
        require_defined(arm, "varhat");
        return varhat_[idx(arm)];
    }

    std::optional<double> mean_opt(int arm) const {
        return defined(arm) ? std::optional<double>(mean_[idx(arm)]) : std::nullopt;
    }
    std::optional<double> varhat_opt(int arm) const {
        return defined(arm) ? std::optional<double>(varhat_[idx(arm)]) : std::nullopt;
    }

    void set(int arm, std::int64_t pulls, double mean, double varhat) {
        pulls_.at(idx(arm)) = pulls;
        mean_[idx(arm)] = mean;
        varhat_[idx(arm)] = varhat;
    }

private:
    std::size_t idx(int arm) const {
        if (arm < 1 || arm > K())
            throw data_error("arm index " + std::to_string(arm) + " outside [1, " +
                             std::to_string(K()) + "]");
        return static_cast<std::size_t>(arm - 1);
    }
    void require_defined(int arm, const char* what) const {
        if (!defined(arm))
            throw insufficient_data_error(std::string(what) + " undefined: arm " +
                                          std::to_string(arm) + " has zero pulls");
    }

    std::vector<std::int64_t> pulls_;
    std::vector<double> mean_;
    std::vector<double> varhat_;
};

namespace detail {

// Compensated (Kahan) accumulator. Trajectories can reach 10^6 records,
// so plain summation would leak precision in the stats invariants.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// Sample mean of one arm's outcomes, compensated summation in record order.
// Shared by compute_arm_stats and the simulation hot path so the observed
// and simulated statistics go through identical arithmetic.
inline std::optional<double> arm_mean(const Trajectory& h, int arm) {
    detail::KahanSum s;
    std::int64_t n = 0;
    for (const auto& r : h.records) {
        if (r.arm == arm) {
            s.add(r.outcome);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s.sum / static_cast<double>(n);
}

// Two-pass per-arm statistics: mean = sum/N, then varhat = sum((x-mean)^2)/N,
// both with compensated accumulation. An arm whose outcomes are all equal
// gets varhat exactly 0 (min == max short-circuit).
inline ArmStats compute_arm_stats(const Trajectory& h) {
    const int K = h.K;
    ArmStats stats(K);
    std::vector<detail::KahanSum> sums(K);
    std::vector<std::int64_t> counts(K, 0);
    std::vector<double> lo(K, 0.0), hi(K, 0.0);

    for (const auto& r : h.records) {
        const int a = r.arm - 1;
        if (counts[a] == 0) {
            lo[a] = hi[a] = r.outcome;
        } else {
            lo[a] = std::min(lo[a], r.outcome);
            hi[a] = std::max(hi[a], r.outcome);
        }
        sums[a].add(r.outcome);
        ++counts[a];
    }

    std::vector<double> means(K, 0.0);
    for (int a = 0; a < K; ++a)
        if (counts[a] > 0) means[a] = sums[a].sum / static_cast<double>(counts[a]);

    std::vector<detail::KahanSum> sq(K);
    for (const auto& r : h.records) {
        const double d = r.outcome - means[r.arm - 1];
        sq[r.arm - 1].add(d * d);
    }

    for (int a = 0; a < K; ++a) {
        if (counts[a] == 0) continue;
        double v = (lo[a] == hi[a]) ? 0.0 : sq[a].sum / static_cast<double>(counts[a]);
        stats.set(a + 1, counts[a], means[a], v);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Trajectory CSV: header "t,arm,outcome", rows sorted by t, 1-based t and
// arm, decimal outcome, UTF-8 with LF line endings. Outcomes are written
// with 17 significant digits so a read-back round-trips bit-exactly.
// ---------------------------------------------------------------------------

inline std::string trajectory_to_csv(const Trajectory& h) {
    std::string out = "t,arm,outcome\n";
    char buf[64];
    for (const auto& r : h.records) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%.17g\n", static_cast<long long>(r.t), r.arm,
                      r.outcome);
        out += buf;
    }
    return out;
}

inline void write_trajectory_csv(const Trajectory& h, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open for writing: " + path);
    f << trajectory_to_csv(h);
    if (!f) throw data_error("write failed: " + path);
}

// Parse a trajectory CSV. If K > 0 it is enforced against every arm index;
// if K == 0 the arm count is inferred as max(arm). Errors carry line numbers.
inline Trajectory parse_trajectory_csv(std::istream& in, int K = 0) {
    std::string line;
    if (!std::getline(in, line)) throw data_error("trajectory csv: empty input, missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,arm,outcome")
        throw data_error("trajectory csv line 1: expected header \"t,arm,outcome\", got \"" +
                         line + "\"");

    Trajectory h;
    h.K = K > 0 ? K : 1;
    int max_arm = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const char* p = line.data();
        const char* end = p + line.size();
        auto fail = [&](const std::string& why) {
            throw data_error("trajectory csv line " + std::to_string(lineno) + ": " + why);
        };

        std::int64_t t;
        auto r1 = std::from_chars(p, end, t);
        if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',') fail("malformed t field");
        int arm;
        auto r2 = std::from_chars(r1.ptr + 1, end, arm);
        if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ',') fail("malformed arm field");
        double outcome;
        auto r3 = std::from_chars(r2.ptr + 1, end, outcome);
        if (r3.ec != std::errc{} || r3.ptr != end) fail("malformed outcome field");

        if (t != static_cast<std::int64_t>(h.records.size()) + 1)
            fail("t=" + std::to_string(t) + " out of order, expected " +
                 std::to_string(h.records.size() + 1));
        if (arm < 1) fail("arm must be >= 1");
        if (K > 0 && arm > K)
            fail("arm " + std::to_string(arm) + " exceeds configured K=" + std::to_string(K));
        max_arm = std::max(max_arm, arm);
        h.records.push_back({t, arm, outcome});
    }
    if (K == 0) h.K = std::max(1, max_arm);
    h.validate();
    return h;
}

inline Trajectory read_trajectory_csv(const std::string& path, int K = 0) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open trajectory file: " + path);
    return parse_trajectory_csv(f, K);
}

}  // namespace optimist
