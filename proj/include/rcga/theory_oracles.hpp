#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcga/eda.hpp"
#include "rcga/errors.hpp"
#include "rcga/frequency_matrix.hpp"
#include "rcga/hierarchy.hpp"
#include "rcga/rational.hpp"
#include "rcga/rng.hpp"
#include "rcga/stats.hpp"

namespace rcga {

// ---------------------------------------------------------------------------
// Closed-form bound evaluators. Each evaluates a formula verbatim, including
// its explicit constants; the Monte Carlo verifiers further down stress-test
// the corresponding inequality empirically.
// ---------------------------------------------------------------------------

// Overlap sum  sum_{d in [0..rho]} sum_{i in [len-d]} q(i) q(i+d)  for a
// non-negative table q of length m * max(1, rho). Guaranteed to dominate
// convolution_rhs(total, m) with total = sum q(i).
inline double convolution_lhs(std::span<const double> q, long long m, long long rho) {
    if (m < 1) throw invalid_parameter("convolution_lhs: m must be >= 1");
    if (rho < 0) throw invalid_parameter("convolution_lhs: rho must be >= 0");
    const long long len = m * std::max<long long>(1, rho);
    if (static_cast<long long>(q.size()) != len)
        throw invalid_parameter("convolution_lhs: table length must be m * max(1, rho)");
    for (double v : q)
        if (v < 0.0) throw invalid_parameter("convolution_lhs: negative table entry");
    double sum = 0.0;
    for (long long d = 0; d <= rho; ++d)
        for (long long i = 0; i + d < len; ++i) sum += q[i] * q[i + d];
    return sum;
}

inline double convolution_rhs(double total, long long m) {
    if (m < 1) throw invalid_parameter("convolution_rhs: m must be >= 1");
    return total * total / (2.0 * static_cast<double>(m));
}

// Exact-rational version of the overlap sum, for cross-checking the float
// evaluation on grid-valued tables.
inline Rational convolution_lhs_exact(std::span<const Rational> q, long long m, long long rho) {
    const long long len = m * std::max<long long>(1, rho);
    if (static_cast<long long>(q.size()) != len)
        throw invalid_parameter("convolution_lhs_exact: table length must be m * max(1, rho)");
    Rational sum(0);
    for (long long d = 0; d <= rho; ++d)
        for (long long i = 0; i + d < len; ++i) sum += q[i] * q[i + d];
    return sum;
}

// Worst-case variance of a rest sum: (n-1) rows, each confined to values in
// [j_star, r-1], can deviate from their mean by at most r-1-j_star.
inline double rest_variance_bound(long long n, long long r, long long j_star) {
    if (n < 2 || r < 2) throw invalid_parameter("rest_variance_bound: need n, r >= 2");
    if (j_star < 0 || j_star > r - 1)
        throw invalid_parameter("rest_variance_bound: j_star outside [0, r-1]");
    const double d = static_cast<double>(r - 1 - j_star);
    return static_cast<double>(n - 1) * d * d;
}

// Sample variance of the rest sum S = sum_{k != i} x_k over `draws`
// independent samples from the matrix. Requires every row k != i to carry no
// mass below j_star; a violated precondition is an error, not a warning.
inline double empirical_rest_variance(const FrequencyMatrix& m, int i, int j_star, long long draws,
                                      SplitMix64& rng) {
    if (draws < 2) throw invalid_parameter("empirical_rest_variance: need draws >= 2");
    for (int k = 0; k < m.n(); ++k) {
        if (k == i) continue;
        if (j_star > 0 && m.mass_num(k, 0, j_star - 1) != 0)
            throw invalid_parameter("empirical_rest_variance: row " + std::to_string(k) +
                                    " has mass below j_star");
    }
    RunningStat stat;
    for (long long d = 0; d < draws; ++d) {
        long long s = 0;
        for (int k = 0; k < m.n(); ++k) {
            if (k == i) continue;
            s += m.sample_value(k, rng);
        }
        stat.add(static_cast<double>(s));
    }
    return stat.variance();
}

// Lower bound 9 max{1, delta} / (32 (4 sigma - 1)) on the probability that
// the rest-sum difference lands in [0, delta], valid when sigma dominates the
// sampling deviation as in the assumptions below.
inline double gap_window_lower_bound(double delta, double sigma) {
    if (delta < 0.0) throw invalid_parameter("gap_window_lower_bound: delta must be >= 0");
    if (sigma < (delta + 2.0) / 4.0)
        throw invalid_parameter("gap_window_lower_bound: requires sigma >= (delta + 2) / 4");
    return 9.0 * std::max(1.0, delta) / (32.0 * (4.0 * sigma - 1.0));
}

// One-step drift lower bound for the mass of the suffix sets above a block,
// together with its dimension-only relaxation c s (1-s) / (29 sqrt(n)).
struct DriftBounds {
    double formula = 0.0;
    double fallback = 0.0;
};

inline DriftBounds block_drift_lower_bound(long long n, long long r, int level, double c_ratio,
                                           double mass_next, const HierarchyTable& h) {
    if (r < 10) throw invalid_parameter("block_drift_lower_bound: requires r >= 10");
    if (n < 4) throw invalid_parameter("block_drift_lower_bound: requires n >= 4");
    if (h.r != static_cast<int>(r)) throw invalid_parameter("block_drift_lower_bound: table r mismatch");
    if (level < 0 || level > h.top_level - 2)
        throw invalid_parameter("block_drift_lower_bound: level must leave two levels above");
    const long long cut = h.suffix_start(level);
    if (cut > r - 10)
        throw invalid_parameter("block_drift_lower_bound: requires block start <= r - 10");
    if (!(mass_next > 0.0 && mass_next < 1.0))
        throw invalid_parameter("block_drift_lower_bound: suffix mass must lie in (0, 1)");
    if (c_ratio <= 0.0) throw invalid_parameter("block_drift_lower_bound: c_ratio must be > 0");
    const double span = static_cast<double>(r - 1 - cut);
    const double s = mass_next;
    DriftBounds out;
    out.formula = 9.0 * c_ratio * s * (1.0 - s) * std::max(1.0, span / 2.0) /
                  (32.0 * (4.0 * std::sqrt(static_cast<double>(n - 1) * span * span) - 1.0));
    out.fallback = c_ratio * s * (1.0 - s) / (29.0 * std::sqrt(static_cast<double>(n)));
    return out;
}

// Per-step variance scale of a stopped neutral mass process started at p0.
inline double neutral_step_scale(double alpha, double p0) {
    if (alpha < 0.0) throw invalid_parameter("neutral_step_scale: alpha must be >= 0");
    if (p0 < 0.0 || p0 > 1.0) throw invalid_parameter("neutral_step_scale: p0 outside [0, 1]");
    const double lo = (1.0 - alpha) * p0, hi = (1.0 + alpha) * p0;
    return std::max(std::min(lo, 1.0 - lo), std::min(hi, 1.0 - hi));
}

// Probability bound for a neutral (martingale) mass deviating from its start
// by a relative factor alpha anywhere within t steps:
//     2 exp(-3 (alpha p0 K)^2 / (4 max{6 t beta, alpha p0 K})).
inline double neutral_deviation_bound(double alpha, double p0, long long K, long long t,
                                      double beta) {
    if (K < 1 || t < 0) throw invalid_parameter("neutral_deviation_bound: K >= 1, t >= 0");
    const double radius = alpha * p0 * static_cast<double>(K);
    const double denom = 4.0 * std::max(6.0 * static_cast<double>(t) * beta, radius);
    if (denom <= 0.0) return 2.0; // zero radius: the bound is vacuous
    return 2.0 * std::exp(-3.0 * radius * radius / denom);
}

// Chernoff-style lower-tail bound for trial sequences whose success
// probability may drift with the running success count:
//     t exp(-(1 - b delta) (1 - b)^2 delta^2 t p / 2).
inline double reinforced_tail_bound(long long t, double p, double delta, double b) {
    if (t < 1) throw invalid_parameter("reinforced_tail_bound: t must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_parameter("reinforced_tail_bound: delta must lie in (0, 1)");
    if (!(b >= 0.0 && b < 1.0)) throw invalid_parameter("reinforced_tail_bound: b must lie in [0, 1)");
    const double mu = static_cast<double>(t) * p;
    return static_cast<double>(t) *
           std::exp(-(1.0 - b * delta) * (1.0 - b) * (1.0 - b) * delta * delta * mu / 2.0);
}

// Success probability of trial `trial` (1-based) in the extremal
// self-reinforcing process: the weighted mix of the base rate p and the
// empirical rate so far, (rho p + eta S) / (rho + eta (trial - 1)).
inline double reinforced_success_probability(long long trial, long long successes_before, double p,
                                             double rho, double eta) {
    if (trial < 1) throw invalid_parameter("reinforced_success_probability: trial >= 1");
    return (rho * p + eta * static_cast<double>(successes_before)) /
           (rho + eta * static_cast<double>(trial - 1));
}

// Runs the extremal process for t trials and returns the partial-success
// trajectory Z_0 .. Z_t.
inline std::vector<long long> simulate_reinforced_trajectory(long long t, double p, double rho,
                                                             double eta, SplitMix64& rng) {
    if (t < 0) throw invalid_parameter("simulate_reinforced_trajectory: t must be >= 0");
    std::vector<long long> z(static_cast<size_t>(t) + 1, 0);
    long long successes = 0;
    for (long long i = 1; i <= t; ++i) {
        const double pi = reinforced_success_probability(i, successes, p, rho, eta);
        successes += rng.next_bernoulli(pi) ? 1 : 0;
        z[static_cast<size_t>(i)] = successes;
    }
    return z;
}

inline long long simulate_reinforced_final(long long t, double p, double rho, double eta,
                                           SplitMix64& rng) {
    long long successes = 0;
    for (long long i = 1; i <= t; ++i) {
        const double pi = reinforced_success_probability(i, successes, p, rho, eta);
        successes += rng.next_bernoulli(pi) ? 1 : 0;
    }
    return successes;
}

// Hitting-time budget of a multiplicatively decaying process:
// beta = (ln(x0 / x_min) + gamma) / delta, with tail bound q + e^{-gamma}.
inline double decay_hitting_time(double x0, double x_min, double gamma, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_parameter("decay_hitting_time: delta must lie in (0, 1)");
    if (!(x_min > 0.0) || x0 < x_min)
        throw invalid_parameter("decay_hitting_time: requires x0 >= x_min > 0");
    if (!(gamma > 0.0)) throw invalid_parameter("decay_hitting_time: gamma must be > 0");
    return (std::log(x0 / x_min) + gamma) / delta;
}

inline double decay_tail_bound(double q, double gamma) {
    if (q < 0.0 || q > 1.0) throw invalid_parameter("decay_tail_bound: q outside [0, 1]");
    return q + std::exp(-gamma);
}

// Constant-free comparator K r sqrt(n) (ln r + ln K) from the earlier runtime
// guarantee, used for side-by-side scaling plots.
inline double comparison_runtime_bound(long long n, long long r, long long K) {
    if (n < 1 || K < 1) throw invalid_parameter("comparison_runtime_bound: n, K must be >= 1");
    if (r < 2) throw invalid_parameter("comparison_runtime_bound: r must be >= 2");
    return static_cast<double>(K) * static_cast<double>(r) * std::sqrt(static_cast<double>(n)) *
           (std::log(static_cast<double>(r)) + std::log(static_cast<double>(K)));
}

// Normalization K sqrt(n) ln(n) ln(r) against which measured runtimes are
// divided in the scaling study.
inline double gom_runtime_scale(long long n, long long r, long long K) {
    if (n < 2 || r < 2 || K < 1) throw invalid_parameter("gom_runtime_scale: need n, r >= 2, K >= 1");
    return static_cast<double>(K) * std::sqrt(static_cast<double>(n)) *
           std::log(static_cast<double>(n)) * std::log(static_cast<double>(r));
}

// ---------------------------------------------------------------------------
// Monte Carlo verifiers. Each returns a BoundReport; inequalities are tested
// one-sided at a pre-registered significance, so a report never claims a
// refutation that the sample size cannot support.
// ---------------------------------------------------------------------------

enum class BoundStatus { satisfied, satisfied_vacuous, violated, precondition_failed };

inline const char* to_string(BoundStatus s) {
    switch (s) {
    case BoundStatus::satisfied: return "satisfied";
    case BoundStatus::satisfied_vacuous: return "satisfied-vacuously";
    case BoundStatus::violated: return "violated";
    case BoundStatus::precondition_failed: return "precondition-failed";
    }
    return "?";
}

struct BoundReport {
    std::string oracle;
    std::vector<std::pair<std::string, double>> parameters;
    double bound = 0.0;
    std::optional<double> empirical;
    long long samples = 0;
    BoundStatus status = BoundStatus::satisfied;
    bool satisfied = true;
    std::string note;

    void set_status(BoundStatus s) {
        status = s;
        satisfied = s == BoundStatus::satisfied || s == BoundStatus::satisfied_vacuous;
    }
};

// Randomized stress test of the overlap-sum inequality: m in [1..20],
// rho in [0..10], table entries uniform in [0, 1]. The report's `empirical`
// is the worst observed margin lhs - rhs and the bound is the float slack
// floor. A subset of instances is re-evaluated in exact rational arithmetic
// on a 2^-20 grid and compared against the float path.
inline BoundReport verify_convolution(long long instances, uint64_t seed,
                                      long long exact_instances = 100) {
    BoundReport rep;
    rep.oracle = "convolution";
    rep.parameters = {{"instances", static_cast<double>(instances)},
                      {"m_max", 20.0},
                      {"rho_max", 10.0}};
    rep.samples = instances;
    rep.bound = -1e-12;

    SplitMix64 rng(seed);
    double worst = 1e300;
    long long violations = 0;
    std::vector<double> q;
    for (long long it = 0; it < instances; ++it) {
        const long long m = 1 + static_cast<long long>(rng.next_below(20));
        const long long rho = static_cast<long long>(rng.next_below(11));
        q.resize(static_cast<size_t>(m * std::max<long long>(1, rho)));
        double total = 0.0;
        for (double& v : q) {
            v = rng.next_double();
            total += v;
        }
        const double margin = convolution_lhs(q, m, rho) - convolution_rhs(total, m);
        worst = std::min(worst, margin);
        if (margin < -1e-12) ++violations;
    }

    // Exact recheck on grid-valued tables.
    long long exact_mismatches = 0;
    constexpr long long grid = 1 << 20;
    std::vector<Rational> qr;
    for (long long it = 0; it < exact_instances; ++it) {
        const long long m = 1 + static_cast<long long>(rng.next_below(20));
        const long long rho = static_cast<long long>(rng.next_below(11));
        const long long len = m * std::max<long long>(1, rho);
        qr.clear();
        q.clear();
        Rational total(0);
        for (long long i = 0; i < len; ++i) {
            const long long num = static_cast<long long>(rng.next_below(grid + 1));
            qr.emplace_back(num, grid);
            q.push_back(qr.back().to_double());
            total += qr.back();
        }
        const Rational lhs = convolution_lhs_exact(qr, m, rho);
        const Rational rhs = total * total / Rational(2 * m);
        if (lhs < rhs) ++violations;
        const double lhs_f = convolution_lhs(q, m, rho);
        if (std::abs(lhs.to_double() - lhs_f) > 1e-12 * std::max(1.0, lhs_f)) ++exact_mismatches;
    }

    rep.empirical = worst;
    if (violations > 0 || exact_mismatches > 0) {
        rep.set_status(BoundStatus::violated);
        rep.note = "violations=" + std::to_string(violations) +
                   " exact_mismatches=" + std::to_string(exact_mismatches);
    } else {
        rep.set_status(BoundStatus::satisfied);
    }
    return rep;
}

// Rows uniform on [lo, r-1]; K = r * (r - lo) keeps both the row sums and the
// per-value counts exact.
inline FrequencyMatrix confined_uniform_matrix(int n, int r, int lo) {
    if (lo < 0 || lo >= r) throw invalid_parameter("confined_uniform_matrix: lo outside [0, r-1]");
    const long long K = static_cast<long long>(r) * (r - lo);
    std::vector<std::vector<long long>> rows(n, std::vector<long long>(r, 0));
    for (int i = 0; i < n; ++i)
        for (int j = lo; j < r; ++j) rows[i][j] = r;
    return FrequencyMatrix::from_counts(n, r, K, rows);
}

// Samples the rest sum from a matrix confined to [j_star, r-1] and compares
// its variance against the worst-case bound, with the sampling-noise
// allowance (1 + 3 / sqrt(draws)).
inline BoundReport verify_variance(int n, int r, int j_star, long long draws, uint64_t seed) {
    BoundReport rep;
    rep.oracle = "variance";
    rep.parameters = {{"n", static_cast<double>(n)},
                      {"r", static_cast<double>(r)},
                      {"j_star", static_cast<double>(j_star)}};
    rep.samples = draws;
    try {
        rep.bound = rest_variance_bound(n, r, j_star);
        const FrequencyMatrix m = confined_uniform_matrix(n, r, j_star);
        SplitMix64 rng(seed);
        const double emp = empirical_rest_variance(m, 0, j_star, draws, rng);
        rep.empirical = emp;
        const double slack = 1.0 + 3.0 / std::sqrt(static_cast<double>(draws));
        rep.set_status(emp <= rep.bound * slack ? BoundStatus::satisfied : BoundStatus::violated);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

// Empirical P[rest-sum difference in [0, delta]] at uniform initialization
// versus the window lower bound with sigma = sqrt((n-1) (r-1)^2).
inline BoundReport verify_gap_window(int n, int r, long long delta, long long pairs, uint64_t seed,
                                     double significance) {
    BoundReport rep;
    rep.oracle = "biased-window";
    rep.parameters = {{"n", static_cast<double>(n)},
                      {"r", static_cast<double>(r)},
                      {"delta", static_cast<double>(delta)}};
    rep.samples = pairs;
    try {
        if (n < 2 || r < 2) throw invalid_parameter("verify_gap_window: need n, r >= 2");
        const double sigma = std::sqrt(rest_variance_bound(n, r, 0));
        rep.bound = gap_window_lower_bound(static_cast<double>(delta), sigma);
        // Validity window of the bound: mean +- 2 sigma stays inside the
        // attainable range of the rest sum.
        const double mean = static_cast<double>(n - 1) * static_cast<double>(r - 1) / 2.0;
        const double lo = std::floor(mean - 2.0 * sigma) + 1.0;
        const double hi = std::ceil(mean + 2.0 * sigma) - 1.0;
        if (lo < 0.0 || hi > static_cast<double>(n - 1) * static_cast<double>(r - 1))
            throw invalid_parameter("verify_gap_window: mean +- 2 sigma window leaves the range");

        SplitMix64 rng(seed);
        long long hits = 0;
        for (long long s = 0; s < pairs; ++s) {
            long long d = 0;
            for (int k = 0; k < n - 1; ++k)
                d += static_cast<long long>(rng.next_below(static_cast<uint64_t>(r))) -
                     static_cast<long long>(rng.next_below(static_cast<uint64_t>(r)));
            if (d >= 0 && d <= delta) ++hits;
        }
        rep.empirical = static_cast<double>(hits) / static_cast<double>(pairs);
        rep.set_status(refutes_lower_bound(pairs, hits, rep.bound, significance)
                           ? BoundStatus::violated
                           : BoundStatus::satisfied);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

// Frequency of the relative-deviation event on neutral (constant-objective)
// runs: tracks the mass of the upper half of values at position 0 and counts
// runs where it ever leaves (1 +- alpha) times its start within t iterations.
inline BoundReport verify_neutral_concentration(int n, int r, long long K, long long t,
                                                double alpha, long long runs, uint64_t seed,
                                                double significance) {
    BoundReport rep;
    rep.oracle = "neutral-concentration";
    rep.parameters = {{"n", static_cast<double>(n)},   {"r", static_cast<double>(r)},
                      {"K", static_cast<double>(K)},   {"t", static_cast<double>(t)},
                      {"alpha", alpha},                {"runs", static_cast<double>(runs)}};
    rep.samples = runs;
    try {
        const int set_lo = r / 2; // tracked set: upper half of values
        const double p0 = static_cast<double>(r - set_lo) / static_cast<double>(r);
        const double beta = neutral_step_scale(alpha, p0);
        rep.bound = neutral_deviation_bound(alpha, p0, K, t, beta);
        if (rep.bound >= 1.0) {
            rep.set_status(BoundStatus::satisfied_vacuous);
            return rep;
        }

        struct DeviationObserver {
            int set_lo;
            long long start_num = 0, current = 0;
            long long threshold = 0; // deviation size in counts
            bool hit = false;
            void on_step(long long, const FrequencyMatrix&, const Individual& x1,
                         const Individual& x2, int winner_index, bool) {
                const int w = winner_index == 1 ? x1.values[0] : x2.values[0];
                const int l = winner_index == 1 ? x2.values[0] : x1.values[0];
                current += (w >= set_lo) - (l >= set_lo);
                const long long dev = current >= start_num ? current - start_num : start_num - current;
                if (dev >= threshold) hit = true;
            }
        };

        long long events = 0;
        for (long long rep_i = 0; rep_i < runs; ++rep_i) {
            RunConfig cfg;
            cfg.n = n;
            cfg.r = r;
            cfg.K = K;
            cfg.objective = ObjectiveKind::constant;
            cfg.max_iterations = t;
            cfg.seed = seed + static_cast<uint64_t>(rep_i);
            DeviationObserver obs;
            obs.set_lo = set_lo;
            obs.start_num = (K / r) * (r - set_lo);
            obs.current = obs.start_num;
            obs.threshold = static_cast<long long>(
                std::ceil(alpha * static_cast<double>(obs.start_num) - 1e-9));
            run_with_observer(cfg, obs);
            if (obs.hit) ++events;
        }
        rep.empirical = static_cast<double>(events) / static_cast<double>(runs);
        rep.set_status(refutes_upper_bound(runs, events, rep.bound, significance)
                           ? BoundStatus::violated
                           : BoundStatus::satisfied);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

// Lower-tail frequency of the extremal self-reinforcing process versus the
// Chernoff-style bound.
inline BoundReport verify_reinforced_tail(long long t, double p, double delta, double b,
                                          double rho, double eta, long long trajectories,
                                          uint64_t seed, double significance) {
    BoundReport rep;
    rep.oracle = "reinforced-tail";
    rep.parameters = {{"t", static_cast<double>(t)}, {"p", p},     {"delta", delta},
                      {"b", b},                      {"rho", rho}, {"eta", eta}};
    rep.samples = trajectories;
    try {
        if (eta * static_cast<double>(t) / (rho + eta * static_cast<double>(t)) > b + 1e-12)
            throw invalid_parameter("verify_reinforced_tail: requires eta t / (rho + eta t) <= b");
        rep.bound = reinforced_tail_bound(t, p, delta, b);
        if (rep.bound >= 1.0) {
            rep.set_status(BoundStatus::satisfied_vacuous);
            return rep;
        }
        const double threshold = (1.0 - delta) * static_cast<double>(t) * p;
        SplitMix64 rng(seed);
        long long events = 0;
        for (long long s = 0; s < trajectories; ++s)
            if (static_cast<double>(simulate_reinforced_final(t, p, rho, eta, rng)) <=
                threshold + 1e-12)
                ++events;
        rep.empirical = static_cast<double>(events) / static_cast<double>(trajectories);
        rep.set_status(refutes_upper_bound(trajectories, events, rep.bound, significance)
                           ? BoundStatus::violated
                           : BoundStatus::satisfied);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

// One-step drift estimate on a confined matrix: K * E[change of the suffix
// mass above the active block at one position], versus the closed-form lower
// bound with the witnessed suffix-mass ratio.
inline BoundReport verify_drift(int n, int r, int level, double c_ratio, long long trials,
                                uint64_t seed, double significance) {
    BoundReport rep;
    rep.oracle = "drift";
    rep.parameters = {{"n", static_cast<double>(n)},
                      {"r", static_cast<double>(r)},
                      {"level", static_cast<double>(level)},
                      {"c_ratio", c_ratio}};
    rep.samples = trials;
    try {
        const HierarchyTable h = build_hierarchy(r);
        const FrequencyMatrix m = confined_uniform_matrix(n, r, h.suffix_start(level));
        const double mass_next = suffix_mass(m, 0, h, level + 1).to_double();
        const double mass_next2 = suffix_mass(m, 0, h, level + 2).to_double();
        if (mass_next2 < c_ratio * mass_next)
            throw invalid_parameter("verify_drift: matrix does not witness the ratio c_ratio");
        rep.parameters.emplace_back("witnessed_ratio", mass_next2 / mass_next);
        rep.bound = block_drift_lower_bound(n, r, level, c_ratio, mass_next, h).formula;

        const int next_start = h.suffix_start(level + 1);
        const Objective f = Objective::make(ObjectiveKind::g_onemax, n, r);
        SplitMix64 rng(seed);
        Individual x1, x2;
        RunningStat stat;
        for (long long s = 0; s < trials; ++s) {
            sample_individual(m, rng, f, x1);
            sample_individual(m, rng, f, x2);
            const CompeteResult cmp = compete(x1, x2, rng);
            const int w = cmp.winner_index == 1 ? x1.values[0] : x2.values[0];
            const int l = cmp.winner_index == 1 ? x2.values[0] : x1.values[0];
            stat.add(static_cast<double>((w >= next_start) - (l >= next_start)));
        }
        rep.empirical = stat.mean(); // already on the K-scaled (count) scale
        const double se = std::sqrt(stat.variance() / static_cast<double>(trials));
        const double z = normal_upper_quantile(significance);
        rep.set_status(stat.mean() < rep.bound - z * se ? BoundStatus::violated
                                                        : BoundStatus::satisfied);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

// Synthetic multiplicative decay with injected failure events: a failed
// trajectory stops decaying and therefore overshoots the hitting-time budget;
// the tail bound q + e^{-gamma} must absorb both failures and slow successes.
inline BoundReport verify_mult_drift(double x0, double x_min, double delta, double gamma, double q,
                                     long long trajectories, uint64_t seed, double significance) {
    BoundReport rep;
    rep.oracle = "mult-drift";
    rep.parameters = {{"x0", x0},       {"x_min", x_min}, {"delta", delta},
                      {"gamma", gamma}, {"q", q}};
    rep.samples = trajectories;
    try {
        const double beta = decay_hitting_time(x0, x_min, gamma, delta);
        rep.parameters.emplace_back("beta", beta);
        rep.bound = decay_tail_bound(q, gamma);
        if (rep.bound >= 1.0) {
            rep.set_status(BoundStatus::satisfied_vacuous);
            return rep;
        }
        SplitMix64 rng(seed);
        long long events = 0;
        const auto budget = static_cast<long long>(std::floor(beta));
        for (long long s = 0; s < trajectories; ++s) {
            const bool failed = rng.next_bernoulli(q);
            if (failed) {
                ++events; // the process holds its value and never hits x_min
                continue;
            }
            double x = x0;
            long long steps = 0;
            while (x >= x_min && steps <= budget) {
                x *= 1.0 - delta;
                ++steps;
            }
            if (x >= x_min) ++events; // T > beta
        }
        rep.empirical = static_cast<double>(events) / static_cast<double>(trajectories);
        rep.set_status(refutes_upper_bound(trajectories, events, rep.bound, significance)
                           ? BoundStatus::violated
                           : BoundStatus::satisfied);
    } catch (const invalid_parameter& e) {
        rep.set_status(BoundStatus::precondition_failed);
        rep.note = e.what();
    }
    return rep;
}

} // namespace rcga
