#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rcga/errors.hpp"

namespace rcga {

// Streaming mean/variance (Welford).
class RunningStat {
  public:
    void add(double x) {
        ++count_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }
    long long count() const { return count_; }
    double mean() const { return mean_; }
    // Unbiased sample variance.
    double variance() const { return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1); }

  private:
    long long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Quantile with linear interpolation between order statistics (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw invalid_parameter("quantile_sorted: empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

// Upper tail P[Bin(n, p) >= k], summed exactly in floating point from the
// k-th term outward. Used for one-sided tests of "empirical frequency is
// consistent with success probability <= p".
inline double binomial_tail_upper(long long n, long long k, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    // log of the k-th term via lgamma, then forward recurrence.
    const double logp = std::log(p), log1p = std::log1p(-p);
    double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                      std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0) +
                      static_cast<double>(k) * logp + static_cast<double>(n - k) * log1p;
    double term = std::exp(log_term);
    double sum = 0.0;
    for (long long i = k; i <= n; ++i) {
        sum += term;
        if (term < sum * 1e-18) break;
        term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * p / (1.0 - p);
    }
    return std::min(sum, 1.0);
}

// One-sided check of an upper bound: given k events out of n trials and a
// claimed bound b on the event probability, the observation refutes the
// bound at the given significance only if P[Bin(n, b) >= k] < significance.
inline bool refutes_upper_bound(long long trials, long long events, double bound,
                                double significance) {
    if (static_cast<double>(events) <= bound * static_cast<double>(trials)) return false;
    return binomial_tail_upper(trials, events, bound) < significance;
}

// One-sided check of a lower bound on a probability, by symmetry.
inline bool refutes_lower_bound(long long trials, long long events, double bound,
                                double significance) {
    if (static_cast<double>(events) >= bound * static_cast<double>(trials)) return false;
    // P[Bin(n, b) <= k] = P[Bin(n, 1-b) >= n-k]
    return binomial_tail_upper(trials, trials - events, 1.0 - bound) < significance;
}

// Upper quantile of the standard normal: z with P[N(0,1) > z] = tail.
// Acklam's rational approximation, accurate to ~1e-9 over (0, 1).
inline double normal_upper_quantile(double tail) {
    if (tail <= 0.0 || tail >= 1.0) throw invalid_parameter("normal_upper_quantile: tail in (0,1)");
    const double p = 1.0 - tail;
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double u = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (p <= phigh) {
        const double u = p - 0.5, s = u * u;
        x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * u /
            (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
    } else {
        const double u = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    return x;
}

} // namespace rcga
