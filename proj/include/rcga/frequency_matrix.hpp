#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcga/errors.hpp"
#include "rcga/rational.hpp"
#include "rcga/rng.hpp"

namespace rcga {

// The n x r table of sampling probabilities, stored as integer counts out of
// the hypothetical population size K: p[i][j] = count(i, j) / K.
//
// Storing counts instead of floats keeps every frequency an exact multiple of
// 1/K: the uniform initialization 1/r is exact because K must be divisible
// by r (a "well-behaved" K), and the +-1/K updates are exact increments, so
// row sums and entry bounds can be asserted without tolerance over runs of
// any length.
class FrequencyMatrix {
  public:
    FrequencyMatrix() = default;

    // All entries start at K/r, the uniform distribution per row.
    static FrequencyMatrix uniform(int n, int r, long long K) {
        validate_shape(n, r, K);
        FrequencyMatrix m;
        m.n_ = n;
        m.r_ = r;
        m.K_ = K;
        m.counts_.assign(static_cast<size_t>(n) * r, K / r);
        return m;
    }

    // Builds a matrix from explicit per-row counts (used by oracles that need
    // confined rows). Every row must sum to K.
    static FrequencyMatrix from_counts(int n, int r, long long K,
                                       const std::vector<std::vector<long long>>& rows) {
        validate_shape(n, r, K);
        if (static_cast<int>(rows.size()) != n)
            throw invalid_parameter("FrequencyMatrix: wrong number of rows");
        FrequencyMatrix m;
        m.n_ = n;
        m.r_ = r;
        m.K_ = K;
        m.counts_.resize(static_cast<size_t>(n) * r);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != r)
                throw invalid_parameter("FrequencyMatrix: wrong row length");
            long long sum = 0;
            for (int j = 0; j < r; ++j) {
                const long long c = rows[i][j];
                if (c < 0 || c > K) throw invalid_parameter("FrequencyMatrix: count outside [0, K]");
                m.counts_[static_cast<size_t>(i) * r + j] = c;
                sum += c;
            }
            if (sum != K) throw invalid_parameter("FrequencyMatrix: row does not sum to K");
        }
        return m;
    }

    int n() const { return n_; }
    int r() const { return r_; }
    long long K() const { return K_; }

    long long count(int i, int j) const {
        check_position(i);
        if (j < 0 || j >= r_) throw invalid_parameter("FrequencyMatrix: value index out of range");
        return counts_[static_cast<size_t>(i) * r_ + j];
    }

    std::span<const long long> row(int i) const {
        check_position(i);
        return {counts_.data() + static_cast<size_t>(i) * r_, static_cast<size_t>(r_)};
    }

    // Draws one value at position i; P[value j] = count(i, j) / K exactly.
    // Consumes exactly one bounded draw from the stream, also for degenerate
    // rows, so the stream layout does not depend on the matrix content.
    int sample_value(int i, SplitMix64& rng) const {
        const long long* c = counts_.data() + static_cast<size_t>(i) * r_;
        auto u = static_cast<long long>(rng.next_below(static_cast<uint64_t>(K_)));
        for (int j = 0;; ++j) {
            if (u < c[j]) return j;
            u -= c[j];
        }
    }

    // The +-1/K shift: per row, the winner's value gains one count and the
    // loser's value loses one; equal values cancel and leave the row as is.
    // Row sums are preserved exactly by construction.
    void update(std::span<const int> winner, std::span<const int> loser) {
        if (static_cast<int>(winner.size()) != n_ || static_cast<int>(loser.size()) != n_)
            throw invalid_parameter("FrequencyMatrix::update: individual length mismatch");
        for (int i = 0; i < n_; ++i) {
            const int w = winner[i], l = loser[i];
            if (w == l) continue;
            long long* rowp = counts_.data() + static_cast<size_t>(i) * r_;
            if (rowp[l] <= 0)
                throw matrix_corruption("FrequencyMatrix::update: decrement below zero (inputs "
                                        "were not sampled from this matrix)");
            ++rowp[w];
            --rowp[l];
        }
    }

    // Probability mass of the value interval [lo, hi] at position i, as an
    // exact rational with denominator K.
    Rational mass(int i, int lo, int hi) const { return Rational(mass_num(i, lo, hi), K_); }

    // Probability mass of an arbitrary value set.
    Rational mass(int i, std::span<const int> values) const {
        check_position(i);
        const long long* c = counts_.data() + static_cast<size_t>(i) * r_;
        long long num = 0;
        for (int j : values) {
            if (j < 0 || j >= r_) throw invalid_parameter("FrequencyMatrix::mass: value out of range");
            num += c[j];
        }
        return Rational(num, K_);
    }

    // Numerator of mass(i, [lo, hi]); the empty interval (lo > hi) has mass 0.
    long long mass_num(int i, int lo, int hi) const {
        check_position(i);
        if (lo > hi) return 0;
        if (lo < 0 || hi >= r_) throw invalid_parameter("FrequencyMatrix::mass: interval out of range");
        const long long* c = counts_.data() + static_cast<size_t>(i) * r_;
        long long num = 0;
        for (int j = lo; j <= hi; ++j) num += c[j];
        return num;
    }

    long long row_sum(int i) const { return mass_num(i, 0, r_ - 1); }

    // True once all mass of the row sits on a single value; such a row can
    // never change again because only sampled values receive updates.
    bool row_absorbed(int i) const {
        check_position(i);
        const long long* c = counts_.data() + static_cast<size_t>(i) * r_;
        for (int j = 0; j < r_; ++j)
            if (c[j] == K_) return true;
        return false;
    }

    // Full invariant scan: row sums equal K and entries lie in [0, K].
    bool consistent() const {
        for (int i = 0; i < n_; ++i) {
            long long sum = 0;
            const long long* c = counts_.data() + static_cast<size_t>(i) * r_;
            for (int j = 0; j < r_; ++j) {
                if (c[j] < 0 || c[j] > K_) return false;
                sum += c[j];
            }
            if (sum != K_) return false;
        }
        return true;
    }

    friend bool operator==(const FrequencyMatrix& a, const FrequencyMatrix& b) {
        return a.n_ == b.n_ && a.r_ == b.r_ && a.K_ == b.K_ && a.counts_ == b.counts_;
    }

  private:
    static void validate_shape(int n, int r, long long K) {
        if (n < 1) throw invalid_parameter("FrequencyMatrix: n must be >= 1");
        if (r < 2) throw invalid_parameter("FrequencyMatrix: r must be >= 2");
        if (K < 1) throw invalid_parameter("FrequencyMatrix: K must be >= 1");
        if (K % r != 0)
            throw invalid_parameter("FrequencyMatrix: K is not well-behaved (K mod r != 0)");
    }

    void check_position(int i) const {
        if (i < 0 || i >= n_) throw invalid_parameter("FrequencyMatrix: position out of range");
    }

    int n_ = 0;
    int r_ = 0;
    long long K_ = 0;
    std::vector<long long> counts_;
};

} // namespace rcga
