#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <vector>

#include "rcga/errors.hpp"
#include "rcga/frequency_matrix.hpp"
#include "rcga/hierarchy.hpp"

namespace rcga {

// A step is biased at position i when that position alone decides the
// ranking of the two samples; everything else is a random-walk step and
// contributes only noise (genetic drift) to the position.
enum class StepClass : uint8_t { random_walk = 0, biased = 1 };

struct RestSums {
    long long s1 = 0; // sum of sample 1's values excluding position i
    long long s2 = 0; // sum of sample 2's values excluding position i
    long long diff = 0; // s1 - s2
};

inline RestSums rest_sums(std::span<const int> x1, std::span<const int> x2, int i) {
    if (x1.size() != x2.size()) throw invalid_parameter("rest_sums: length mismatch");
    if (i < 0 || static_cast<size_t>(i) >= x1.size())
        throw invalid_parameter("rest_sums: position out of range");
    RestSums rs;
    for (size_t k = 0; k < x1.size(); ++k) {
        if (static_cast<int>(k) == i) continue;
        rs.s1 += x1[k];
        rs.s2 += x2[k];
    }
    rs.diff = rs.s1 - rs.s2;
    return rs;
}

// Classification rule: |x1_i - x2_i| > |rest_diff| means the in-position gap
// outweighs anything the other positions can contribute, so the sample with
// the larger value at i necessarily ranks first under a value-sum objective.
// Overall ties are settled by a coin and therefore never biased. The rule is
// symmetric in the two samples.
inline StepClass classify_step(int x1_i, int x2_i, long long rest_diff, bool tied) {
    if (tied) return StepClass::random_walk;
    const long long gap = x1_i >= x2_i ? x1_i - x2_i : x2_i - x1_i;
    const long long d = rest_diff >= 0 ? rest_diff : -rest_diff;
    return gap > d ? StepClass::biased : StepClass::random_walk;
}

inline StepClass classify_step(std::span<const int> x1, std::span<const int> x2, int i, bool tied) {
    return classify_step(x1[i], x2[i], rest_sums(x1, x2, i).diff, tied);
}

// A biased step is "large" at level k when the lower sample value lies in
// block k and the higher one in the suffix set two levels up, so the
// in-position gap spans a whole intermediate block. Returns the level, or
// nothing. The winner must be the high-value sample, i.e. the update moved
// mass upward; at most one level can match because blocks are disjoint.
inline std::optional<int> detect_large_biased(int x1_i, int x2_i, int winner_index, StepClass cls,
                                              const HierarchyTable& h) {
    if (cls != StepClass::biased || x1_i == x2_i) return std::nullopt;
    const int low = x1_i < x2_i ? x1_i : x2_i;
    const int high = x1_i < x2_i ? x2_i : x1_i;
    const int winner_value = winner_index == 1 ? x1_i : x2_i;
    if (winner_value != high) return std::nullopt;
    const int level = h.block_of(low);
    if (level > h.top_level - 2) return std::nullopt;
    if (high < h.suffix_start(level + 2)) return std::nullopt;
    return level;
}

// Full per-iteration record: both samples in pre-selection order, the
// selection outcome, and the per-position analysis quantities.
struct StepRecord {
    long long t = 0;
    std::vector<int> x1, x2;
    int winner_index = 1;
    bool tied = false;
    std::vector<long long> rest_diff;   // D_i per position
    std::vector<StepClass> step_class;  // per position
    std::vector<int8_t> large_biased;   // level of a large biased step, or -1

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

inline StepRecord make_step_record(long long t, std::span<const int> x1, std::span<const int> x2,
                                   int winner_index, bool tied,
                                   const HierarchyTable* h = nullptr) {
    if (x1.size() != x2.size()) throw invalid_parameter("make_step_record: length mismatch");
    const int n = static_cast<int>(x1.size());
    StepRecord rec;
    rec.t = t;
    rec.x1.assign(x1.begin(), x1.end());
    rec.x2.assign(x2.begin(), x2.end());
    rec.winner_index = winner_index;
    rec.tied = tied;
    rec.rest_diff.resize(n);
    rec.step_class.resize(n);
    rec.large_biased.assign(n, -1);
    long long sum1 = 0, sum2 = 0;
    for (int k = 0; k < n; ++k) {
        sum1 += x1[k];
        sum2 += x2[k];
    }
    for (int i = 0; i < n; ++i) {
        rec.rest_diff[i] = (sum1 - x1[i]) - (sum2 - x2[i]);
        rec.step_class[i] = classify_step(x1[i], x2[i], rec.rest_diff[i], tied);
        if (h) {
            const auto lvl = detect_large_biased(x1[i], x2[i], winner_index, rec.step_class[i], *h);
            if (lvl) rec.large_biased[i] = static_cast<int8_t>(*lvl);
        }
    }
    return rec;
}

// The per-position split of one stretch of a run into random-walk and biased
// event times, with the exact mass contribution of every event.
//
// Event time u in (base_time, base_time + horizon] stands for the transition
// from matrix state u-1 to state u; its delta is the change of the tracked
// suffix mass across that transition, a signed numerator over K. The two time
// sequences are strictly increasing and together cover the stretch, so the
// summed deltas reconstruct the raw mass change exactly.
struct DecomposedSeries {
    int position = 0;
    int suffix_start = 0; // tracked value set is [suffix_start, r-1]
    long long base_time = 0;
    long long K = 0;
    long long start_mass_num = 0; // mass numerator at base_time
    long long end_mass_num = 0;   // mass numerator at base_time + horizon
    std::vector<long long> random_walk_times;
    std::vector<long long> random_walk_deltas;
    std::vector<long long> biased_times;
    std::vector<long long> biased_deltas;
    // Filtered series: element s is start_mass_num plus the first s deltas of
    // the corresponding class; element 0 is the starting mass.
    std::vector<long long> random_walk_series;
    std::vector<long long> biased_series;
};

// Splits the stretch [t_prime, t_prime + horizon] of a fully recorded trace
// at one position. `initial` must be the matrix state the trace started from
// (its state 0); the tracked set is the suffix [suffix_start, r-1].
inline DecomposedSeries decompose(const std::vector<StepRecord>& trace,
                                  const FrequencyMatrix& initial, int position, int suffix_start,
                                  long long t_prime, long long horizon) {
    if (t_prime < 0 || horizon < 0 ||
        t_prime + horizon > static_cast<long long>(trace.size()))
        throw invalid_parameter("decompose: trace does not cover [t', t' + horizon]");
    if (position < 0 || position >= initial.n())
        throw invalid_parameter("decompose: position out of range");
    if (suffix_start < 0 || suffix_start >= initial.r())
        throw invalid_parameter("decompose: suffix start out of range");
    for (long long u = 0; u < t_prime + horizon; ++u) {
        const StepRecord& rec = trace[u];
        if (static_cast<int>(rec.x1.size()) != initial.n() || rec.step_class.empty())
            throw invalid_parameter("decompose: needs full-level step records");
    }

    const auto in_set = [&](int v) { return v >= suffix_start; };

    DecomposedSeries out;
    out.position = position;
    out.suffix_start = suffix_start;
    out.base_time = t_prime;
    out.K = initial.K();

    // Replay mass up to the base time.
    long long mass = initial.mass_num(position, suffix_start, initial.r() - 1);
    for (long long u = 0; u < t_prime; ++u) {
        const StepRecord& rec = trace[u];
        const int w = rec.winner_index == 1 ? rec.x1[position] : rec.x2[position];
        const int l = rec.winner_index == 1 ? rec.x2[position] : rec.x1[position];
        mass += in_set(w) - in_set(l);
    }
    out.start_mass_num = mass;
    out.random_walk_series.push_back(mass);
    out.biased_series.push_back(mass);

    for (long long u = t_prime; u < t_prime + horizon; ++u) {
        const StepRecord& rec = trace[u];
        const int w = rec.winner_index == 1 ? rec.x1[position] : rec.x2[position];
        const int l = rec.winner_index == 1 ? rec.x2[position] : rec.x1[position];
        const long long delta = in_set(w) - in_set(l);
        mass += delta;
        const long long event_time = u + 1;
        if (rec.step_class[position] == StepClass::biased) {
            out.biased_times.push_back(event_time);
            out.biased_deltas.push_back(delta);
            out.biased_series.push_back(out.biased_series.back() + delta);
        } else {
            out.random_walk_times.push_back(event_time);
            out.random_walk_deltas.push_back(delta);
            out.random_walk_series.push_back(out.random_walk_series.back() + delta);
        }
    }
    out.end_mass_num = mass;
    return out;
}

} // namespace rcga
