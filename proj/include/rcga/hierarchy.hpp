#pragma once

#include <utility>
#include <vector>

#include "rcga/errors.hpp"
#include "rcga/frequency_matrix.hpp"
#include "rcga/rational.hpp"

namespace rcga {

// Partition of the value range [0, r-1] into blocks whose lower boundaries
// follow the geometric rule cut(k) = ceil((1 - (2/3)^k) * (r - 1)), plus the
// singleton top block {r-1}. Suffix sets are the unions of a block and
// everything above it; they are contiguous, so a start index suffices.
//
// All boundaries are computed in exact integer arithmetic:
//   cut(k) = ceil((r-1) * (3^k - 2^k) / 3^k)
// and the number of levels is the smallest k with (3/2)^k >= r-1, i.e.
// 3^k >= (r-1) * 2^k. Equality never occurs for r >= 3 because no positive
// power of 3/2 is an integer.
struct HierarchyTable {
    struct Block {
        int lo = 0;
        int hi = -1; // lo > hi encodes an empty block
        bool empty() const { return lo > hi; }
        bool contains(int v) const { return lo <= v && v <= hi; }
        int size() const { return empty() ? 0 : hi - lo + 1; }
    };

    int r = 0;
    int top_level = 0;        // index of the singleton block {r-1}
    std::vector<int> cuts;    // cuts[k] = lower boundary of block k, for k < top_level
    std::vector<Block> blocks; // blocks[0 .. top_level]

    int levels() const { return top_level + 1; }

    // First value of suffix set S_level = [suffix_start(level), r-1].
    int suffix_start(int level) const {
        check_level(level);
        return level == top_level ? r - 1 : cuts[level];
    }

    int suffix_size(int level) const { return r - suffix_start(level); }

    // Block index of a value; every value belongs to exactly one block.
    int block_of(int value) const {
        if (value < 0 || value >= r) throw invalid_parameter("HierarchyTable: value out of range");
        return value_to_block_[value];
    }

    void check_level(int level) const {
        if (level < 0 || level > top_level)
            throw invalid_parameter("HierarchyTable: level out of range");
    }

    std::vector<int> value_to_block_; // filled by build_hierarchy
};

// Builds the table for an alphabet of size r >= 3. For r = 2 the partition
// would degenerate to the single block {0} plus {1} with no interior
// structure, so it is rejected; binary runs do not use the hierarchy.
inline HierarchyTable build_hierarchy(int r) {
    if (r < 3) throw invalid_parameter("build_hierarchy: requires r >= 3");

    HierarchyTable h;
    h.r = r;

    // Smallest k with 3^k >= (r-1) * 2^k, evaluated in exact integers.
    {
        long long p3 = 1, p2 = 1;
        int k = 0;
        while (p3 < (r - 1) * p2) {
            p3 *= 3;
            p2 *= 2;
            ++k;
        }
        h.top_level = k;
    }

    // cut(k) = ceil((r-1) * (3^k - 2^k) / 3^k), exact ceiling division.
    h.cuts.resize(h.top_level);
    {
        long long p3 = 1, p2 = 1;
        for (int k = 0; k < h.top_level; ++k) {
            const long long numer = static_cast<long long>(r - 1) * (p3 - p2);
            h.cuts[k] = static_cast<int>((numer + p3 - 1) / p3);
            p3 *= 3;
            p2 *= 2;
        }
    }

    h.blocks.resize(h.levels());
    for (int k = 0; k + 1 < h.top_level; ++k) h.blocks[k] = {h.cuts[k], h.cuts[k + 1] - 1};
    h.blocks[h.top_level - 1] = {h.cuts[h.top_level - 1], r - 2};
    h.blocks[h.top_level] = {r - 1, r - 1};

    h.value_to_block_.resize(r);
    for (int k = 0; k <= h.top_level; ++k)
        for (int v = h.blocks[k].lo; v <= h.blocks[k].hi; ++v) h.value_to_block_[v] = k;

    return h;
}

inline Rational block_mass(const FrequencyMatrix& m, int i, const HierarchyTable& h, int level) {
    h.check_level(level);
    const auto& b = h.blocks[level];
    return b.empty() ? Rational(0, 1) : m.mass(i, b.lo, b.hi);
}

inline Rational suffix_mass(const FrequencyMatrix& m, int i, const HierarchyTable& h, int level) {
    return m.mass(i, h.suffix_start(level), m.r() - 1);
}

// Where a position stands in the hierarchy: `level` is the lowest block that
// still carries probability mass, `confined` says whether everything sits in
// the suffix set of that block (true for every matrix whose rows sum to K;
// kept as an explicit check so corrupted states are visible), and `complete`
// marks rows fully absorbed on the top value.
struct PhaseState {
    int position = 0;
    int level = 0;
    bool confined = false;
    bool complete = false;
};

inline PhaseState phase_state(const FrequencyMatrix& m, int i, const HierarchyTable& h) {
    if (m.r() != h.r) throw invalid_parameter("phase_state: matrix and table disagree on r");
    PhaseState s;
    s.position = i;
    s.level = h.top_level;
    for (int k = 0; k <= h.top_level; ++k) {
        const auto& b = h.blocks[k];
        if (!b.empty() && m.mass_num(i, b.lo, b.hi) > 0) {
            s.level = k;
            break;
        }
    }
    s.confined = m.mass_num(i, h.suffix_start(s.level), m.r() - 1) == m.K();
    s.complete = s.level == h.top_level && s.confined;
    return s;
}

// Online per-position phase log over one run.
//
// A phase for block k at a position starts once k is the lowest block with
// positive mass and ends once the block's mass reaches zero. Blocks that are
// already empty when their turn comes are recorded as skipped with zero
// length. Because values with zero count can never be sampled again, blocks
// empty out monotonically and the per-position level never decreases.
//
// At every phase boundary the tracker snapshots the suffix-mass ratios
// mu(S_{v+1}) / mu(S_v) for all v in [level+1, top_level-1] as exact
// numerator pairs over K.
class PhaseTracker {
  public:
    struct PhaseSpan {
        int position = 0;
        int level = 0;
        long long start = 0;
        long long end = 0;
        bool skipped = false;
        bool censored = false; // run ended before the block emptied
        // (numerator of mu(S_{v+1}), numerator of mu(S_v)) for v = level+1, ...
        std::vector<std::pair<long long, long long>> ratios_start;
        std::vector<std::pair<long long, long long>> ratios_end;
    };

    PhaseTracker(const FrequencyMatrix& m, const HierarchyTable& h) : h_(&h), n_(m.n()), K_(m.K()) {
        if (m.r() != h.r) throw invalid_parameter("PhaseTracker: matrix and table disagree on r");
        const int levels = h.levels();
        block_num_.assign(static_cast<size_t>(n_) * levels, 0);
        current_level_.assign(n_, 0);
        phase_start_.assign(n_, 0);
        open_.assign(n_, 0);
        open_ratios_start_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            long long* bn = block_num_.data() + static_cast<size_t>(i) * levels;
            for (int k = 0; k < levels; ++k) {
                const auto& b = h.blocks[k];
                bn[k] = b.empty() ? 0 : m.mass_num(i, b.lo, b.hi);
            }
            // Initial level; blocks below it (possible for non-uniform start
            // matrices) are emitted as skipped at time 0.
            int level = h.top_level;
            for (int k = 0; k <= h.top_level; ++k)
                if (bn[k] > 0) {
                    level = k;
                    break;
                }
            for (int k = 0; k < level && k < h.top_level; ++k)
                spans_.push_back(zero_length_span(i, k, 0));
            current_level_[i] = level;
            phase_start_[i] = 0;
            open_[i] = level < h.top_level;
            if (open_[i]) open_ratios_start_[i] = ratio_snapshot(i, level);
        }
    }

    // Reports the update of one step: at iteration t the matrix moved from
    // state t to state t+1 by +1 on the winner value and -1 on the loser
    // value (no-op when equal). Phase boundaries land on state index t+1.
    void on_update(int position, int winner_value, int loser_value, long long t) {
        if (winner_value == loser_value) return;
        const int levels = h_->levels();
        long long* bn = block_num_.data() + static_cast<size_t>(position) * levels;
        ++bn[h_->block_of(winner_value)];
        const int bl = h_->block_of(loser_value);
        --bn[bl];
        if (bl != current_level_[position] || bn[bl] != 0 || !open_[position]) return;

        // The active block just emptied: close this phase at state t+1, skip
        // any already-empty successors, and open the next phase.
        const long long boundary = t + 1;
        const int old_level = current_level_[position];
        PhaseSpan closed;
        closed.position = position;
        closed.level = old_level;
        closed.start = phase_start_[position];
        closed.end = boundary;
        closed.ratios_start = std::move(open_ratios_start_[position]);
        closed.ratios_end = ratio_snapshot(position, old_level);
        spans_.push_back(std::move(closed));

        int next = h_->top_level;
        for (int k = old_level + 1; k <= h_->top_level; ++k)
            if (bn[k] > 0) {
                next = k;
                break;
            }
        for (int k = old_level + 1; k < next && k < h_->top_level; ++k)
            spans_.push_back(zero_length_span(position, k, boundary));
        current_level_[position] = next;
        phase_start_[position] = boundary;
        open_[position] = next < h_->top_level;
        if (open_[position]) open_ratios_start_[position] = ratio_snapshot(position, next);
    }

    // Closes still-open phases as censored at the final state index.
    void finish(long long end_state) {
        for (int i = 0; i < n_; ++i)
            if (open_[i]) {
                PhaseSpan s;
                s.position = i;
                s.level = current_level_[i];
                s.start = phase_start_[i];
                s.end = end_state;
                s.censored = true;
                s.ratios_start = std::move(open_ratios_start_[i]);
                s.ratios_end = ratio_snapshot(i, s.level);
                spans_.push_back(std::move(s));
                open_[i] = false;
            }
    }

    const std::vector<PhaseSpan>& spans() const { return spans_; }

  private:
    PhaseSpan zero_length_span(int position, int level, long long at) const {
        PhaseSpan s;
        s.position = position;
        s.level = level;
        s.start = at;
        s.end = at;
        s.skipped = true;
        s.ratios_start = ratio_snapshot(position, level);
        s.ratios_end = s.ratios_start;
        return s;
    }

    std::vector<std::pair<long long, long long>> ratio_snapshot(int position, int level) const {
        const int levels = h_->levels();
        const long long* bn = block_num_.data() + static_cast<size_t>(position) * levels;
        // suffix numerators from the top down
        std::vector<long long> suffix(levels + 1, 0);
        for (int k = h_->top_level; k >= 0; --k) suffix[k] = suffix[k + 1] + bn[k];
        std::vector<std::pair<long long, long long>> out;
        for (int v = level + 1; v < h_->top_level; ++v) out.emplace_back(suffix[v + 1], suffix[v]);
        return out;
    }

    const HierarchyTable* h_;
    int n_;
    long long K_;
    std::vector<long long> block_num_;
    std::vector<int> current_level_;
    std::vector<long long> phase_start_;
    std::vector<char> open_;
    std::vector<std::vector<std::pair<long long, long long>>> open_ratios_start_;
    std::vector<PhaseSpan> spans_;
};

} // namespace rcga
