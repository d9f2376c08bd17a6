#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcga/errors.hpp"
#include "rcga/fitness.hpp"
#include "rcga/frequency_matrix.hpp"
#include "rcga/hierarchy.hpp"
#include "rcga/instrumentation.hpp"
#include "rcga/rng.hpp"

namespace rcga {

// One sampled search point with its cached objective value. `value_sum` is
// the plain sum of components, which the step instrumentation needs even for
// objectives whose fitness is not that sum.
struct Individual {
    std::vector<int> values;
    long long fitness = 0;
    long long value_sum = 0;
};

inline void sample_individual(const FrequencyMatrix& m, SplitMix64& rng, const Objective& f,
                              Individual& out) {
    out.values.resize(m.n());
    long long sum = 0;
    for (int i = 0; i < m.n(); ++i) {
        const int v = m.sample_value(i, rng);
        out.values[i] = v;
        sum += v;
    }
    out.value_sum = sum;
    out.fitness = f.evaluate(out.values);
}

inline Individual sample_individual(const FrequencyMatrix& m, SplitMix64& rng, const Objective& f) {
    Individual out;
    sample_individual(m, rng, f, out);
    return out;
}

struct CompeteResult {
    int winner_index = 1; // 1 or 2, referring to the argument order
    bool tied = false;
};

// Ranks two individuals by fitness; an exact tie is broken by one fresh
// uniform bit from the stream. The bit is only consumed when a tie occurs.
inline CompeteResult compete(const Individual& x1, const Individual& x2, SplitMix64& rng) {
    CompeteResult res;
    if (x1.fitness > x2.fitness) {
        res.winner_index = 1;
    } else if (x2.fitness > x1.fitness) {
        res.winner_index = 2;
    } else {
        res.tied = true;
        res.winner_index = rng.next_bit() ? 1 : 2;
    }
    return res;
}

enum class TraceLevel { none, masses_only, full };

inline TraceLevel trace_level_from_name(const std::string& name) {
    if (name == "none") return TraceLevel::none;
    if (name == "masses-only") return TraceLevel::masses_only;
    if (name == "full") return TraceLevel::full;
    throw invalid_parameter("unknown trace level: " + name);
}

struct RunConfig {
    int n = 0;
    int r = 0;
    long long K = 0;
    ObjectiveKind objective = ObjectiveKind::g_onemax;
    long long max_iterations = 0;
    uint64_t seed = 0;
    TraceLevel trace_level = TraceLevel::none;
};

// Per-iteration snapshots of the suffix masses mu_i(S_level), recorded as
// numerators over K. Snapshot t describes matrix state t; there are
// iterations_used + 1 snapshots including the initial and final state.
struct MassTrace {
    int n = 0;
    int levels = 0;
    std::vector<long long> data; // [snapshot][position][level], flattened

    long long snapshots() const {
        return n == 0 ? 0 : static_cast<long long>(data.size()) / (static_cast<long long>(n) * levels);
    }
    long long at(long long snapshot, int position, int level) const {
        return data[(snapshot * n + position) * static_cast<long long>(levels) + level];
    }
};

struct RunResult {
    long long iterations_used = 0;
    bool optimum_found = false;
    FrequencyMatrix final_matrix;
    std::optional<std::vector<StepRecord>> trace; // full trace level only
    std::optional<MassTrace> mass_trace;          // masses-only trace level
    uint64_t seed = 0;
    std::string rng_algorithm = kRngAlgorithm;
};

namespace detail {

inline void validate_run_config(const RunConfig& cfg) {
    if (cfg.n < 1) throw invalid_parameter("run: n must be >= 1");
    if (cfg.r < 2) throw invalid_parameter("run: r must be >= 2");
    if (cfg.K < 1 || cfg.K % cfg.r != 0)
        throw invalid_parameter("run: K is not well-behaved (K mod r != 0)");
    if (cfg.max_iterations < 1) throw invalid_parameter("run: max_iterations must be >= 1");
}

} // namespace detail

// Core loop. Per iteration: sample two individuals (x1 first), rank them,
// hand the pre-update state to the observer, apply the +-1/K update, then
// stop if an optimal individual was sampled. Each iteration costs exactly two
// objective evaluations; the whole run is a deterministic function of
// (config, seed).
//
// Observer contract:
//   obs.on_step(t, m, x1, x2, winner_index, tied)  with m in state t.
template <typename Observer>
RunResult run_with_observer(const RunConfig& cfg, Observer&& obs) {
    detail::validate_run_config(cfg);
    const Objective f = Objective::make(cfg.objective, cfg.n, cfg.r);

    RunResult result;
    result.seed = cfg.seed;
    FrequencyMatrix m = FrequencyMatrix::uniform(cfg.n, cfg.r, cfg.K);
    SplitMix64 rng(cfg.seed);
    Individual x1, x2;

    long long t = 0;
    for (; t < cfg.max_iterations; ++t) {
        sample_individual(m, rng, f, x1);
        sample_individual(m, rng, f, x2);
        const CompeteResult cmp = compete(x1, x2, rng);
        obs.on_step(t, m, x1, x2, cmp.winner_index, cmp.tied);
        const Individual& winner = cmp.winner_index == 1 ? x1 : x2;
        const Individual& loser = cmp.winner_index == 1 ? x2 : x1;
        m.update(winner.values, loser.values);
        if (f.optimum && (x1.fitness == *f.optimum || x2.fitness == *f.optimum)) {
            result.optimum_found = true;
            ++t;
            break;
        }
    }
    result.iterations_used = result.optimum_found ? t : cfg.max_iterations;
    result.final_matrix = std::move(m);
    return result;
}

struct NullObserver {
    void on_step(long long, const FrequencyMatrix&, const Individual&, const Individual&, int,
                 bool) {}
};

// Records a full StepRecord per iteration. Memory grows linearly with the
// horizon; meant for desk-scale analysis runs.
class FullTraceObserver {
  public:
    explicit FullTraceObserver(int r) {
        if (r >= 3) hierarchy_ = build_hierarchy(r);
    }

    void on_step(long long t, const FrequencyMatrix&, const Individual& x1, const Individual& x2,
                 int winner_index, bool tied) {
        trace_.push_back(make_step_record(t, x1.values, x2.values, winner_index, tied,
                                          hierarchy_ ? &*hierarchy_ : nullptr));
    }

    std::vector<StepRecord> take() { return std::move(trace_); }

  private:
    std::optional<HierarchyTable> hierarchy_;
    std::vector<StepRecord> trace_;
};

// Records per-position suffix masses over the hierarchy each iteration,
// maintained incrementally from the update deltas.
class MassTraceObserver {
  public:
    MassTraceObserver(const FrequencyMatrix& initial, const HierarchyTable& h)
        : h_(&h), n_(initial.n()) {
        current_.resize(static_cast<size_t>(n_) * h.levels());
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < h.levels(); ++k)
                current_[static_cast<size_t>(i) * h.levels() + k] =
                    initial.mass_num(i, h.suffix_start(k), initial.r() - 1);
        trace_.n = n_;
        trace_.levels = h.levels();
        snapshot(); // state 0
    }

    void on_step(long long, const FrequencyMatrix&, const Individual& x1, const Individual& x2,
                 int winner_index, bool tied) {
        const Individual& winner = winner_index == 1 ? x1 : x2;
        const Individual& loser = winner_index == 1 ? x2 : x1;
        (void)tied;
        for (int i = 0; i < n_; ++i) {
            const int w = winner.values[i], l = loser.values[i];
            if (w == l) continue;
            long long* row = current_.data() + static_cast<size_t>(i) * h_->levels();
            // value v contributes to every suffix set with start <= v
            for (int k = 0; k < h_->levels(); ++k) {
                const int start = h_->suffix_start(k);
                row[k] += (w >= start) - (l >= start);
            }
        }
        snapshot();
    }

    MassTrace take() { return std::move(trace_); }

  private:
    void snapshot() { trace_.data.insert(trace_.data.end(), current_.begin(), current_.end()); }

    const HierarchyTable* h_;
    int n_;
    std::vector<long long> current_;
    MassTrace trace_;
};

// Runs with the configured trace level attached to the result.
inline RunResult run(const RunConfig& cfg) {
    switch (cfg.trace_level) {
    case TraceLevel::none: {
        NullObserver obs;
        return run_with_observer(cfg, obs);
    }
    case TraceLevel::full: {
        FullTraceObserver obs(cfg.r);
        RunResult res = run_with_observer(cfg, obs);
        res.trace = obs.take();
        return res;
    }
    case TraceLevel::masses_only: {
        if (cfg.r < 3)
            throw invalid_parameter("run: masses-only trace needs the value hierarchy (r >= 3)");
        const HierarchyTable h = build_hierarchy(cfg.r);
        const FrequencyMatrix initial = FrequencyMatrix::uniform(cfg.n, cfg.r, cfg.K);
        MassTraceObserver obs(initial, h);
        RunResult res = run_with_observer(cfg, obs);
        res.mass_trace = obs.take();
        return res;
    }
    }
    throw invalid_parameter("run: unknown trace level");
}

} // namespace rcga
