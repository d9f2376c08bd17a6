#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rcga/eda.hpp"
#include "rcga/instrumentation.hpp"

using namespace rcga;

TEST_CASE("rest sums exclude the inspected position") {
    const std::vector<int> x1 = {1, 2, 3}, x2 = {0, 2, 1};
    const auto rs = rest_sums(x1, x2, 0);
    CHECK(rs.s1 == 5);
    CHECK(rs.s2 == 3);
    CHECK(rs.diff == 2);

    const auto same = rest_sums(x1, x1, 1);
    CHECK(same.diff == 0);

    const std::vector<int> single = {4};
    const auto empty = rest_sums(single, single, 0);
    CHECK(empty.s1 == 0);
    CHECK(empty.s2 == 0);
    CHECK(empty.diff == 0);

    CHECK_THROWS_AS(rest_sums(x1, x2, 3), invalid_parameter);
    CHECK_THROWS_AS(rest_sums(x1, single, 0), invalid_parameter);
}

TEST_CASE("step classification compares the in-position gap to the rest difference") {
    CHECK(classify_step(4, 0, 2, false) == StepClass::biased);
    CHECK(classify_step(1, 0, 2, false) == StepClass::random_walk);
    CHECK(classify_step(3, 3, 0, false) == StepClass::random_walk);
    // negative rest difference: only the magnitude matters
    CHECK(classify_step(0, 4, -2, false) == StepClass::biased);
    CHECK(classify_step(4, 0, -4, false) == StepClass::random_walk); // gap == |diff|
    // overall ties are never biased
    CHECK(classify_step(4, 0, 2, true) == StepClass::random_walk);
}

TEST_CASE("classification is symmetric in the two samples") {
    SplitMix64 rng(17);
    for (int it = 0; it < 2000; ++it) {
        const int a = static_cast<int>(rng.next_below(8));
        const int b = static_cast<int>(rng.next_below(8));
        const auto d = static_cast<long long>(rng.next_below(15)) - 7;
        const bool tied = rng.next_bit();
        CHECK(classify_step(a, b, d, tied) == classify_step(b, a, -d, tied));
    }
}

TEST_CASE("biased steps are won by the larger in-position value under value sums") {
    SplitMix64 rng(23);
    const int n = 6, r = 5;
    for (int it = 0; it < 3000; ++it) {
        std::vector<int> x1(n), x2(n);
        long long f1 = 0, f2 = 0;
        for (int i = 0; i < n; ++i) {
            x1[i] = static_cast<int>(rng.next_below(r));
            x2[i] = static_cast<int>(rng.next_below(r));
            f1 += x1[i];
            f2 += x2[i];
        }
        const bool tied = f1 == f2;
        const int winner_index = tied ? (rng.next_bit() ? 1 : 2) : (f1 > f2 ? 1 : 2);
        const auto rec = make_step_record(0, x1, x2, winner_index, tied);
        for (int i = 0; i < n; ++i) {
            if (rec.step_class[i] != StepClass::biased) continue;
            const int wv = winner_index == 1 ? x1[i] : x2[i];
            const int lv = winner_index == 1 ? x2[i] : x1[i];
            REQUIRE(wv > lv);
        }
    }
}

TEST_CASE("large biased steps need a value in a block against its second suffix") {
    const HierarchyTable h = build_hierarchy(10); // blocks [0..2][3..4][5..6]{7} {} {8}{9}

    // 7 lies in S_2 = [5..9], 1 lies in block 0, step biased, high value won
    CHECK(detect_large_biased(7, 1, 1, StepClass::biased, h) == 0);
    // same values, random-walk step: no large step
    CHECK_FALSE(detect_large_biased(7, 1, 1, StepClass::random_walk, h).has_value());
    // block 1 against block 2 is too close: S_3 starts at 7
    CHECK_FALSE(detect_large_biased(6, 3, 1, StepClass::biased, h).has_value());
    // the low-value sample must have lost
    CHECK_FALSE(detect_large_biased(7, 1, 2, StepClass::biased, h).has_value());
    CHECK(detect_large_biased(1, 7, 2, StepClass::biased, h) == 0);
    // level must leave two suffix levels above
    CHECK_FALSE(detect_large_biased(9, 8, 1, StepClass::biased, h).has_value());
}

TEST_CASE("large biased steps imply a wide in-position gap") {
    const HierarchyTable h = build_hierarchy(16);
    SplitMix64 rng(29);
    for (int it = 0; it < 5000; ++it) {
        const int a = static_cast<int>(rng.next_below(16));
        const int b = static_cast<int>(rng.next_below(16));
        if (a == b) continue;
        const int wi = a > b ? 1 : 2;
        const auto lvl = detect_large_biased(a, b, wi, StepClass::biased, h);
        if (!lvl) continue;
        const int gap = a > b ? a - b : b - a;
        REQUIRE(gap >= h.suffix_start(*lvl + 2) - h.suffix_start(*lvl + 1));
        REQUIRE(h.block_of(std::min(a, b)) == *lvl);
    }
}

TEST_CASE("step records carry exact rest differences") {
    RunConfig cfg;
    cfg.n = 7;
    cfg.r = 4;
    cfg.K = 16;
    cfg.objective = ObjectiveKind::g_onemax;
    cfg.max_iterations = 500;
    cfg.seed = 3;
    cfg.trace_level = TraceLevel::full;
    const RunResult res = run(cfg);
    REQUIRE(res.trace.has_value());
    for (const auto& rec : *res.trace) {
        for (int i = 0; i < 7; ++i) {
            const auto rs = rest_sums(rec.x1, rec.x2, i);
            REQUIRE(rec.rest_diff[i] == rs.diff);
            REQUIRE(std::abs(rec.rest_diff[i]) <= 6 * 3); // (n-1)(r-1)
        }
    }
}

TEST_CASE("decompose splits a constant-objective run into pure random walk") {
    RunConfig cfg;
    cfg.n = 5;
    cfg.r = 4;
    cfg.K = 40;
    cfg.objective = ObjectiveKind::constant;
    cfg.max_iterations = 200;
    cfg.seed = 8;
    cfg.trace_level = TraceLevel::full;
    const RunResult res = run(cfg);
    REQUIRE(res.trace.has_value());

    const auto initial = FrequencyMatrix::uniform(5, 4, 40);
    const HierarchyTable h = build_hierarchy(4);
    const auto series = decompose(*res.trace, initial, 2, h.suffix_start(1), 0, 200);

    CHECK(series.biased_times.empty());
    CHECK(series.random_walk_times.size() == 200);
    // with no biased events, the filtered random-walk series is the raw mass
    // series; verify against an independent matrix replay
    FrequencyMatrix replay = initial;
    REQUIRE(series.random_walk_series[0] == replay.mass_num(2, h.suffix_start(1), 3));
    for (size_t s = 0; s < res.trace->size(); ++s) {
        const auto& rec = (*res.trace)[s];
        const auto& w = rec.winner_index == 1 ? rec.x1 : rec.x2;
        const auto& l = rec.winner_index == 1 ? rec.x2 : rec.x1;
        replay.update(w, l);
        REQUIRE(series.random_walk_series[s + 1] == replay.mass_num(2, h.suffix_start(1), 3));
    }
}

TEST_CASE("decompose satisfies the exact partition identity") {
    RunConfig cfg;
    cfg.n = 6;
    cfg.r = 5;
    cfg.K = 30;
    cfg.objective = ObjectiveKind::g_onemax;
    cfg.max_iterations = 400;
    cfg.seed = 99;
    cfg.trace_level = TraceLevel::full;
    const RunResult res = run(cfg);
    REQUIRE(res.trace.has_value());
    const auto horizon = static_cast<long long>(res.trace->size());
    const auto initial = FrequencyMatrix::uniform(6, 5, 30);
    const HierarchyTable h = build_hierarchy(5);

    for (int position : {0, 3, 5}) {
        for (int level = 0; level <= h.top_level; ++level) {
            const long long t_prime = position; // a few different base times
            const auto series = decompose(*res.trace, initial, position, h.suffix_start(level),
                                          t_prime, horizon - t_prime);
            // both time sequences are strictly increasing and partition the span
            long long prev = series.base_time;
            for (long long t : series.random_walk_times) {
                REQUIRE(t > prev);
                prev = t;
            }
            prev = series.base_time;
            for (long long t : series.biased_times) {
                REQUIRE(t > prev);
                prev = t;
            }
            REQUIRE(static_cast<long long>(series.random_walk_times.size() +
                                           series.biased_times.size()) == horizon - t_prime);

            // the summed contributions reconstruct the raw change exactly
            long long delta_sum = 0;
            for (long long d : series.random_walk_deltas) delta_sum += d;
            for (long long d : series.biased_deltas) delta_sum += d;
            REQUIRE(delta_sum == series.end_mass_num - series.start_mass_num);

            // and the raw end mass matches an independent replay oracle
            FrequencyMatrix replay = initial;
            for (const auto& rec : *res.trace) {
                const auto& w = rec.winner_index == 1 ? rec.x1 : rec.x2;
                const auto& l = rec.winner_index == 1 ? rec.x2 : rec.x1;
                replay.update(w, l);
            }
            REQUIRE(series.end_mass_num ==
                    replay.mass_num(position, h.suffix_start(level), 4));
        }
    }
}

TEST_CASE("summed contributions reconstruct the mass at every prefix") {
    RunConfig cfg;
    cfg.n = 4;
    cfg.r = 4;
    cfg.K = 20;
    cfg.objective = ObjectiveKind::g_onemax;
    cfg.max_iterations = 300;
    cfg.seed = 41;
    cfg.trace_level = TraceLevel::full;
    const RunResult res = run(cfg);
    REQUIRE(res.trace.has_value());
    const auto initial = FrequencyMatrix::uniform(4, 4, 20);
    const auto horizon = static_cast<long long>(res.trace->size());
    const auto series = decompose(*res.trace, initial, 1, 2, 0, horizon);

    // walk the two event streams in time order and compare the running sum
    // against an independent matrix replay after every single iteration
    FrequencyMatrix replay = initial;
    size_t rw = 0, bi = 0;
    long long running = series.start_mass_num;
    for (long long u = 0; u < horizon; ++u) {
        const auto& rec = (*res.trace)[u];
        const auto& w = rec.winner_index == 1 ? rec.x1 : rec.x2;
        const auto& l = rec.winner_index == 1 ? rec.x2 : rec.x1;
        replay.update(w, l);
        const long long event_time = u + 1;
        if (rw < series.random_walk_times.size() && series.random_walk_times[rw] == event_time) {
            running += series.random_walk_deltas[rw];
            ++rw;
        } else {
            REQUIRE(bi < series.biased_times.size());
            REQUIRE(series.biased_times[bi] == event_time);
            running += series.biased_deltas[bi];
            ++bi;
        }
        REQUIRE(running == replay.mass_num(1, 2, 3));
    }
    REQUIRE(rw == series.random_walk_times.size());
    REQUIRE(bi == series.biased_times.size());
}

TEST_CASE("decompose on an absorbed stretch yields zero deltas") {
    // hand-built trace over an absorbed matrix: both samples equal the
    // absorbed values, so every update cancels
    const auto absorbed = FrequencyMatrix::from_counts(
        2, 3, 6, {{0, 0, 6}, {0, 6, 0}});
    std::vector<StepRecord> trace;
    const std::vector<int> vals = {2, 1};
    for (long long t = 0; t < 20; ++t) trace.push_back(make_step_record(t, vals, vals, 1, true));
    const auto series = decompose(trace, absorbed, 0, 1, 0, 20);
    for (long long d : series.random_walk_deltas) CHECK(d == 0);
    CHECK(series.biased_deltas.empty());
    CHECK(series.start_mass_num == series.end_mass_num);
}

TEST_CASE("decompose rejects stretches the trace does not cover") {
    const auto initial = FrequencyMatrix::uniform(2, 3, 6);
    std::vector<StepRecord> trace;
    const std::vector<int> vals = {0, 1};
    for (long long t = 0; t < 5; ++t) trace.push_back(make_step_record(t, vals, vals, 1, true));
    CHECK_THROWS_AS(decompose(trace, initial, 0, 1, 0, 6), invalid_parameter);
    CHECK_THROWS_AS(decompose(trace, initial, 0, 1, 3, 3), invalid_parameter);
    CHECK_THROWS_AS(decompose(trace, initial, 2, 1, 0, 5), invalid_parameter);
    CHECK_THROWS_AS(decompose(trace, initial, 0, 3, 0, 5), invalid_parameter);
}
