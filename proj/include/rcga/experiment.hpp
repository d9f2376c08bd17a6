#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rcga/eda.hpp"
#include "rcga/errors.hpp"
#include "rcga/hierarchy.hpp"
#include "rcga/plot.hpp"
#include "rcga/stats.hpp"
#include "rcga/theory_oracles.hpp"

namespace rcga {

// Problems with the configuration file itself (syntax, unknown keys or
// values, missing required keys). Distinct from precondition failures, which
// concern parameter values that the algorithms reject.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Process-level outcome of a campaign; the numeric values are the CLI exit
// codes.
enum class CampaignStatus : int {
    ok = 0,
    config_error = 2,
    precondition_error = 3,
    acceptance_failure = 4,
};

struct CampaignResult {
    CampaignStatus status = CampaignStatus::ok;
    std::string message;
};

// Declarative description of one experiment campaign. Parsed from a plain
// key = value file; see the README for the key reference.
struct ExperimentConfig {
    enum class Kind { run, scaling, drift, phases, verify };
    enum class KRule { explicit_value, linear_r_rule, quadratic_r_rule };
    enum class MaxIterRule { auto_budget, explicit_value, multiple_of_bound };

    Kind kind = Kind::run;
    std::string objective; // empty: g-onemax, except drift defaults to constant
    std::vector<int> n_grid;
    std::vector<int> r_grid;

    KRule k_rule = KRule::linear_r_rule;
    long long k_value = 0; // for explicit_value
    double k_c = 0.25;     // constant c in the K formulas
    bool round_k = true;   // round K up to the next multiple of r

    long long repetitions = 1;
    uint64_t base_seed = 1;

    MaxIterRule max_iter_rule = MaxIterRule::auto_budget;
    long long max_iter_value = 0;
    double max_iter_multiple = 50.0;

    TraceLevel trace = TraceLevel::none;
    int threads = 0; // 0: hardware concurrency
    bool emit_plots = false;

    // drift studies
    int track_position = 0;
    int series_level = 1;
    bool emit_series = false;

    // verify campaigns
    std::vector<std::string> oracles;
    double significance = 1e-3;
    long long samples = 100000;
    long long runs = 10000; // replications for run-based verifiers

    // optional acceptance gates
    std::optional<double> require_success_fraction;
    std::optional<double> require_normalized_band;
    std::optional<double> require_retention_fraction;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool have_kind = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "kind") {
            if (val == "run") cfg.kind = ExperimentConfig::Kind::run;
            else if (val == "scaling") cfg.kind = ExperimentConfig::Kind::scaling;
            else if (val == "drift") cfg.kind = ExperimentConfig::Kind::drift;
            else if (val == "phases") cfg.kind = ExperimentConfig::Kind::phases;
            else if (val == "verify") cfg.kind = ExperimentConfig::Kind::verify;
            else throw ConfigError("config: unknown kind: " + val);
            have_kind = true;
        } else if (key == "objective") {
            if (val != "g-onemax" && val != "r-onemax" && val != "constant")
                throw ConfigError("config: unknown objective: " + val);
            cfg.objective = val;
        } else if (key == "n") {
            cfg.n_grid = detail::parse_int_list(key, val);
        } else if (key == "r") {
            cfg.r_grid = detail::parse_int_list(key, val);
        } else if (key == "K") {
            if (val == "linear-r-rule") cfg.k_rule = ExperimentConfig::KRule::linear_r_rule;
            else if (val == "quadratic-r-rule") cfg.k_rule = ExperimentConfig::KRule::quadratic_r_rule;
            else {
                cfg.k_rule = ExperimentConfig::KRule::explicit_value;
                cfg.k_value = detail::parse_int(key, val);
            }
        } else if (key == "k_c") {
            cfg.k_c = detail::parse_double(key, val);
        } else if (key == "round_k") {
            cfg.round_k = detail::parse_bool(key, val);
        } else if (key == "repetitions") {
            cfg.repetitions = detail::parse_int(key, val);
        } else if (key == "seed") {
            cfg.base_seed = static_cast<uint64_t>(detail::parse_int(key, val));
        } else if (key == "max_iterations") {
            if (val == "auto") {
                cfg.max_iter_rule = ExperimentConfig::MaxIterRule::auto_budget;
            } else if (val.size() > 7 && val.substr(val.size() - 7) == "x-bound") {
                cfg.max_iter_rule = ExperimentConfig::MaxIterRule::multiple_of_bound;
                cfg.max_iter_multiple = detail::parse_double(key, val.substr(0, val.size() - 7));
            } else {
                cfg.max_iter_rule = ExperimentConfig::MaxIterRule::explicit_value;
                cfg.max_iter_value = detail::parse_int(key, val);
            }
        } else if (key == "trace") {
            try {
                cfg.trace = trace_level_from_name(val);
            } catch (const invalid_parameter& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "emit_plots") {
            cfg.emit_plots = detail::parse_bool(key, val);
        } else if (key == "track_position") {
            cfg.track_position = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "series_level") {
            cfg.series_level = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "emit_series") {
            cfg.emit_series = detail::parse_bool(key, val);
        } else if (key == "oracles") {
            cfg.oracles = detail::split_list(val);
        } else if (key == "significance") {
            cfg.significance = detail::parse_double(key, val);
        } else if (key == "samples") {
            cfg.samples = detail::parse_int(key, val);
        } else if (key == "runs") {
            cfg.runs = detail::parse_int(key, val);
        } else if (key == "require_success_fraction") {
            cfg.require_success_fraction = detail::parse_double(key, val);
        } else if (key == "require_normalized_band") {
            cfg.require_normalized_band = detail::parse_double(key, val);
        } else if (key == "require_retention_fraction") {
            cfg.require_retention_fraction = detail::parse_double(key, val);
        } else {
            throw ConfigError("config: unknown key: " + key);
        }
    }
    if (!have_kind) throw ConfigError("config: missing required key 'kind'");
    if (cfg.kind != ExperimentConfig::Kind::verify) {
        if (cfg.n_grid.empty()) throw ConfigError("config: missing required key 'n'");
        if (cfg.r_grid.empty()) throw ConfigError("config: missing required key 'r'");
    }
    if (cfg.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    if (cfg.objective.empty())
        cfg.objective = cfg.kind == ExperimentConfig::Kind::drift ? "constant" : "g-onemax";
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config(in);
}

// Materializes K for one (n, r) cell. Formula values are rounded up to the
// next multiple of r so that K is always well-behaved and never below the
// formula value; explicit values are only rounded when round_k is set.
inline long long materialize_k(const ExperimentConfig& cfg, int n, int r) {
    const auto round_up = [&](double value) {
        auto k = static_cast<long long>(std::ceil(value));
        if (k < 1) k = 1;
        const long long rem = k % r;
        return rem == 0 ? k : k + (r - rem);
    };
    switch (cfg.k_rule) {
    case ExperimentConfig::KRule::linear_r_rule: {
        const double ln_n = std::log(static_cast<double>(n));
        const double ln_r = std::log(static_cast<double>(r));
        return round_up(cfg.k_c * r * std::sqrt(static_cast<double>(n)) * ln_n * ln_n * ln_r * ln_r);
    }
    case ExperimentConfig::KRule::quadratic_r_rule: {
        const double ln_n = std::log(static_cast<double>(n));
        return round_up(cfg.k_c * r * r * std::sqrt(static_cast<double>(n)) * ln_n);
    }
    case ExperimentConfig::KRule::explicit_value: {
        long long k = cfg.k_value;
        if (k < 1) throw invalid_parameter("K must be >= 1");
        if (k % r != 0) {
            if (!cfg.round_k)
                throw invalid_parameter("explicit K is not well-behaved and rounding is disabled");
            k += r - k % r;
        }
        return k;
    }
    }
    throw invalid_parameter("unknown K rule");
}

// The K-rule guarantee assumes r grows slower than n^(1/6); outside that
// range the experiment still runs but the summary carries a warning.
inline std::optional<std::string> r_range_warning(int n, int r) {
    long long r6 = 1;
    for (int i = 0; i < 6; ++i) r6 *= r;
    if (r6 > n)
        return "r^6 exceeds n; the K-rule runtime guarantee may not apply at this scale";
    return std::nullopt;
}

// Iteration budget for one cell.
inline long long materialize_max_iterations(const ExperimentConfig& cfg, int n, int r,
                                            long long K) {
    switch (cfg.max_iter_rule) {
    case ExperimentConfig::MaxIterRule::explicit_value:
        if (cfg.max_iter_value < 1) throw invalid_parameter("max_iterations must be >= 1");
        return cfg.max_iter_value;
    case ExperimentConfig::MaxIterRule::auto_budget:
    case ExperimentConfig::MaxIterRule::multiple_of_bound: {
        const double mult = cfg.max_iter_rule == ExperimentConfig::MaxIterRule::auto_budget
                                ? 50.0
                                : cfg.max_iter_multiple;
        const double scale = static_cast<double>(K) * std::sqrt(static_cast<double>(n)) *
                             std::max(1.0, std::log(static_cast<double>(n))) *
                             std::max(0.5, std::log(static_cast<double>(r)));
        return std::max<long long>(100, static_cast<long long>(std::ceil(mult * scale)));
    }
    }
    throw invalid_parameter("unknown max_iterations rule");
}

// Runs fn(0..count-1) on a small worker pool; exceptions are rethrown on the
// caller's thread after all workers drained.
inline void parallel_tasks(long long count, int threads,
                           const std::function<void(long long)>& fn) {
    if (count <= 0) return;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long long>(threads, count));
    if (threads == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const long long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace detail {

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw invalid_parameter("cannot open output file: " + path);
        out_ << header << '\n';
    }
    void row(const std::string& line) { out_ << line << '\n'; }

  private:
    std::ofstream out_;
};

inline void write_summary(const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path);
    if (!out) throw invalid_parameter("cannot open output file: " + path);
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

// Flat JSON object for the verify CSV's parameters column.
inline std::string parameters_json(const std::vector<std::pair<std::string, double>>& params) {
    std::string out = "{";
    for (size_t i = 0; i < params.size(); ++i) {
        if (i) out += ",";
        out += "\"" + params[i].first + "\":" + fmt_double(params[i].second);
    }
    out += "}";
    return out;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

struct ReplicaOutcome {
    long long iterations = 0;
    bool found = false;
};

struct CellSummary {
    int n = 0, r = 0;
    long long K = 0;
    long long replicas = 0;
    double q1 = 0, median = 0, q3 = 0;
    double success_fraction = 0;
    double normalized = 0;
    double comparator = 0;
};

inline CellSummary summarize_cell(int n, int r, long long K,
                                  const std::vector<ReplicaOutcome>& outcomes) {
    CellSummary cs;
    cs.n = n;
    cs.r = r;
    cs.K = K;
    cs.replicas = static_cast<long long>(outcomes.size());
    std::vector<double> iters;
    long long found = 0;
    iters.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        iters.push_back(static_cast<double>(o.iterations));
        found += o.found;
    }
    std::sort(iters.begin(), iters.end());
    cs.q1 = quantile_sorted(iters, 0.25);
    cs.median = quantile_sorted(iters, 0.5);
    cs.q3 = quantile_sorted(iters, 0.75);
    cs.success_fraction = static_cast<double>(found) / static_cast<double>(outcomes.size());
    cs.normalized = cs.median / gom_runtime_scale(std::max(n, 2), r, K);
    cs.comparator = comparison_runtime_bound(n, r, K);
    return cs;
}

} // namespace detail

// --------------------------------------------------------------------------
// Campaign drivers. Each writes CSV artifacts plus a summary.txt of key/value
// lines into out_dir and returns the process status. Artifacts are a pure
// function of (config, base seed): replicas use seed = base_seed + index and
// results are aggregated in index order regardless of thread scheduling.
// --------------------------------------------------------------------------

inline CampaignResult campaign_run(const ExperimentConfig& cfg, const std::string& out_dir);
inline CampaignResult campaign_scaling(const ExperimentConfig& cfg, const std::string& out_dir);
inline CampaignResult campaign_drift(const ExperimentConfig& cfg, const std::string& out_dir);
inline CampaignResult campaign_phases(const ExperimentConfig& cfg, const std::string& out_dir);
inline CampaignResult campaign_verify(const ExperimentConfig& cfg, const std::string& out_dir);

inline CampaignResult run_campaign(const ExperimentConfig& cfg, const std::string& out_dir) {
    try {
        std::filesystem::create_directories(out_dir);
        switch (cfg.kind) {
        case ExperimentConfig::Kind::run: return campaign_run(cfg, out_dir);
        case ExperimentConfig::Kind::scaling: return campaign_scaling(cfg, out_dir);
        case ExperimentConfig::Kind::drift: return campaign_drift(cfg, out_dir);
        case ExperimentConfig::Kind::phases: return campaign_phases(cfg, out_dir);
        case ExperimentConfig::Kind::verify: return campaign_verify(cfg, out_dir);
        }
        return {CampaignStatus::config_error, "unknown campaign kind"};
    } catch (const ConfigError& e) {
        return {CampaignStatus::config_error, e.what()};
    } catch (const invalid_parameter& e) {
        return {CampaignStatus::precondition_error, e.what()};
    } catch (const matrix_corruption& e) {
        return {CampaignStatus::precondition_error, e.what()};
    }
}

inline CampaignResult run_campaign_file(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        return {CampaignStatus::config_error, e.what()};
    }
    return run_campaign(cfg, out_dir);
}

inline CampaignResult campaign_run(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.n_grid.size() != 1 || cfg.r_grid.size() != 1)
        throw ConfigError("kind=run expects a single (n, r) cell; use kind=scaling for grids");
    const int n = cfg.n_grid[0], r = cfg.r_grid[0];
    const long long K = materialize_k(cfg, n, r);
    const long long max_iter = materialize_max_iterations(cfg, n, r, K);
    const Objective f = Objective::from_name(cfg.objective, n, r);

    std::vector<detail::ReplicaOutcome> outcomes(cfg.repetitions);
    parallel_tasks(cfg.repetitions, cfg.threads, [&](long long idx) {
        RunConfig rc;
        rc.n = n;
        rc.r = r;
        rc.K = K;
        rc.objective = f.kind;
        rc.max_iterations = max_iter;
        rc.seed = cfg.base_seed + static_cast<uint64_t>(idx);
        NullObserver obs;
        const RunResult res = run_with_observer(rc, obs);
        outcomes[idx] = {res.iterations_used, res.optimum_found};
    });

    detail::CsvWriter csv(out_dir + "/run.csv", "replica,seed,iterations,found");
    for (long long idx = 0; idx < cfg.repetitions; ++idx)
        csv.row(std::to_string(idx) + "," + std::to_string(cfg.base_seed + idx) + "," +
                std::to_string(outcomes[idx].iterations) + "," +
                std::to_string(outcomes[idx].found ? 1 : 0));

    const auto cs = detail::summarize_cell(n, r, K, outcomes);
    std::vector<std::pair<std::string, std::string>> kv = {
        {"kind", "run"},
        {"objective", cfg.objective},
        {"n", std::to_string(n)},
        {"r", std::to_string(r)},
        {"K", std::to_string(K)},
        {"max_iterations", std::to_string(max_iter)},
        {"repetitions", std::to_string(cfg.repetitions)},
        {"rng", kRngAlgorithm},
        {"base_seed", std::to_string(cfg.base_seed)},
        {"success_fraction", detail::fmt_double(cs.success_fraction)},
        {"median_iterations", detail::fmt_double(cs.median)},
    };
    if (const auto warning = r_range_warning(n, r)) kv.emplace_back("warning", *warning);

    CampaignResult result;
    if (cfg.require_success_fraction && cs.success_fraction < *cfg.require_success_fraction) {
        result.status = CampaignStatus::acceptance_failure;
        result.message = "success fraction " + detail::fmt_double(cs.success_fraction) +
                         " below required " + detail::fmt_double(*cfg.require_success_fraction);
    }
    kv.emplace_back("status", result.status == CampaignStatus::ok ? "ok" : "acceptance-failure");
    detail::write_summary(out_dir + "/summary.txt", kv);
    return result;
}

inline CampaignResult campaign_scaling(const ExperimentConfig& cfg, const std::string& out_dir) {
    struct Cell {
        int n, r;
        long long K, max_iter;
    };
    std::vector<Cell> cells;
    for (int r : cfg.r_grid)
        for (int n : cfg.n_grid) {
            const long long K = materialize_k(cfg, n, r);
            cells.push_back({n, r, K, materialize_max_iterations(cfg, n, r, K)});
        }
    const Objective probe = Objective::from_name(cfg.objective, cfg.n_grid[0], cfg.r_grid[0]);

    const long long reps = cfg.repetitions;
    std::vector<std::vector<detail::ReplicaOutcome>> outcomes(cells.size());
    for (auto& v : outcomes) v.resize(reps);
    parallel_tasks(static_cast<long long>(cells.size()) * reps, cfg.threads, [&](long long task) {
        const auto ci = static_cast<size_t>(task / reps);
        const long long idx = task % reps;
        const Cell& cell = cells[ci];
        RunConfig rc;
        rc.n = cell.n;
        rc.r = cell.r;
        rc.K = cell.K;
        rc.objective = probe.kind;
        rc.max_iterations = cell.max_iter;
        rc.seed = cfg.base_seed + static_cast<uint64_t>(idx);
        NullObserver obs;
        const RunResult res = run_with_observer(rc, obs);
        outcomes[ci][idx] = {res.iterations_used, res.optimum_found};
    });

    detail::CsvWriter csv(out_dir + "/scaling.csv", "n,r,K,replica,seed,iterations,found");
    for (size_t ci = 0; ci < cells.size(); ++ci)
        for (long long idx = 0; idx < reps; ++idx) {
            const auto& o = outcomes[ci][idx];
            csv.row(std::to_string(cells[ci].n) + "," + std::to_string(cells[ci].r) + "," +
                    std::to_string(cells[ci].K) + "," + std::to_string(idx) + "," +
                    std::to_string(cfg.base_seed + idx) + "," + std::to_string(o.iterations) +
                    "," + std::to_string(o.found ? 1 : 0));
        }

    std::vector<detail::CellSummary> summaries;
    detail::CsvWriter sum_csv(out_dir + "/scaling_summary.csv",
                              "n,r,K,replicas,q1,median,q3,success_fraction,normalized,"
                              "comparator,flagged");
    for (size_t ci = 0; ci < cells.size(); ++ci) {
        const auto cs = detail::summarize_cell(cells[ci].n, cells[ci].r, cells[ci].K, outcomes[ci]);
        summaries.push_back(cs);
        sum_csv.row(std::to_string(cs.n) + "," + std::to_string(cs.r) + "," + std::to_string(cs.K) +
                    "," + std::to_string(cs.replicas) + "," + detail::fmt_double(cs.q1) + "," +
                    detail::fmt_double(cs.median) + "," + detail::fmt_double(cs.q3) + "," +
                    detail::fmt_double(cs.success_fraction) + "," +
                    detail::fmt_double(cs.normalized) + "," + detail::fmt_double(cs.comparator) +
                    "," + (cs.success_fraction < 1.0 ? "1" : "0"));
    }

    if (cfg.emit_plots) {
        SvgChart chart("normalized runtime vs n", "n", "median / (K sqrt(n) ln n ln r)");
        for (int r : cfg.r_grid) {
            std::vector<double> xs, ys;
            for (const auto& cs : summaries)
                if (cs.r == r) {
                    xs.push_back(static_cast<double>(cs.n));
                    ys.push_back(cs.normalized);
                }
            chart.add_series("r=" + std::to_string(r), std::move(xs), std::move(ys));
        }
        chart.write(out_dir + "/scaling_normalized.svg");
    }

    CampaignResult result;
    std::string gate_note = "ok";
    if (cfg.require_normalized_band) {
        for (int r : cfg.r_grid) {
            double lo = 1e300, hi = 0.0;
            for (const auto& cs : summaries)
                if (cs.r == r) {
                    lo = std::min(lo, cs.normalized);
                    hi = std::max(hi, cs.normalized);
                }
            if (lo > 0.0 && hi / lo > *cfg.require_normalized_band) {
                result.status = CampaignStatus::acceptance_failure;
                gate_note = "normalized band " + detail::fmt_double(hi / lo) + " exceeds " +
                            detail::fmt_double(*cfg.require_normalized_band) + " at r=" +
                            std::to_string(r);
            }
        }
    }
    if (cfg.require_success_fraction)
        for (const auto& cs : summaries)
            if (cs.success_fraction < *cfg.require_success_fraction) {
                result.status = CampaignStatus::acceptance_failure;
                gate_note = "cell n=" + std::to_string(cs.n) + " r=" + std::to_string(cs.r) +
                            " success fraction below requirement";
            }
    result.message = result.status == CampaignStatus::ok ? "" : gate_note;

    std::vector<std::pair<std::string, std::string>> kv = {
        {"kind", "scaling"},
        {"objective", cfg.objective},
        {"cells", std::to_string(cells.size())},
        {"repetitions", std::to_string(reps)},
        {"rng", kRngAlgorithm},
        {"base_seed", std::to_string(cfg.base_seed)}};
    for (const auto& cell : cells)
        if (const auto warning = r_range_warning(cell.n, cell.r)) {
            kv.emplace_back("warning", *warning);
            break;
        }
    kv.emplace_back("status", result.status == CampaignStatus::ok ? "ok" : gate_note);
    detail::write_summary(out_dir + "/summary.txt", kv);
    return result;
}

inline CampaignResult campaign_drift(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.n_grid.size() != 1 || cfg.r_grid.size() != 1)
        throw ConfigError("kind=drift expects a single (n, r) cell");
    const int n = cfg.n_grid[0], r = cfg.r_grid[0];
    const long long K = materialize_k(cfg, n, r);
    const long long max_iter = materialize_max_iterations(cfg, n, r, K);
    const Objective f = Objective::from_name(cfg.objective, n, r);
    if (cfg.track_position < 0 || cfg.track_position >= n)
        throw invalid_parameter("drift: track_position out of range");

    // Tracked value set for the per-step series: the suffix set of
    // series_level for r >= 3, or {1} in the binary case.
    int set_start = 1;
    if (r >= 3) {
        const HierarchyTable h = build_hierarchy(r);
        h.check_level(cfg.series_level);
        set_start = h.suffix_start(cfg.series_level);
    }

    struct DriftOutcome {
        long long iterations = 0;
        long long biased = 0;
        long long random_walk = 0;
        std::vector<std::array<long long, 3>> series; // (class, delta, mass numerator)
    };

    struct DriftObserver {
        int n;
        int track_position;
        int set_start;
        bool record;
        long long mass_num;
        DriftOutcome* out;
        void on_step(long long, const FrequencyMatrix&, const Individual& x1, const Individual& x2,
                     int winner_index, bool tied) {
            const long long sum1 = x1.value_sum, sum2 = x2.value_sum;
            StepClass tracked = StepClass::random_walk;
            for (int i = 0; i < n; ++i) {
                const long long diff = (sum1 - x1.values[i]) - (sum2 - x2.values[i]);
                const StepClass cls = classify_step(x1.values[i], x2.values[i], diff, tied);
                if (cls == StepClass::biased) ++out->biased;
                else ++out->random_walk;
                if (i == track_position) tracked = cls;
            }
            if (record) {
                const int w = winner_index == 1 ? x1.values[track_position] : x2.values[track_position];
                const int l = winner_index == 1 ? x2.values[track_position] : x1.values[track_position];
                const long long delta = (w >= set_start) - (l >= set_start);
                mass_num += delta;
                out->series.push_back({static_cast<long long>(tracked), delta, mass_num});
            }
        }
    };

    std::vector<DriftOutcome> outcomes(cfg.repetitions);
    parallel_tasks(cfg.repetitions, cfg.threads, [&](long long idx) {
        RunConfig rc;
        rc.n = n;
        rc.r = r;
        rc.K = K;
        rc.objective = f.kind;
        rc.max_iterations = max_iter;
        rc.seed = cfg.base_seed + static_cast<uint64_t>(idx);
        DriftObserver obs;
        obs.n = n;
        obs.track_position = cfg.track_position;
        obs.set_start = set_start;
        obs.record = cfg.emit_series;
        obs.mass_num = (K / r) * (r - set_start);
        obs.out = &outcomes[idx];
        const RunResult res = run_with_observer(rc, obs);
        outcomes[idx].iterations = res.iterations_used;
    });

    detail::CsvWriter csv(out_dir + "/drift.csv",
                          "replica,seed,iterations,biased_steps,random_walk_steps");
    long long biased_total = 0;
    for (long long idx = 0; idx < cfg.repetitions; ++idx) {
        const auto& o = outcomes[idx];
        biased_total += o.biased;
        csv.row(std::to_string(idx) + "," + std::to_string(cfg.base_seed + idx) + "," +
                std::to_string(o.iterations) + "," + std::to_string(o.biased) + "," +
                std::to_string(o.random_walk));
    }

    if (cfg.emit_series)
        for (long long idx = 0; idx < cfg.repetitions; ++idx) {
            detail::CsvWriter series(out_dir + "/series_r" + std::to_string(idx) + ".csv",
                                     "t,position,class,delta_numerator,K,mu_numerator");
            for (size_t t = 0; t < outcomes[idx].series.size(); ++t) {
                const auto& row = outcomes[idx].series[t];
                series.row(std::to_string(t) + "," + std::to_string(cfg.track_position) + "," +
                           (row[0] == 1 ? "biased" : "random-walk") + "," +
                           std::to_string(row[1]) + "," + std::to_string(K) + "," +
                           std::to_string(row[2]));
            }
        }

    detail::write_summary(out_dir + "/summary.txt",
                          {{"kind", "drift"},
                           {"objective", cfg.objective},
                           {"n", std::to_string(n)},
                           {"r", std::to_string(r)},
                           {"K", std::to_string(K)},
                           {"max_iterations", std::to_string(max_iter)},
                           {"repetitions", std::to_string(cfg.repetitions)},
                           {"rng", kRngAlgorithm},
                           {"base_seed", std::to_string(cfg.base_seed)},
                           {"biased_steps_total", std::to_string(biased_total)},
                           {"status", "ok"}});
    return {};
}

inline CampaignResult campaign_phases(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.n_grid.size() != 1 || cfg.r_grid.size() != 1)
        throw ConfigError("kind=phases expects a single (n, r) cell");
    const int n = cfg.n_grid[0], r = cfg.r_grid[0];
    if (r < 3) throw invalid_parameter("phases: the value hierarchy needs r >= 3");
    const long long K = materialize_k(cfg, n, r);
    const long long max_iter = materialize_max_iterations(cfg, n, r, K);
    const Objective f = Objective::from_name(cfg.objective, n, r);
    const HierarchyTable h = build_hierarchy(r);

    struct PhaseObserver {
        PhaseTracker tracker;
        void on_step(long long t, const FrequencyMatrix&, const Individual& x1,
                     const Individual& x2, int winner_index, bool) {
            const Individual& w = winner_index == 1 ? x1 : x2;
            const Individual& l = winner_index == 1 ? x2 : x1;
            for (size_t i = 0; i < w.values.size(); ++i)
                tracker.on_update(static_cast<int>(i), w.values[i], l.values[i], t);
        }
    };

    struct PhasesOutcome {
        long long iterations = 0;
        bool found = false;
        std::vector<PhaseTracker::PhaseSpan> spans;
    };

    std::vector<PhasesOutcome> outcomes(cfg.repetitions);
    parallel_tasks(cfg.repetitions, cfg.threads, [&](long long idx) {
        RunConfig rc;
        rc.n = n;
        rc.r = r;
        rc.K = K;
        rc.objective = f.kind;
        rc.max_iterations = max_iter;
        rc.seed = cfg.base_seed + static_cast<uint64_t>(idx);
        PhaseObserver obs{PhaseTracker(FrequencyMatrix::uniform(n, r, K), h)};
        const RunResult res = run_with_observer(rc, obs);
        obs.tracker.finish(res.iterations_used);
        outcomes[idx] = {res.iterations_used, res.optimum_found, obs.tracker.spans()};
    });

    // Retention factor (1 - 1/levels)^3 as an exact integer pair.
    const long long ks = h.top_level;
    const long long retain_num = (ks - 1) * (ks - 1) * (ks - 1);
    const long long retain_den = ks * ks * ks;
    long long pairs_total = 0, pairs_retained = 0;

    const auto ratio_str = [](const std::pair<long long, long long>& p) {
        return p.second == 0 ? std::string("-1")
                             : detail::fmt_double(static_cast<double>(p.first) /
                                                  static_cast<double>(p.second));
    };

    for (long long idx = 0; idx < cfg.repetitions; ++idx) {
        detail::CsvWriter phases(out_dir + "/phases_r" + std::to_string(idx) + ".csv",
                                 "position,kappa,start,end,skipped,ratio_start,ratio_end");
        detail::CsvWriter ratios(out_dir + "/phase_ratios_r" + std::to_string(idx) + ".csv",
                                 "position,kappa,nu,start_num,start_den,end_num,end_den,retained");
        for (const auto& span : outcomes[idx].spans) {
            const std::string lead = std::to_string(span.position) + "," +
                                     std::to_string(span.level) + ",";
            const std::string first_start =
                span.ratios_start.empty() ? "-1" : ratio_str(span.ratios_start[0]);
            const std::string first_end =
                span.ratios_end.empty() ? "-1" : ratio_str(span.ratios_end[0]);
            phases.row(lead + std::to_string(span.start) + "," +
                       (span.censored ? "-1" : std::to_string(span.end)) + "," +
                       (span.skipped ? "1" : "0") + "," + first_start + "," + first_end);
            if (span.skipped || span.censored) continue;

            bool any_applicable = false, all_retained = true;
            for (size_t vi = 0; vi < span.ratios_start.size(); ++vi) {
                const auto& [sn, sd] = span.ratios_start[vi];
                const auto& [en, ed] = span.ratios_end[vi];
                if (sd == 0 || ed == 0) continue; // ratio undefined, not applicable
                any_applicable = true;
                // end >= (1 - 1/levels)^3 * start, cross-multiplied exactly
                const bool retained = static_cast<__int128>(en) * sd * retain_den >=
                                      static_cast<__int128>(sn) * ed * retain_num;
                all_retained = all_retained && retained;
                ratios.row(lead + std::to_string(span.level + 1 + static_cast<int>(vi)) + "," +
                           std::to_string(sn) + "," + std::to_string(sd) + "," +
                           std::to_string(en) + "," + std::to_string(ed) + "," +
                           (retained ? "1" : "0"));
            }
            if (any_applicable) {
                ++pairs_total;
                pairs_retained += all_retained;
            }
        }
    }

    const double retention_fraction =
        pairs_total == 0 ? 1.0
                         : static_cast<double>(pairs_retained) / static_cast<double>(pairs_total);

    CampaignResult result;
    if (cfg.require_retention_fraction && retention_fraction < *cfg.require_retention_fraction) {
        result.status = CampaignStatus::acceptance_failure;
        result.message = "phase-ratio retention " + detail::fmt_double(retention_fraction) +
                         " below required " + detail::fmt_double(*cfg.require_retention_fraction);
    }

    std::vector<std::pair<std::string, std::string>> kv = {
        {"kind", "phases"},
        {"objective", cfg.objective},
        {"n", std::to_string(n)},
        {"r", std::to_string(r)},
        {"K", std::to_string(K)},
        {"levels", std::to_string(h.top_level)},
        {"max_iterations", std::to_string(max_iter)},
        {"repetitions", std::to_string(cfg.repetitions)},
        {"rng", kRngAlgorithm},
        {"base_seed", std::to_string(cfg.base_seed)},
        {"retention_factor",
         detail::fmt_double(static_cast<double>(retain_num) / static_cast<double>(retain_den))},
        {"pairs_total", std::to_string(pairs_total)},
        {"pairs_retained", std::to_string(pairs_retained)},
        {"retention_fraction", detail::fmt_double(retention_fraction)}};
    if (const auto warning = r_range_warning(n, r)) kv.emplace_back("warning", *warning);
    kv.emplace_back("status", result.status == CampaignStatus::ok ? "ok" : result.message);
    detail::write_summary(out_dir + "/summary.txt", kv);
    return result;
}

inline CampaignResult campaign_verify(const ExperimentConfig& cfg, const std::string& out_dir) {
    static const std::vector<std::string> kAllOracles = {
        "convolution",  "variance",        "biased-window", "neutral-concentration",
        "reinforced-tail", "drift",        "mult-drift"};
    std::vector<std::string> oracles = cfg.oracles.empty() ? kAllOracles : cfg.oracles;
    for (const auto& name : oracles)
        if (std::find(kAllOracles.begin(), kAllOracles.end(), name) == kAllOracles.end())
            throw ConfigError("verify: unknown oracle name: " + name);

    std::vector<BoundReport> reports;
    uint64_t seed = cfg.base_seed;
    for (const auto& name : oracles) {
        seed += 1000; // separate stream per oracle, deterministic in config order
        if (name == "convolution") {
            reports.push_back(verify_convolution(cfg.samples, seed));
        } else if (name == "variance") {
            for (int j_star : {0, (11 + 2) / 3, 11 - 2})
                reports.push_back(verify_variance(101, 11, j_star, cfg.samples, seed));
        } else if (name == "biased-window") {
            for (long long delta : {0LL, 1LL, 4LL})
                reports.push_back(
                    verify_gap_window(50, 8, delta, cfg.samples, seed, cfg.significance));
        } else if (name == "neutral-concentration") {
            reports.push_back(verify_neutral_concentration(20, 4, 400, 1000, 0.5, cfg.runs, seed,
                                                           cfg.significance));
        } else if (name == "reinforced-tail") {
            reports.push_back(verify_reinforced_tail(1000, 0.5, 0.5, 0.5, 1000.0, 1.0, cfg.samples,
                                                     seed, cfg.significance));
        } else if (name == "drift") {
            reports.push_back(
                verify_drift(101, 11, 0, 0.4, cfg.samples, seed, cfg.significance));
        } else if (name == "mult-drift") {
            reports.push_back(verify_mult_drift(1.0, 1e-3, 0.01, std::log(100.0), 0.02,
                                                cfg.runs, seed, cfg.significance));
        }
    }

    detail::CsvWriter csv(out_dir + "/verify.csv", "oracle,parameters,bound,empirical,samples,status");
    bool any_violated = false, any_precondition = false;
    for (const auto& rep : reports) {
        any_violated = any_violated || rep.status == BoundStatus::violated;
        any_precondition = any_precondition || rep.status == BoundStatus::precondition_failed;
        csv.row(rep.oracle + "," + detail::csv_quote(detail::parameters_json(rep.parameters)) +
                "," + detail::fmt_double(rep.bound) + "," +
                (rep.empirical ? detail::fmt_double(*rep.empirical) : "") + "," +
                std::to_string(rep.samples) + "," + to_string(rep.status));
    }

    CampaignResult result;
    if (any_precondition) {
        result.status = CampaignStatus::precondition_error;
        result.message = "one or more oracles rejected their preconditions";
    } else if (any_violated) {
        result.status = CampaignStatus::acceptance_failure;
        result.message = "statistically significant bound violation";
    }
    detail::write_summary(out_dir + "/summary.txt",
                          {{"kind", "verify"},
                           {"oracles", std::to_string(reports.size())},
                           {"significance", detail::fmt_double(cfg.significance)},
                           {"rng", kRngAlgorithm},
                           {"base_seed", std::to_string(cfg.base_seed)},
                           {"status", result.status == CampaignStatus::ok ? "ok" : result.message}});
    return result;
}

} // namespace rcga
