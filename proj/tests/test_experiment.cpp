#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rcga/experiment.hpp"

using namespace rcga;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse_str(const std::string& text) {
    std::stringstream ss(text);
    return parse_config(ss);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    return line;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("config parsing accepts the documented keys") {
    const auto cfg = parse_str("kind = scaling\n"
                               "objective = g-onemax\n"
                               "n = 64,128,256\n"
                               "r = 8\n"
                               "K = linear-r-rule\n"
                               "k_c = 0.25\n"
                               "repetitions = 50\n"
                               "seed = 7\n"
                               "max_iterations = 10x-bound\n"
                               "trace = none\n"
                               "# a comment\n"
                               "require_normalized_band = 3.0\n");
    CHECK(cfg.kind == ExperimentConfig::Kind::scaling);
    CHECK(cfg.n_grid == std::vector<int>{64, 128, 256});
    CHECK(cfg.r_grid == std::vector<int>{8});
    CHECK(cfg.k_rule == ExperimentConfig::KRule::linear_r_rule);
    CHECK(cfg.base_seed == 7);
    CHECK(cfg.max_iter_rule == ExperimentConfig::MaxIterRule::multiple_of_bound);
    CHECK(cfg.max_iter_multiple == Catch::Approx(10.0));
    CHECK(cfg.require_normalized_band == Catch::Approx(3.0));
    CHECK(cfg.objective == "g-onemax");
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_str("n = 4\nr = 4\n"), ConfigError);           // missing kind
    CHECK_THROWS_AS(parse_str("kind = run\nr = 4\n"), ConfigError);      // missing n
    CHECK_THROWS_AS(parse_str("kind = bogus\nn = 1\nr = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_str("kind = run\nn = x\nr = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_str("kind = run\nn = 1\nr = 2\nwat = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_str("kind = run\nn = 1\nr = 2\njust a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_str("kind = run\nn = 1\nr = 2\nobjective = hill\n"), ConfigError);
    CHECK_THROWS_AS(parse_str("kind = run\nn = 1\nr = 2\nrepetitions = 0\n"), ConfigError);
}

TEST_CASE("drift campaigns default to the constant objective") {
    const auto cfg = parse_str("kind = drift\nn = 4\nr = 3\nK = 9\n");
    CHECK(cfg.objective == "constant");
    const auto cfg2 = parse_str("kind = run\nn = 4\nr = 3\nK = 9\n");
    CHECK(cfg2.objective == "g-onemax");
}

TEST_CASE("K materialization follows the formula rules and stays well-behaved") {
    ExperimentConfig cfg;
    cfg.k_rule = ExperimentConfig::KRule::linear_r_rule;
    cfg.k_c = 0.25;
    // 0.25 * 8 * 10 * ln^2(100) * ln^2(8) = 1834.07 -> next multiple of 8
    CHECK(materialize_k(cfg, 100, 8) == 1840);
    CHECK(materialize_k(cfg, 64, 8) == 1200);
    CHECK(materialize_k(cfg, 128, 8) == 2304);
    CHECK(materialize_k(cfg, 256, 8) == 4256);
    CHECK(materialize_k(cfg, 100, 16) == 6528);
    for (int n : {10, 50, 100, 333}) {
        for (int r : {3, 8, 11}) {
            const long long k = materialize_k(cfg, n, r);
            const double formula = 0.25 * r * std::sqrt(static_cast<double>(n)) *
                                   std::pow(std::log(n), 2) * std::pow(std::log(r), 2);
            REQUIRE(k % r == 0);
            REQUIRE(static_cast<double>(k) >= formula);
            REQUIRE(static_cast<double>(k) < formula + 2 * r + 1);
        }
    }

    cfg.k_rule = ExperimentConfig::KRule::quadratic_r_rule;
    cfg.k_c = 1.0;
    const long long k = materialize_k(cfg, 100, 4);
    // 16 * 10 * ln(100) = 736.8 -> 740
    CHECK(k == 740);
    CHECK(k % 4 == 0);
}

TEST_CASE("explicit K honours the rounding switch") {
    ExperimentConfig cfg;
    cfg.k_rule = ExperimentConfig::KRule::explicit_value;
    cfg.k_value = 22;
    cfg.round_k = true;
    CHECK(materialize_k(cfg, 3, 5) == 25);
    cfg.round_k = false;
    CHECK_THROWS_AS(materialize_k(cfg, 3, 5), invalid_parameter);
    cfg.k_value = 25;
    CHECK(materialize_k(cfg, 3, 5) == 25);
}

TEST_CASE("run campaign: the one-position binary cell succeeds everywhere") {
    TempDir dir("rcga_test_run");
    auto cfg = parse_str("kind = run\nn = 1\nr = 2\nK = 2\nrepetitions = 100\nseed = 1\n"
                         "max_iterations = 10000\nrequire_success_fraction = 1.0\n");
    const auto result = run_campaign(cfg, dir.str());
    CHECK(result.status == CampaignStatus::ok);

    CHECK(first_line(dir.path / "run.csv") == "replica,seed,iterations,found");
    const std::string summary = slurp(dir.path / "summary.txt");
    CHECK(summary.find("success_fraction = 1") != std::string::npos);
    CHECK(summary.find("rng = splitmix64") != std::string::npos);

    // replica seeds are base_seed + index
    std::ifstream csv(dir.path / "run.csv");
    std::string line;
    std::getline(csv, line); // header
    int idx = 0;
    while (std::getline(csv, line)) {
        std::stringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        CHECK(std::stoi(field) == idx);
        std::getline(row, field, ',');
        CHECK(std::stoll(field) == 1 + idx);
        std::getline(row, field, ',');
        std::getline(row, field, ',');
        CHECK(field == "1"); // found
        ++idx;
    }
    CHECK(idx == 100);
}

TEST_CASE("run campaign reports acceptance failure through the gate") {
    TempDir dir("rcga_test_gate");
    // the constant objective has no optimum, so no run can succeed
    auto cfg = parse_str("kind = run\nobjective = constant\nn = 3\nr = 3\nK = 9\n"
                         "repetitions = 3\nseed = 1\nmax_iterations = 50\n"
                         "require_success_fraction = 0.5\n");
    const auto result = run_campaign(cfg, dir.str());
    CHECK(result.status == CampaignStatus::acceptance_failure);
}

TEST_CASE("campaign artifacts are byte-identical for identical config and seed") {
    TempDir a("rcga_test_det_a"), b("rcga_test_det_b");
    const std::string text = "kind = scaling\nn = 8,16\nr = 4\nK = 16\nrepetitions = 5\n"
                             "seed = 3\nmax_iterations = 5000\n";
    REQUIRE(run_campaign(parse_str(text), a.str()).status == CampaignStatus::ok);
    REQUIRE(run_campaign(parse_str(text), b.str()).status == CampaignStatus::ok);
    for (const char* name : {"scaling.csv", "scaling_summary.csv", "summary.txt"})
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    CHECK(first_line(a.path / "scaling.csv") == "n,r,K,replica,seed,iterations,found");
    CHECK(first_line(a.path / "scaling_summary.csv") ==
          "n,r,K,replicas,q1,median,q3,success_fraction,normalized,comparator,flagged");
}

TEST_CASE("duplicated scaling cells with the same seeds give identical rows") {
    TempDir dir("rcga_test_dup");
    auto cfg = parse_str("kind = scaling\nn = 8,8\nr = 4\nK = 16\nrepetitions = 4\nseed = 5\n"
                         "max_iterations = 5000\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    std::ifstream csv(dir.path / "scaling.csv");
    std::string line;
    std::getline(csv, line);
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    REQUIRE(rows.size() == 8);
    for (int i = 0; i < 4; ++i) CHECK(rows[i] == rows[i + 4]);
}

TEST_CASE("drift campaign: constant objective never produces a biased step") {
    TempDir dir("rcga_test_drift");
    auto cfg = parse_str("kind = drift\nobjective = constant\nn = 6\nr = 4\nK = 40\n"
                         "repetitions = 3\nseed = 1\nmax_iterations = 400\nemit_series = true\n"
                         "track_position = 2\nseries_level = 1\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    CHECK(first_line(dir.path / "drift.csv") ==
          "replica,seed,iterations,biased_steps,random_walk_steps");
    std::ifstream csv(dir.path / "drift.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::stringstream row(line);
        std::string field;
        for (int f = 0; f < 4; ++f) std::getline(row, field, ',');
        CHECK(field == "0"); // biased_steps
    }
    CHECK(first_line(dir.path / "series_r0.csv") ==
          "t,position,class,delta_numerator,K,mu_numerator");
    // every series row is a random-walk event
    std::ifstream series(dir.path / "series_r0.csv");
    std::getline(series, line);
    long long rows = 0;
    while (std::getline(series, line)) {
        CHECK(line.find(",random-walk,") != std::string::npos);
        ++rows;
    }
    CHECK(rows == 400);
}

TEST_CASE("phases campaign writes spans and the retention summary") {
    TempDir dir("rcga_test_phases");
    auto cfg = parse_str("kind = phases\nn = 12\nr = 6\nK = 120\nrepetitions = 2\nseed = 2\n"
                         "max_iterations = 60000\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    CHECK(first_line(dir.path / "phases_r0.csv") ==
          "position,kappa,start,end,skipped,ratio_start,ratio_end");
    CHECK(first_line(dir.path / "phase_ratios_r1.csv") ==
          "position,kappa,nu,start_num,start_den,end_num,end_den,retained");
    const std::string summary = slurp(dir.path / "summary.txt");
    CHECK(summary.find("retention_fraction = ") != std::string::npos);
    CHECK(summary.find("levels = ") != std::string::npos);
}

TEST_CASE("phases campaign marks unfinished phases as censored") {
    TempDir dir("rcga_test_phases_censored");
    // a tiny budget guarantees open phases at termination
    auto cfg = parse_str("kind = phases\nn = 6\nr = 5\nK = 100\nrepetitions = 1\nseed = 4\n"
                         "max_iterations = 5\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    std::ifstream csv(dir.path / "phases_r0.csv");
    std::string line;
    std::getline(csv, line);
    bool saw_censored = false;
    while (std::getline(csv, line)) saw_censored = saw_censored || line.find(",-1,") != std::string::npos;
    CHECK(saw_censored);
    // censored phases never enter the retention statistic
    const std::string summary = slurp(dir.path / "summary.txt");
    CHECK(summary.find("pairs_total = 0") != std::string::npos);
}

TEST_CASE("different base seeds give different artifacts") {
    TempDir a("rcga_test_seed_a"), b("rcga_test_seed_b");
    const std::string base = "kind = run\nn = 6\nr = 3\nK = 9\nrepetitions = 5\n"
                             "max_iterations = 3000\nseed = ";
    REQUIRE(run_campaign(parse_str(base + "1\n"), a.str()).status == CampaignStatus::ok);
    REQUIRE(run_campaign(parse_str(base + "2\n"), b.str()).status == CampaignStatus::ok);
    CHECK(slurp(a.path / "run.csv") != slurp(b.path / "run.csv"));
}

TEST_CASE("phases campaign needs the hierarchy") {
    TempDir dir("rcga_test_phases_r2");
    auto cfg = parse_str("kind = phases\nn = 4\nr = 2\nK = 8\nrepetitions = 1\n"
                         "max_iterations = 100\n");
    CHECK(run_campaign(cfg, dir.str()).status == CampaignStatus::precondition_error);
}

TEST_CASE("verify campaign aggregates bound reports") {
    TempDir dir("rcga_test_verify");
    auto cfg = parse_str("kind = verify\noracles = convolution,mult-drift\nsamples = 2000\n"
                         "runs = 2000\nseed = 9\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    CHECK(first_line(dir.path / "verify.csv") ==
          "oracle,parameters,bound,empirical,samples,status");
    const std::string csv = slurp(dir.path / "verify.csv");
    CHECK(csv.find("convolution,") != std::string::npos);
    CHECK(csv.find("mult-drift,") != std::string::npos);
    CHECK(csv.find("satisfied") != std::string::npos);
    // the parameters column is a quoted JSON object
    CHECK(csv.find("\"{\"\"instances\"\":") != std::string::npos);
}

TEST_CASE("verify campaign rejects unknown oracle names") {
    TempDir dir("rcga_test_verify_bad");
    auto cfg = parse_str("kind = verify\noracles = convolution,not-an-oracle\n");
    CHECK(run_campaign(cfg, dir.str()).status == CampaignStatus::config_error);
}

TEST_CASE("campaign status maps precondition failures") {
    TempDir dir("rcga_test_precond");
    // explicit ill-behaved K with rounding disabled
    auto cfg = parse_str("kind = run\nn = 3\nr = 5\nK = 22\nround_k = false\n"
                         "repetitions = 1\nmax_iterations = 10\n");
    CHECK(run_campaign(cfg, dir.str()).status == CampaignStatus::precondition_error);
}

TEST_CASE("run_campaign_file surfaces config errors without artifacts") {
    TempDir dir("rcga_test_badfile");
    const fs::path cfg_path = dir.path.parent_path() / "rcga_bad_config.cfg";
    {
        std::ofstream out(cfg_path);
        out << "kind = run\nno equals sign here\n";
    }
    const auto result = run_campaign_file(cfg_path.string(), dir.str());
    CHECK(result.status == CampaignStatus::config_error);
    CHECK_FALSE(fs::exists(dir.path));
    fs::remove(cfg_path);
    const auto missing = run_campaign_file("/nonexistent/path.cfg", dir.str());
    CHECK(missing.status == CampaignStatus::config_error);
}

TEST_CASE("scaling campaign emits the SVG chart on request") {
    TempDir dir("rcga_test_plot");
    auto cfg = parse_str("kind = scaling\nn = 8,16\nr = 4\nK = 16\nrepetitions = 3\nseed = 1\n"
                         "max_iterations = 5000\nemit_plots = true\n");
    REQUIRE(run_campaign(cfg, dir.str()).status == CampaignStatus::ok);
    const std::string svg = slurp(dir.path / "scaling_normalized.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
