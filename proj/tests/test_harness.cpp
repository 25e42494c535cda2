#include "doctest.h"

#include <cmath>
#include <sstream>

#include "echelon/config_io.hpp"
#include "echelon/errors.hpp"
#include "echelon/experiment.hpp"
#include "echelon/metrics.hpp"
#include "echelon/scenario_grid.hpp"

using namespace echelon;

TEST_CASE("grid has 40 cases and is order-stable") {
    const NetworkConfig base = default_base_network();
    const auto grid = generate_grid(base);
    CHECK(grid.size() == 40);
    CHECK(grid.front().name == "base");
    const auto again = generate_grid(base);
    REQUIRE(again.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i].name == again[i].name);
    // Names are unique.
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j)
            CHECK(grid[i].name != grid[j].name);
}

TEST_CASE("mu variation scales local demand means") {
    const auto grid = generate_grid(default_base_network());
    const auto it = std::find_if(grid.begin(), grid.end(),
                                 [](const ScenarioCase& c) { return c.name == "mu_x0.25"; });
    REQUIRE(it != grid.end());
    CHECK(it->net.locals[0].demand.mean == doctest::Approx(0.5));
    CHECK(it->net.locals[0].demand.variance == doctest::Approx(4.0)); // unchanged
    CHECK(it->net.locals[7].demand.mean == doctest::Approx(2.25));
}

TEST_CASE("network-size variation copies warehouse 1") {
    const auto grid = generate_grid(default_base_network());
    const auto it =
        std::find_if(grid.begin(), grid.end(),
                     [](const ScenarioCase& c) { return c.name == "network_size_10"; });
    REQUIRE(it != grid.end());
    CHECK(it->net.locals.size() == 10);
    for (const auto& w : it->net.locals) {
        CHECK(w.demand.mean == doctest::Approx(2.0));
        CHECK(w.order_quantity == 50);
    }
    CHECK(it->net.subbatch == 50);
}

TEST_CASE("local order-quantity variation rounds and refreshes the subbatch") {
    const auto grid = generate_grid(default_base_network());
    const auto it = std::find_if(grid.begin(), grid.end(), [](const ScenarioCase& c) {
        return c.name == "Q_local_x0.25";
    });
    REQUIRE(it != grid.end());
    CHECK(it->net.locals[0].order_quantity == 13); // 50/4 rounded up
    CHECK(it->net.locals[2].order_quantity == 25);
    CHECK(it->net.subbatch == 1);
}

TEST_CASE("fill-target variation is absolute") {
    const auto grid = generate_grid(default_base_network());
    const auto it = std::find_if(grid.begin(), grid.end(), [](const ScenarioCase& c) {
        return c.name == "fill_target_0.25";
    });
    REQUIRE(it != grid.end());
    for (const auto& w : it->net.locals)
        CHECK(w.fill_target == doctest::Approx(0.25));
}

TEST_CASE("central lead variation scales the random variable") {
    const auto grid = generate_grid(default_base_network());
    const auto it = std::find_if(grid.begin(), grid.end(), [](const ScenarioCase& c) {
        return c.name == "lead_central_x2";
    });
    REQUIRE(it != grid.end());
    CHECK(it->net.central.lead.mean == doctest::Approx(120.0));
    CHECK(it->net.central.lead.variance == doctest::Approx(3600.0));
}

TEST_CASE("price variations are flagged as accuracy no-ops") {
    const auto grid = generate_grid(default_base_network());
    int noops = 0;
    for (const auto& c : grid)
        if (c.accuracy_noop())
            ++noops;
    CHECK(noops == 3);
}

TEST_CASE("default central scenarios") {
    const auto scenarios = default_central_scenarios();
    REQUIRE(scenarios.size() == 4);
    CHECK(scenarios[0].name == "low");
    CHECK(scenarios[0].prescribed_fill == doctest::Approx(0.20));
    CHECK(scenarios[3].name == "high");
    CHECK(scenarios[3].manual_override);
}

TEST_CASE("heterogeneity is the relative deviation from the mean") {
    const std::vector<double> xs{50, 50, 100, 100, 150, 150, 200, 200};
    // mean 125
    CHECK(heterogeneity(xs, 0) == doctest::Approx(75.0 / 125.0));
    CHECK(heterogeneity(xs, 7) == doctest::Approx(75.0 / 125.0));
    CHECK_THROWS_AS(heterogeneity(xs, 99), DomainError);
}

namespace {

WaitObservation obs(const std::string& c, const std::string& w, WaitMethod m, double cm,
                    double cs, double sm, double ss) {
    WaitObservation o;
    o.scenario = "s";
    o.case_name = c;
    o.warehouse = w;
    o.method = m;
    o.computed_mean = cm;
    o.computed_sd = cs;
    o.simulated_mean = sm;
    o.simulated_sd = ss;
    return o;
}

} // namespace

TEST_CASE("error metrics") {
    SUBCASE("perfect agreement gives zero errors") {
        const std::vector<WaitObservation> v{obs("a", "1", WaitMethod::NB, 3, 2, 3, 2)};
        const ErrorStats s = error_metrics(v);
        CHECK(s.error_mean == doctest::Approx(0.0));
        CHECK(s.abs_error_mean == doctest::Approx(0.0));
        CHECK(s.count == 1);
    }

    SUBCASE("a single case off by two days") {
        const std::vector<WaitObservation> v{obs("a", "1", WaitMethod::NB, 5, 2, 3, 2)};
        const ErrorStats s = error_metrics(v);
        CHECK(s.error_mean == doctest::Approx(2.0));
        CHECK(s.abs_error_mean == doctest::Approx(2.0));
    }

    SUBCASE("absolute error dominates the signed error") {
        Rng rng(17);
        std::vector<WaitObservation> v;
        for (int i = 0; i < 200; ++i)
            v.push_back(obs("c" + std::to_string(i), "1", WaitMethod::NB,
                            rng.uniform01() * 10, rng.uniform01() * 5, rng.uniform01() * 10,
                            rng.uniform01() * 5));
        const ErrorStats s = error_metrics(v);
        CHECK(std::abs(s.error_mean) <= s.abs_error_mean + 1e-12);
        CHECK(std::abs(s.error_sd) <= s.abs_error_sd + 1e-12);
    }
}

TEST_CASE("pair_observations rejects mismatched warehouse sets") {
    WaitTimeEstimate est;
    est.method = WaitMethod::NB;
    est.per_warehouse.push_back({"1", {1.0, 1.0}, {}});
    std::vector<std::pair<std::string, WaitStats>> sim{{"2", {0.5, 0.2, 10}}};
    CHECK_THROWS_AS(pair_observations("s", "c", est, sim), KeyMismatch);
    std::vector<std::pair<std::string, WaitStats>> ok{{"1", {0.5, 0.2, 10}}};
    const auto v = pair_observations("s", "c", est, ok);
    REQUIRE(v.size() == 1);
    CHECK(v[0].computed_mean == doctest::Approx(1.0));
    CHECK(v[0].simulated_mean == doctest::Approx(0.5));
}

TEST_CASE("ranking report") {
    const std::vector<WaitMethod> methods{WaitMethod::AXS, WaitMethod::KKSL};

    SUBCASE("a dominating method is best everywhere") {
        std::vector<WaitObservation> v;
        for (int i = 0; i < 10; ++i) {
            const std::string c = "c" + std::to_string(i);
            v.push_back(obs(c, "1", WaitMethod::AXS, 3.0, 3.0, 3.0, 3.0));
            v.push_back(obs(c, "1", WaitMethod::KKSL, 5.0, 5.0, 3.0, 3.0));
        }
        const RankingReport r = ranking_report(v, methods);
        CHECK(r.cases == 10);
        const auto axs = static_cast<std::size_t>(WaitMethod::AXS);
        const auto kksl = static_cast<std::size_t>(WaitMethod::KKSL);
        CHECK(r.mean_rank[axs].best == doctest::Approx(1.0));
        CHECK(r.mean_rank[axs].worst == doctest::Approx(0.0));
        CHECK(r.mean_rank[kksl].best == doctest::Approx(0.0));
        CHECK(r.mean_rank[kksl].worst == doctest::Approx(1.0));
        CHECK(r.combined_rank[axs].best == doctest::Approx(1.0));
    }

    SUBCASE("symmetric errors split the wins evenly") {
        std::vector<WaitObservation> v;
        for (int i = 0; i < 10; ++i) {
            const std::string c = "c" + std::to_string(i);
            const bool axs_wins = i % 2 == 0;
            v.push_back(obs(c, "1", WaitMethod::AXS, axs_wins ? 3.0 : 5.0, 3.0, 3.0, 3.0));
            v.push_back(obs(c, "1", WaitMethod::KKSL, axs_wins ? 5.0 : 3.0, 3.0, 3.0, 3.0));
        }
        const RankingReport r = ranking_report(v, methods);
        const auto axs = static_cast<std::size_t>(WaitMethod::AXS);
        const auto kksl = static_cast<std::size_t>(WaitMethod::KKSL);
        CHECK(r.mean_rank[axs].best == doctest::Approx(0.5));
        CHECK(r.mean_rank[kksl].best == doctest::Approx(0.5));
        // Exactly one best per case: fractions sum to one.
        CHECK(r.mean_rank[axs].best + r.mean_rank[kksl].best == doctest::Approx(1.0));
    }

    SUBCASE("exact ties break in method declaration order") {
        std::vector<WaitObservation> v;
        v.push_back(obs("c", "1", WaitMethod::KKSL, 4.0, 3.0, 3.0, 3.0));
        v.push_back(obs("c", "1", WaitMethod::AXS, 4.0, 3.0, 3.0, 3.0));
        const RankingReport r = ranking_report(v, methods);
        CHECK(r.mean_rank[static_cast<std::size_t>(WaitMethod::AXS)].best ==
              doctest::Approx(1.0));
        CHECK(r.mean_rank[static_cast<std::size_t>(WaitMethod::KKSL)].best ==
              doctest::Approx(0.0));
    }

    SUBCASE("empty groups are flagged, not fatal") {
        const std::vector<WaitObservation> v;
        const RankingReport r = ranking_report(v, methods);
        CHECK(r.empty_group);
        CHECK(r.cases == 0);
    }

    SUBCASE("grouping predicates filter observations") {
        std::vector<WaitObservation> v;
        v.push_back(obs("keep", "1", WaitMethod::AXS, 3.0, 3.0, 3.0, 3.0));
        v.push_back(obs("keep", "1", WaitMethod::KKSL, 5.0, 5.0, 3.0, 3.0));
        v.push_back(obs("drop", "1", WaitMethod::AXS, 9.0, 9.0, 3.0, 3.0));
        v.push_back(obs("drop", "1", WaitMethod::KKSL, 3.0, 3.0, 3.0, 3.0));
        const RankingReport r = ranking_report(
            v, methods, [](const WaitObservation& o) { return o.case_name == "keep"; });
        CHECK(r.cases == 1);
        CHECK(r.mean_rank[static_cast<std::size_t>(WaitMethod::AXS)].best ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("scenario file round-trips") {
    const NetworkConfig net = default_base_network();
    std::ostringstream out;
    write_scenario_file(out, net);
    std::istringstream in(out.str());
    const ScenarioFile file = read_scenario_file(in);
    CHECK(file.net.central.order_quantity == 500);
    CHECK(file.net.central.lead.mean == doctest::Approx(60.0));
    CHECK(file.net.central.lead.variance == doctest::Approx(900.0));
    REQUIRE(file.net.locals.size() == 8);
    CHECK(file.net.locals[0].demand.mean == doctest::Approx(2.0));
    CHECK(file.net.locals[7].order_quantity == 200);
    CHECK(file.net.subbatch == 50);
}

TEST_CASE("scenario file parses variations and overrides") {
    const std::string text = R"(
# two-warehouse sample
[central]
id = 0
Q = 100
lead_mean = 20
lead_sd = 10
price = 0.5
R_override = 400

[warehouse]
id = 1
mu = 2
sigma2 = 4
Q = 20
fill_target = 0.9
lead_mean = 5
lead_sd = 3
price = 1

[variations]
mu = m: 0.25 0.5
network_size = n: 2 4
)";
    std::istringstream in(text);
    const ScenarioFile file = read_scenario_file(in);
    CHECK(file.net.central_R_override == 400);
    CHECK(file.net.central.lead.variance == doctest::Approx(100.0));
    REQUIRE(file.has_variations);
    REQUIRE(file.variations.size() == 2);
    CHECK(file.variations[0].parameter == "mu");
    CHECK(file.variations[0].type == VariationType::Multiplicative);
    CHECK(file.variations[0].values == std::vector<double>{0.25, 0.5});
    CHECK(file.variations[1].type == VariationType::NetworkSize);

    const auto grid = generate_grid(file.net, file.variations);
    CHECK(grid.size() == 5); // base + 2 + 2
}

TEST_CASE("scenario file schema errors") {
    const auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_scenario_file(in);
    };
    CHECK_THROWS_AS(parse("[warehouse]\nid = 1\n"), SchemaError);
    CHECK_THROWS_AS(parse("[central]\nid = 0\nbogus_key = 1\n"), SchemaError);
    CHECK_THROWS_AS(parse("[central]\nid = 0\nQ = not_a_number\n"), SchemaError);
}

TEST_CASE("demand trace parsing preserves intra-day order") {
    NetworkConfig net = default_base_network();
    const std::string csv = "day,warehouse_id,quantity\n"
                            "0,1,3\n"
                            "0,1,1\n"
                            "1,2,5\n"
                            "2,1,2\n";
    std::istringstream in(csv);
    const DemandTrace trace = read_demand_trace(in, net);
    CHECK(trace.days == 3);
    REQUIRE(trace.per_local[0].size() == 3);
    CHECK(trace.per_local[0][0] == std::vector<std::int64_t>{3, 1});
    CHECK(trace.per_local[1][1] == std::vector<std::int64_t>{5});
    CHECK(trace.per_local[0][2] == std::vector<std::int64_t>{2});

    std::istringstream bad_header("day,warehouse,quantity\n");
    CHECK_THROWS_AS(read_demand_trace(bad_header, net), SchemaError);
    std::istringstream bad_wh("day,warehouse_id,quantity\n0,99,1\n");
    CHECK_THROWS_AS(read_demand_trace(bad_wh, net), SchemaError);
    std::istringstream bad_qty("day,warehouse_id,quantity\n0,1,0\n");
    CHECK_THROWS_AS(read_demand_trace(bad_qty, net), SchemaError);
}

TEST_CASE("results csv round-trips losslessly") {
    std::vector<ResultRow> rows{
        {"low", "base", "nb", "1", "simulated_wait_mean", 1.0 / 3.0},
        {"low", "base", "nb", "1", "computed_wait_mean", 0.1234567890123456789},
        {"high", "Q_local_x8", "axs", "0", "central_reorder_point", 123456.0},
    };
    std::ostringstream out;
    write_results_csv(out, rows);
    std::istringstream in(out.str());
    const auto back = read_results_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].scenario == rows[i].scenario);
        CHECK(back[i].case_name == rows[i].case_name);
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].warehouse == rows[i].warehouse);
        CHECK(back[i].metric == rows[i].metric);
        CHECK(back[i].value == rows[i].value); // bitwise
    }
}

TEST_CASE("experiment smoke run on the base case") {
    NetworkConfig base = default_base_network();
    std::vector<ScenarioCase> grid{{"base", std::nullopt, base}};

    ExperimentConfig cfg;
    cfg.sim.horizon = 400;
    cfg.sim.warmup = 100;
    cfg.sim.replications = 3;
    cfg.sim.seed = 13;
    cfg.scenarios = {{"low", 0.20, false}, {"medium_high", 0.95, false}};

    const ExperimentResults results = run_paper_experiment(grid, cfg);
    REQUIRE(results.cells.size() == 8); // 2 scenarios x 4 methods
    CHECK_FALSE(results.any_failed());
    for (const auto& cell : results.cells) {
        CHECK(cell.locals.size() == 8);
        CHECK(cell.central_R % 50 == 0);
        for (const auto& l : cell.locals) {
            CHECK(std::isfinite(l.computed_wait_mean));
            CHECK(l.analytic_fill >= l.fill_target);
        }
    }

    // Same seed, same results.
    const ExperimentResults again = run_paper_experiment(grid, cfg);
    std::ostringstream a, b;
    write_results_csv(a, result_rows(results));
    write_results_csv(b, result_rows(again));
    CHECK(a.str() == b.str());

    // Wait observations reconstruct from the CSV rows.
    const auto obs_direct = results.observations();
    const auto obs_csv = observations_from_rows(result_rows(results));
    CHECK(obs_direct.size() == obs_csv.size());
}

TEST_CASE("manual-override scenarios fail loudly without overrides") {
    NetworkConfig base = default_base_network();
    std::vector<ScenarioCase> grid{{"base", std::nullopt, base}};
    ExperimentConfig cfg;
    cfg.sim.horizon = 300;
    cfg.sim.warmup = 100;
    cfg.sim.replications = 1;
    cfg.scenarios = {{"high", 0.95, true}};
    cfg.methods = {WaitMethod::NB};
    const ExperimentResults results = run_paper_experiment(grid, cfg);
    REQUIRE(results.cells.size() == 1);
    CHECK(results.cells[0].failed);

    cfg.central_overrides[{"high", "base"}] = 4000;
    const ExperimentResults ok = run_paper_experiment(grid, cfg);
    CHECK_FALSE(ok.cells[0].failed);
    CHECK(ok.cells[0].central_R == 4000);
}
