#include "echelon/experiment.hpp"

#include <cmath>
#include <cstdio>

#include "echelon/errors.hpp"

namespace echelon {

std::vector<WaitObservation> ExperimentResults::observations() const {
    std::vector<WaitObservation> out;
    for (const auto& cell : cells) {
        if (cell.failed)
            continue;
        for (const auto& l : cell.locals) {
            WaitObservation o;
            o.scenario = cell.scenario;
            o.case_name = cell.case_name;
            o.warehouse = l.id;
            o.method = cell.method;
            o.computed_mean = l.computed_wait_mean;
            o.computed_sd = l.computed_wait_sd;
            o.simulated_mean = l.sim_wait_mean;
            o.simulated_sd = l.sim_wait_sd;
            out.push_back(o);
        }
    }
    return out;
}

bool ExperimentResults::any_failed() const {
    for (const auto& cell : cells)
        if (cell.failed)
            return true;
    return false;
}

namespace {

CaseResult make_failed(const std::string& scenario, const ScenarioCase& c, WaitMethod method,
                       const std::string& error) {
    CaseResult r;
    r.scenario = scenario;
    r.case_name = c.name;
    r.method = method;
    r.failed = true;
    r.error = error;
    r.accuracy_noop = c.accuracy_noop();
    return r;
}

} // namespace

ExperimentResults run_paper_experiment(const std::vector<ScenarioCase>& grid,
                                       const ExperimentConfig& cfg) {
    cfg.sim.check();
    ExperimentResults results;

    for (const auto& scenario_case : grid) {
        const NetworkConfig& net = scenario_case.net;

        // R0-independent analytics, shared across scenarios and methods.
        CentralModel central;
        CentralWaitInputs wait_inputs;
        std::string case_error;
        try {
            central = build_central_model(net, cfg.quad_nodes);
            wait_inputs = central_wait_inputs(net, cfg.quad_nodes);
        } catch (const std::exception& e) {
            case_error = e.what();
        }

        for (const auto& scenario : cfg.scenarios) {
            if (!case_error.empty()) {
                for (WaitMethod m : cfg.methods)
                    results.cells.push_back(
                        make_failed(scenario.name, scenario_case, m, case_error));
                continue;
            }

            std::int64_t central_R = 0;
            std::string scenario_error;
            const auto override_it =
                cfg.central_overrides.find({scenario.name, scenario_case.name});
            try {
                if (override_it != cfg.central_overrides.end())
                    central_R = override_it->second;
                else if (scenario.manual_override)
                    throw ConfigError("scenario '" + scenario.name +
                                      "' needs a manual central reorder point for case '" +
                                      scenario_case.name + "'");
                else
                    central_R = central_reorder_point(net, central, scenario.prescribed_fill);
            } catch (const std::exception& e) {
                scenario_error = e.what();
            }

            for (WaitMethod method : cfg.methods) {
                if (!scenario_error.empty()) {
                    results.cells.push_back(
                        make_failed(scenario.name, scenario_case, method, scenario_error));
                    continue;
                }
                try {
                    NetworkConfig run_net = net;
                    run_net.central.reorder_point = central_R;

                    const CalibrationResult cal =
                        local_reorder_points(run_net, central_R, wait_inputs, method);
                    for (std::size_t i = 0; i < run_net.locals.size(); ++i)
                        run_net.locals[i].reorder_point = cal.locals[i].reorder_point;

                    const ExperimentOutcome sim =
                        run_experiment(run_net, compound_sources(run_net), cfg.sim);

                    CaseResult cell;
                    cell.scenario = scenario.name;
                    cell.case_name = scenario_case.name;
                    cell.method = method;
                    cell.accuracy_noop = scenario_case.accuracy_noop();
                    cell.central_R = central_R;
                    cell.central_sim_fill = sim.mean.central.order_fill_rate;
                    cell.central_analytic_fill = central_fill_rate(central, central_R);
                    cell.locals.reserve(run_net.locals.size());
                    for (std::size_t i = 0; i < run_net.locals.size(); ++i) {
                        const auto& w = run_net.locals[i];
                        const auto& est = cal.wait.for_warehouse(w.id);
                        CaseResult::LocalRow row;
                        row.id = w.id;
                        row.reorder_point = w.reorder_point;
                        row.fill_target = w.fill_target;
                        row.analytic_fill = cal.locals[i].achieved_fill;
                        row.sim_fill = sim.mean.locals[i].order_fill_rate;
                        row.computed_wait_mean = est.moments.mean;
                        row.computed_wait_sd = est.moments.sd();
                        row.sim_wait_mean = sim.mean.locals[i].wait.mean;
                        row.sim_wait_sd = sim.mean.locals[i].wait.sd;
                        row.negative_variance = est.flags.negative_variance_clamped;
                        row.fallback = est.flags.fallback_fired;
                        row.gamma_fallback = est.flags.gamma_fallback;
                        row.q_over_mu = w.demand.mean > 0.0
                                            ? static_cast<double>(w.order_quantity) /
                                                  w.demand.mean
                                            : 0.0;
                        cell.locals.push_back(std::move(row));
                    }
                    results.cells.push_back(std::move(cell));
                } catch (const std::exception& e) {
                    results.cells.push_back(
                        make_failed(scenario.name, scenario_case, method, e.what()));
                }
                if (cfg.verbose) {
                    const auto& last = results.cells.back();
                    std::fprintf(stderr, "[experiment] %s/%s/%s %s\n", last.scenario.c_str(),
                                 last.case_name.c_str(), to_string(last.method),
                                 last.failed ? last.error.c_str() : "ok");
                }
            }
        }
    }
    return results;
}

// ---------------------------------------------------------------------------
// Historical-trace mode
// ---------------------------------------------------------------------------

namespace {

// Per-day demand moments from trace days [0, upto).
MomentPair trace_moments(const std::vector<std::vector<std::int64_t>>& trace, int upto) {
    const int n = std::min<int>(upto, static_cast<int>(trace.size()));
    if (n < 1)
        throw ConfigError("trace_moments: empty window");
    double sum = 0.0, sum_sq = 0.0;
    for (int d = 0; d < n; ++d) {
        double day_total = 0.0;
        for (std::int64_t qty : trace[static_cast<std::size_t>(d)])
            day_total += static_cast<double>(qty);
        sum += day_total;
        sum_sq += day_total * day_total;
    }
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)) : 0.0;
    return {mean, var};
}

} // namespace

HistoricalResult run_historical(const NetworkConfig& net,
                                const std::vector<std::vector<std::vector<std::int64_t>>>& traces,
                                const HistoricalConfig& cfg) {
    net.validate();
    cfg.sim.check();
    if (traces.size() != net.locals.size())
        throw ConfigError("run_historical: one trace per local warehouse");
    for (const auto& t : traces)
        if (t.size() < static_cast<std::size_t>(cfg.sim.horizon))
            throw TraceExhausted("run_historical: trace shorter than the horizon");

    HistoricalResult out;
    std::vector<int> recalc_days{0};
    if (cfg.recalibrate_every > 0)
        for (int d = cfg.recalibrate_every; d < cfg.sim.horizon; d += cfg.recalibrate_every)
            recalc_days.push_back(d);

    for (int day : recalc_days) {
        NetworkConfig snapshot = net;
        for (std::size_t i = 0; i < snapshot.locals.size(); ++i) {
            // Day 0 sees no history yet; use the full trace as the forecast.
            const int window = day == 0 ? static_cast<int>(traces[i].size()) : day;
            snapshot.locals[i].demand = trace_moments(traces[i], window);
        }
        snapshot.central_R_override = cfg.central_R_override;
        const CalibrationResult cal = calibrate(snapshot, cfg.central_target, cfg.method);
        PolicySchedule::Update update;
        update.day = day;
        update.central_R = cal.central_R;
        update.local_R = cal.local_reorder_vector();
        out.schedule.updates.push_back(std::move(update));
        out.calibrations.push_back(cal);
    }

    NetworkConfig run_net = net;
    run_net.central.reorder_point = out.schedule.updates.front().central_R;
    for (std::size_t i = 0; i < run_net.locals.size(); ++i)
        run_net.locals[i].reorder_point = out.schedule.updates.front().local_R[i];

    std::vector<DemandSource> sources;
    sources.reserve(traces.size());
    for (const auto& t : traces)
        sources.push_back(DemandSource::historical(t));

    out.outcome = run_experiment(run_net, sources, cfg.sim, out.schedule);
    return out;
}

} // namespace echelon
