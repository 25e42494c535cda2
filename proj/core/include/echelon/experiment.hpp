#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "echelon/metrics.hpp"
#include "echelon/planning.hpp"
#include "echelon/scenario_grid.hpp"
#include "echelon/simulator.hpp"

namespace echelon {

struct ExperimentConfig {
    SimConfig sim;
    std::vector<CentralScenario> scenarios = default_central_scenarios();
    std::vector<WaitMethod> methods = {WaitMethod::AXS, WaitMethod::KKSL, WaitMethod::BF,
                                       WaitMethod::NB};
    /// Manual central reorder points keyed by (scenario, case); required for
    /// scenarios with manual_override set, optional elsewhere.
    std::map<std::pair<std::string, std::string>, std::int64_t> central_overrides;
    std::size_t quad_nodes = 256;
    bool verbose = false;
};

/// One (scenario, case, method) cell of the experiment. Failures are
/// isolated: a failed cell carries its error text and the run continues.
struct CaseResult {
    std::string scenario;
    std::string case_name;
    WaitMethod method = WaitMethod::AXS;
    bool failed = false;
    std::string error;
    bool accuracy_noop = false;

    std::int64_t central_R = 0;
    double central_sim_fill = 0.0;
    double central_analytic_fill = 0.0;

    struct LocalRow {
        std::string id;
        std::int64_t reorder_point = 0;
        double fill_target = 0.0;
        double analytic_fill = 0.0;
        double sim_fill = 0.0;
        double computed_wait_mean = 0.0;
        double computed_wait_sd = 0.0;
        double sim_wait_mean = 0.0;
        double sim_wait_sd = 0.0;
        bool negative_variance = false;
        bool fallback = false;
        bool gamma_fallback = false;
        double q_over_mu = 0.0;
    };
    std::vector<LocalRow> locals;
};

struct ExperimentResults {
    std::vector<CaseResult> cells;

    std::vector<WaitObservation> observations() const;
    bool any_failed() const;
};

/// Calibrate, simulate and collect results for every scenario x case x
/// method. Per-cell failures are logged into the result; everything else
/// keeps running.
ExperimentResults run_paper_experiment(const std::vector<ScenarioCase>& grid,
                                       const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Historical-trace mode
// ---------------------------------------------------------------------------

struct HistoricalConfig {
    SimConfig sim;
    WaitMethod method = WaitMethod::KKSL;
    double central_target = 0.9;
    int recalibrate_every = 90; // days; 0 disables recalibration
    std::optional<std::int64_t> central_R_override;
};

struct HistoricalResult {
    ExperimentOutcome outcome;
    PolicySchedule schedule;
    std::vector<CalibrationResult> calibrations; // one per recalibration day
};

/// Replays a historical demand trace through the same calibrate-then-
/// simulate pipeline, recomputing reorder points every recalibrate_every
/// days from the demand moments observed so far (the initial calibration
/// uses the whole trace as its forecast).
HistoricalResult run_historical(const NetworkConfig& net,
                                const std::vector<std::vector<std::vector<std::int64_t>>>& traces,
                                const HistoricalConfig& cfg);

} // namespace echelon
