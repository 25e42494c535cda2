#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "echelon/experiment.hpp"
#include "echelon/network.hpp"
#include "echelon/scenario_grid.hpp"

namespace echelon {

/// Network + optional variation table parsed from the key-value config
/// format (one [central] block, one [warehouse] block per local, optional
/// [variations] block).
struct ScenarioFile {
    NetworkConfig net;
    std::vector<VariationRow> variations; // empty: use the built-in defaults
    bool has_variations = false;
};

ScenarioFile read_scenario_file(std::istream& in);
ScenarioFile read_scenario_file_path(const std::string& path);
void write_scenario_file(std::ostream& out, const NetworkConfig& net);

/// Demand trace CSV: header `day,warehouse_id,quantity`, day 0-based, rows
/// in intra-day arrival order. Returns one per-day event list per local
/// warehouse (network order); `days` is max day + 1.
struct DemandTrace {
    std::vector<std::vector<std::vector<std::int64_t>>> per_local;
    int days = 0;
};

DemandTrace read_demand_trace(std::istream& in, const NetworkConfig& net);
DemandTrace read_demand_trace_path(const std::string& path, const NetworkConfig& net);

/// Long-format results CSV with fixed header
/// `scenario,case,method,warehouse,metric,value`; doubles round-trip
/// losslessly.
struct ResultRow {
    std::string scenario;
    std::string case_name;
    std::string method;
    std::string warehouse;
    std::string metric;
    double value = 0.0;
};

std::vector<ResultRow> result_rows(const ExperimentResults& results);
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Rebuild wait observations from result rows (for the report subcommand).
std::vector<WaitObservation> observations_from_rows(const std::vector<ResultRow>& rows);

} // namespace echelon
