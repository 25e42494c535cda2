#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "echelon/simulator.hpp"
#include "echelon/wait_time.hpp"

namespace echelon {

/// One (test case, warehouse) comparison of a computed wait-time estimate
/// against the simulated value.
struct WaitObservation {
    std::string scenario;
    std::string case_name;
    std::string warehouse;
    WaitMethod method = WaitMethod::AXS;
    double computed_mean = 0.0;
    double computed_sd = 0.0;
    double simulated_mean = 0.0;
    double simulated_sd = 0.0;

    double error_mean() const { return computed_mean - simulated_mean; }
    double error_sd() const { return computed_sd - simulated_sd; }
};

/// Signed and absolute errors averaged over a test set, for the mean and
/// the standard deviation of the wait time.
struct ErrorStats {
    double error_mean = 0.0;
    double abs_error_mean = 0.0;
    double error_sd = 0.0;
    double abs_error_sd = 0.0;
    std::int64_t count = 0;
};

ErrorStats error_metrics(const std::vector<WaitObservation>& observations);

/// Pair one method's estimates with simulated per-warehouse wait values.
/// Throws KeyMismatch when the warehouse sets differ.
std::vector<WaitObservation> pair_observations(
    const std::string& scenario, const std::string& case_name, const WaitTimeEstimate& computed,
    const std::vector<std::pair<std::string, WaitStats>>& simulated);

/// Fractions of test cases where a method ranks first, second-or-better or
/// last by absolute error. "combined" requires the rank on both the mean
/// and the standard deviation. Ties break in method declaration order
/// (axs, kksl, bf, nb).
struct RankingFractions {
    double best = 0.0;
    double second_or_better = 0.0;
    double worst = 0.0;
};

struct RankingReport {
    std::array<RankingFractions, 4> mean_rank;     // indexed by WaitMethod
    std::array<RankingFractions, 4> sd_rank;
    std::array<RankingFractions, 4> combined_rank;
    std::int64_t cases = 0;
    bool empty_group = false; // flagged, not fatal
};

/// observations must contain, for every (scenario, case, warehouse) key, one
/// entry per compared method.
RankingReport ranking_report(const std::vector<WaitObservation>& observations,
                             const std::vector<WaitMethod>& methods);

/// Ranking over the subset of observations matching a grouping predicate.
RankingReport ranking_report(const std::vector<WaitObservation>& observations,
                             const std::vector<WaitMethod>& methods,
                             const std::function<bool(const WaitObservation&)>& group);

} // namespace echelon
