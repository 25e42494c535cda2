#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echelon/network.hpp"
#include "echelon/network_model.hpp"
#include "echelon/wait_time.hpp"

namespace echelon {

/// Output of the reorder-point pipeline: the central reorder point from the
/// prescribed central fill rate, then per-warehouse reorder points from the
/// chosen wait-time estimate and the local fill targets. Deterministic.
struct CalibrationResult {
    std::int64_t central_R = 0;
    WaitTimeEstimate wait;

    struct Local {
        std::string id;
        std::int64_t reorder_point = 0;
        double achieved_fill = 0.0; // analytic fill rate at the chosen R
        LtdFamily ltd_family = LtdFamily::Gamma;
        MomentPair ltd_moments;
        double ltd_truncation = 0.0; // support truncation point, for audit
    };
    std::vector<Local> locals;

    /// Reorder points in network order (central excluded).
    std::vector<std::int64_t> local_reorder_vector() const;
};

/// Analytic central order fill rate at a central reorder point given in
/// units (evaluated in subbatch units internally).
double central_fill_rate(const CentralModel& model, std::int64_t central_R);

/// Minimal central reorder point (a subbatch multiple, returned in units)
/// whose analytic fill rate reaches `target`. Binary search over a bracket
/// grown geometrically from [-Q0, E[D] + 10 sd]; TargetUnreachable when the
/// bracket cap is exceeded.
std::int64_t central_reorder_point(const NetworkConfig& net, double target);
std::int64_t central_reorder_point(const NetworkConfig& net, const CentralModel& model,
                                   double target);

/// Local reorder points for a fixed central reorder point and wait-time
/// method. The same R0 serves every method by construction, so results
/// across methods are directly comparable.
CalibrationResult local_reorder_points(const NetworkConfig& net, std::int64_t central_R,
                                       WaitMethod method);
CalibrationResult local_reorder_points(const NetworkConfig& net, std::int64_t central_R,
                                       const CentralWaitInputs& inputs, WaitMethod method);

/// Local reorder points for an explicit wait estimate (e.g. a forced zero
/// wait in single-echelon checks).
CalibrationResult local_reorder_points_for_wait(const NetworkConfig& net,
                                                std::int64_t central_R,
                                                const WaitTimeEstimate& wait);

/// Full pipeline: central reorder point from the prescribed central fill
/// rate (or the manual override when the network carries one), then local
/// reorder points per method.
CalibrationResult calibrate(const NetworkConfig& net, double central_target, WaitMethod method);

} // namespace echelon
