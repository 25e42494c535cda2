#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echelon/moments.hpp"
#include "echelon/network.hpp"
#include "echelon/network_model.hpp"

namespace echelon {

enum class WaitMethod { AXS, KKSL, BF, NB };

const char* to_string(WaitMethod m);
/// Parses "axs", "kksl", "bf", "nb" (case-insensitive); throws UnknownMethod.
WaitMethod wait_method_from_string(const std::string& s);

inline constexpr WaitMethod kAllMethods[] = {WaitMethod::AXS, WaitMethod::KKSL,
                                             WaitMethod::BF, WaitMethod::NB};

/// Pathologies are recorded here before any clamping, so experiments can
/// count them.
struct WaitDiagnostics {
    bool negative_variance_clamped = false;
    bool fallback_fired = false; // BF lead-time substitution
    bool gamma_fallback = false; // NB: negbin undefined, gamma used instead
    bool instability = false;    // a two-moment fit degraded but was usable
};

struct WaitTimeEstimate {
    struct PerWarehouse {
        std::string id;
        MomentPair moments; // days
        WaitDiagnostics flags;
    };

    WaitMethod method = WaitMethod::AXS;
    std::vector<PerWarehouse> per_warehouse; // in network order

    const PerWarehouse& for_warehouse(const std::string& id) const;
    bool any_flag_negative_variance() const;
    bool any_flag_fallback() const;
};

/// Order-size model O_i for the KKSL estimator. The default, a point mass
/// at Q_i, fits networks where order quantities are large relative to lead
/// time demand; the geometric-multiple variant is for sensitivity runs.
struct KkslOrderSizeModel {
    enum class Kind { PointMassAtQ, GeometricMultiple };
    Kind kind = Kind::PointMassAtQ;
    double mean_multiple = 1.0; // E[M] for O = Q*M, M geometric on {1,2,...}

    MomentPair moments(std::int64_t order_quantity) const;
};

/// Which family KKSL fits to the shifted central demand. Mixed Erlang is
/// the method's own choice; the negative-binomial option exists for
/// cross-method consistency checks.
enum class KkslFit { MixedErlang, NegBin };

/// Residual-horizon demand moments shared by the KKSL and NB estimators,
/// in subbatch units; independent of the central reorder point, so compute
/// once per network and reuse across R0 scans.
struct CentralWaitInputs {
    std::int64_t q = 1;
    MomentPair demand_hat;   // D_0 over the residual horizon
    MomentPair demand_tilde; // D_0 over the second-order horizon
    double lead_mean = 0.0;  // E[L_0]
    double lead_raw2 = 0.0;  // E[L_0^2]
};

CentralWaitInputs central_wait_inputs(const NetworkConfig& net, std::size_t quad_nodes = 256);

// ---------------------------------------------------------------------------
// The four estimators
// ---------------------------------------------------------------------------

/// METRIC-type estimate: one MomentPair shared by every local warehouse,
/// from the normal loss function of the central overshoot.
WaitTimeEstimate axs_wait(const NetworkConfig& net, std::int64_t central_R);

/// Residual-horizon estimate with mixed-Erlang fits of D_0 + O_i. Requires
/// central_R >= 0; negative variances are flagged and clamped to zero.
WaitTimeEstimate kksl_wait(const NetworkConfig& net, std::int64_t central_R,
                           const KkslOrderSizeModel& osm = {},
                           KkslFit fit = KkslFit::MixedErlang);
WaitTimeEstimate kksl_wait(const NetworkConfig& net, std::int64_t central_R,
                           const CentralWaitInputs& inputs,
                           const KkslOrderSizeModel& osm = {},
                           KkslFit fit = KkslFit::MixedErlang);

/// Lognormal demand-rate estimate with a constant central lead time. When
/// Q_i > Q_0 + central_R the method breaks down and the estimate falls back
/// to the central lead-time moments, with the fallback flag set.
WaitTimeEstimate bf_wait(const NetworkConfig& net, std::int64_t central_R);

/// Negative-binomial variant of the residual-horizon estimate with the
/// order size pinned at Q_i. Gamma is substituted where the negative
/// binomial is undefined; pathologies are flagged, never thrown.
WaitTimeEstimate nb_wait(const NetworkConfig& net, std::int64_t central_R);
WaitTimeEstimate nb_wait(const NetworkConfig& net, std::int64_t central_R,
                         const CentralWaitInputs& inputs);

/// Uniform dispatch over the four estimators.
WaitTimeEstimate estimate(WaitMethod method, const NetworkConfig& net, std::int64_t central_R);
WaitTimeEstimate estimate(WaitMethod method, const NetworkConfig& net, std::int64_t central_R,
                          const CentralWaitInputs& inputs);

} // namespace echelon
