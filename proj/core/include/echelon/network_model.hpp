#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "echelon/distributions.hpp"
#include "echelon/moments.hpp"
#include "echelon/network.hpp"

namespace echelon {

// ---------------------------------------------------------------------------
// Lead-time-demand distribution selection
// ---------------------------------------------------------------------------

enum class LtdFamily { NegativeBinomial, Gamma };

/// Lead-time demand wrapped with the family tag the selection rule picked.
/// When the gamma branch fired, cdf values are read directly at the integer
/// cut points (no continuity correction).
struct LtdDistribution {
    LtdFamily family = LtdFamily::Gamma;
    MomentPair moments;
    DiscretePtr discrete;     // set for NegativeBinomial
    ContinuousPtr continuous; // set for Gamma

    double cdf(double x) const;
    double partial_expectation(double z) const;
    /// Truncation point: the 1 - 1e-12 quantile, recorded for audit.
    double support_upper() const;
};

/// Negative binomial when variance > mean (strict), gamma otherwise.
LtdDistribution select_ltd_distribution(const MomentPair& m);

// ---------------------------------------------------------------------------
// Local-warehouse quantities
// ---------------------------------------------------------------------------

/// mean = mu E[L_eff], variance = sigma^2 E[L_eff] + mu^2 Var[L_eff].
MomentPair lead_time_demand_local(const WarehouseParams& w, const EffectiveLeadTime& eff);

/// Pmf over a contiguous integer range [offset, offset + mass.size() - 1].
struct IntegerPmf {
    std::int64_t offset = 0;
    std::vector<double> mass;

    double pmf(std::int64_t j) const {
        const std::int64_t i = j - offset;
        if (i < 0 || i >= static_cast<std::int64_t>(mass.size()))
            return 0.0;
        return mass[static_cast<std::size_t>(i)];
    }
    std::int64_t upper() const { return offset + static_cast<std::int64_t>(mass.size()) - 1; }
    double total() const;
};

/// Inventory-level distribution Pr(I = j) = (1/Q) sum_{l=R+1}^{R+Q} Pr(D = l-j),
/// support bounded above by R+Q. R may be negative.
IntegerPmf inventory_level_pmf(std::int64_t reorder_point, std::int64_t order_quantity,
                               const LtdDistribution& ltd);

/// Order fill rate: fraction of orders fulfilled completely from stock on
/// hand. `order_size` is the distribution of a single incoming order
/// (customer order sizes at a local warehouse, replenishment order sizes in
/// subbatch units at the central warehouse).
double order_fill_rate(std::int64_t reorder_point, std::int64_t order_quantity,
                       const LtdDistribution& ltd, const DiscreteDistribution& order_size);

// ---------------------------------------------------------------------------
// Central-warehouse quantities
// ---------------------------------------------------------------------------

/// Distribution s^ord(k) of the number of orders a local warehouse places
/// during the central lead time; index k = 0, 1, .... Computed by
/// Gauss-Legendre quadrature over the lead-time quantile grid; entries are
/// produced until the cumulative probability exceeds 1 - 1e-9.
std::vector<double> central_order_count_dist(const WarehouseParams& local,
                                             const ContinuousDistribution& central_lead,
                                             std::size_t quad_nodes = 256);

/// Central lead-time-demand moments in subbatch units:
///   mean = sum_i mu_i E[L] / q
///   variance = sum_i sum_k ((mu_i E[L] - k Q_i)/q)^2 s_i^ord(k)
MomentPair central_ltd_moments(const NetworkConfig& net,
                               const std::vector<std::vector<double>>& per_local_order_counts,
                               double lead_mean);

/// Incoming order sizes at the central warehouse in subbatch units:
/// size Q_i/q with weight proportional to the order frequency mu_i/Q_i.
DiscretePtr central_order_size_pmf(const NetworkConfig& net);

/// Everything the central fill-rate calculation needs, in subbatch units.
struct CentralModel {
    std::int64_t q = 1;
    std::int64_t central_Q_q = 1; // Q_0 in subbatch units
    MomentPair ltd_moments;       // in subbatch units
    LtdDistribution ltd;
    DiscretePtr order_size;
    std::vector<std::vector<double>> order_counts; // per local s^ord
};

/// Build the central model for an arbitrary central-lead distribution (the
/// base lead time or one of the residual-lifetime horizons).
CentralModel build_central_model(const NetworkConfig& net,
                                 const ContinuousDistribution& central_lead,
                                 std::size_t quad_nodes = 256);

/// Central model under the configured gamma lead time.
CentralModel build_central_model(const NetworkConfig& net, std::size_t quad_nodes = 256);

/// Lead-time distribution object for a moment pair: gamma when variance > 0,
/// degenerate otherwise.
ContinuousPtr make_lead_distribution(const MomentPair& lead);

} // namespace echelon
