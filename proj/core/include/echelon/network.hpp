#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/moments.hpp"

namespace echelon {

/// One warehouse of the two-level network. `demand` is per day and unused
/// for the central warehouse; `lead` is the transport lead time from the
/// predecessor (the external supplier for the central warehouse).
struct WarehouseParams {
    std::string id;
    std::int64_t reorder_point = 0;  // R, may be negative
    std::int64_t order_quantity = 1; // Q >= 1
    MomentPair demand;               // units per day
    double fill_target = 0.0;        // in [0,1]
    MomentPair lead;                 // days
    double price = 0.0;              // currency per unit, reporting only
};

/// Central warehouse plus local warehouses. `subbatch` is the common
/// subbatch size q = gcd of all order quantities; central-echelon
/// calculations run in units of q.
struct NetworkConfig {
    WarehouseParams central;
    std::vector<WarehouseParams> locals;
    std::int64_t subbatch = 1;
    std::optional<std::int64_t> central_R_override;

    std::int64_t compute_subbatch() const {
        std::int64_t g = central.order_quantity;
        for (const auto& w : locals)
            g = std::gcd(g, w.order_quantity);
        return g;
    }

    void refresh_subbatch() { subbatch = compute_subbatch(); }

    void validate() const {
        if (locals.empty())
            throw ConfigError("network: needs at least one local warehouse");
        if (central.order_quantity < 1)
            throw ConfigError("network: central order quantity must be >= 1");
        if (!(central.lead.mean > 0.0) || central.lead.variance < 0.0)
            throw ConfigError("network: central lead time moments invalid");
        if (subbatch != compute_subbatch())
            throw ConfigError("network: subbatch must equal gcd of all order quantities");
        for (const auto& w : locals) {
            if (w.order_quantity < 1)
                throw ConfigError("warehouse " + w.id + ": order quantity must be >= 1");
            if (w.order_quantity % subbatch != 0)
                throw ConfigError("warehouse " + w.id + ": order quantity not a subbatch multiple");
            if (!(w.lead.mean > 0.0) || w.lead.variance < 0.0)
                throw ConfigError("warehouse " + w.id + ": lead time moments invalid");
            if (w.fill_target < 0.0 || w.fill_target > 1.0)
                throw ConfigError("warehouse " + w.id + ": fill target outside [0,1]");
            if (!w.demand.valid() || w.demand.mean < 0.0)
                throw ConfigError("warehouse " + w.id + ": demand moments invalid");
        }
    }
};

/// Transport lead time plus wait time; the two are treated as independent,
/// so moments add.
struct EffectiveLeadTime {
    MomentPair base;
    MomentPair wait;
    MomentPair effective;

    static EffectiveLeadTime make(const MomentPair& base, const MomentPair& wait) {
        return {base, wait, base + wait};
    }
};

} // namespace echelon
