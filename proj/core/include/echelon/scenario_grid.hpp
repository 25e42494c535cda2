#pragma once

#include <optional>
#include <string>
#include <vector>

#include "echelon/network.hpp"

namespace echelon {

enum class VariationType { Multiplicative, Absolute, NetworkSize };

/// One varied parameter value; exactly one parameter is varied per test
/// case, all others stay at their base values.
struct Variation {
    std::string parameter; // mu | sigma2 | Q_local | Q_central | fill_target |
                           // lead_central | price_central | network_size
    VariationType type = VariationType::Multiplicative;
    double value = 1.0;
};

/// A declarative row of the variation table.
struct VariationRow {
    std::string parameter;
    VariationType type = VariationType::Multiplicative;
    std::vector<double> values;
};

/// One test case: the base network with a single variation applied (or the
/// base itself).
struct ScenarioCase {
    std::string name;
    std::optional<Variation> variation;
    NetworkConfig net;

    /// Price variations never enter a wait-time or fill-rate formula; such
    /// cases are kept in the grid but marked so reports can call them out.
    bool accuracy_noop() const {
        return variation && variation->parameter == "price_central";
    }
};

/// The eight-local sample network with a 500-unit central order quantity.
NetworkConfig default_base_network();

/// Default variation rows: demand mean and variance multipliers, local and
/// central order-quantity multipliers, absolute fill targets, central
/// lead-time multipliers, central price multipliers and the homogeneous
/// network sizes. Together with the base case the grid has 40 entries.
std::vector<VariationRow> default_variation_rows();

/// Base case first, then one case per variation value, in row order.
/// Regeneration is deterministic and order-stable.
std::vector<ScenarioCase> generate_grid(const NetworkConfig& base,
                                        const std::vector<VariationRow>& rows);

std::vector<ScenarioCase> generate_grid(const NetworkConfig& base);

/// A central-stock scenario: a prescribed central fill rate, or (for the
/// "high" scenario) manually supplied reorder-point overrides.
struct CentralScenario {
    std::string name;
    double prescribed_fill = 0.0;
    bool manual_override = false; // reorder points come from overrides, not the target
};

/// low (20%), medium_low (40%), medium_high (95%) and high (override).
std::vector<CentralScenario> default_central_scenarios();

/// Relative deviation of one value from the mean of all values.
double heterogeneity(const std::vector<double>& values, std::size_t index);

} // namespace echelon
