#include "echelon/scenario_grid.hpp"

#include <cmath>
#include <sstream>

#include "echelon/errors.hpp"

namespace echelon {

NetworkConfig default_base_network() {
    NetworkConfig net;
    net.central = {"0", 0, 500, {0.0, 0.0}, 0.0, {60.0, 900.0}, 0.5};
    const double mus[] = {2, 3, 4, 5, 6, 7, 8, 9};
    const std::int64_t qs[] = {50, 50, 100, 100, 150, 150, 200, 200};
    for (int i = 0; i < 8; ++i) {
        WarehouseParams w;
        w.id = std::to_string(i + 1);
        w.demand = {mus[i], 2.0 * mus[i]};
        w.order_quantity = qs[i];
        w.fill_target = 0.9;
        w.lead = {5.0, 9.0};
        w.price = 1.0;
        net.locals.push_back(w);
    }
    net.refresh_subbatch();
    return net;
}

std::vector<VariationRow> default_variation_rows() {
    using VT = VariationType;
    return {
        {"mu", VT::Multiplicative, {0.25, 0.5}},
        {"sigma2", VT::Multiplicative, {2, 4, 8, 16}},
        {"Q_local", VT::Multiplicative, {0.25, 0.5, 2, 4, 8}},
        {"Q_central", VT::Multiplicative, {0.25, 0.5, 2, 4, 8}},
        {"fill_target", VT::Absolute, {0.25, 0.5, 0.8, 0.95}},
        {"lead_central", VT::Multiplicative, {0.0625, 0.125, 0.25, 0.5, 2}},
        {"price_central", VT::Multiplicative, {2, 4, 8}},
        {"network_size", VT::NetworkSize, {1, 2, 3, 4, 5, 6, 7, 8, 10, 15, 20}},
    };
}

namespace {

std::string case_name(const Variation& v) {
    std::ostringstream os;
    os << v.parameter;
    if (v.type == VariationType::NetworkSize)
        os << "_" << static_cast<int>(v.value);
    else if (v.type == VariationType::Absolute)
        os << "_" << v.value;
    else
        os << "_x" << v.value;
    return os.str();
}

std::int64_t scaled_quantity(std::int64_t q, double factor) {
    return std::max<std::int64_t>(1, std::llround(static_cast<double>(q) * factor));
}

NetworkConfig apply_variation(const NetworkConfig& base, const Variation& v) {
    NetworkConfig net = base;
    if (v.parameter == "mu") {
        for (auto& w : net.locals)
            w.demand.mean *= v.value;
    } else if (v.parameter == "sigma2") {
        for (auto& w : net.locals)
            w.demand.variance *= v.value;
    } else if (v.parameter == "Q_local") {
        for (auto& w : net.locals)
            w.order_quantity = scaled_quantity(w.order_quantity, v.value);
    } else if (v.parameter == "Q_central") {
        net.central.order_quantity = scaled_quantity(net.central.order_quantity, v.value);
    } else if (v.parameter == "fill_target") {
        for (auto& w : net.locals)
            w.fill_target = v.value;
    } else if (v.parameter == "lead_central") {
        // Scales the lead-time random variable: mean by m, variance by m^2.
        net.central.lead = net.central.lead.scaled(v.value);
    } else if (v.parameter == "price_central") {
        net.central.price *= v.value;
    } else if (v.parameter == "network_size") {
        const int n = static_cast<int>(v.value);
        if (n < 1 || base.locals.empty())
            throw SchemaError("network_size variation needs n >= 1 and a template warehouse");
        net.locals.clear();
        for (int i = 0; i < n; ++i) {
            WarehouseParams w = base.locals.front();
            w.id = std::to_string(i + 1);
            net.locals.push_back(w);
        }
    } else {
        throw SchemaError("unknown variation parameter '" + v.parameter + "'");
    }
    net.refresh_subbatch();
    net.validate();
    return net;
}

} // namespace

std::vector<ScenarioCase> generate_grid(const NetworkConfig& base,
                                        const std::vector<VariationRow>& rows) {
    base.validate();
    std::vector<ScenarioCase> grid;
    grid.push_back({"base", std::nullopt, base});
    for (const auto& row : rows) {
        if (row.values.empty())
            throw SchemaError("variation row '" + row.parameter + "' has no values");
        for (double value : row.values) {
            Variation v{row.parameter, row.type, value};
            grid.push_back({case_name(v), v, apply_variation(base, v)});
        }
    }
    return grid;
}

std::vector<ScenarioCase> generate_grid(const NetworkConfig& base) {
    return generate_grid(base, default_variation_rows());
}

std::vector<CentralScenario> default_central_scenarios() {
    return {
        {"low", 0.20, false},
        {"medium_low", 0.40, false},
        {"medium_high", 0.95, false},
        {"high", 0.95, true},
    };
}

double heterogeneity(const std::vector<double>& values, std::size_t index) {
    if (values.empty() || index >= values.size())
        throw DomainError("heterogeneity: index out of range");
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0)
        throw DomainError("heterogeneity: zero mean");
    return std::abs(values[index] - mean) / mean;
}

} // namespace echelon
