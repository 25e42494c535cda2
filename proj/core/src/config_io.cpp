#include "echelon/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "echelon/errors.hpp"

namespace echelon {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("could not parse number '" + s + "' for " + what);
    }
}

struct Block {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

std::vector<Block> parse_blocks(std::istream& in) {
    std::vector<Block> blocks;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(strip_comment(line));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw SchemaError("malformed section header: " + line);
            blocks.push_back({trim(line.substr(1, line.size() - 2)), {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemaError("expected key = value, got: " + line);
        if (blocks.empty())
            throw SchemaError("key outside any section: " + line);
        blocks.back().entries.emplace_back(trim(line.substr(0, eq)),
                                           trim(line.substr(eq + 1)));
    }
    return blocks;
}

WarehouseParams parse_warehouse(const Block& block, bool central) {
    WarehouseParams w;
    double lead_sd = -1.0;
    bool lead_var_set = false;
    for (const auto& [key, value] : block.entries) {
        if (key == "id")
            w.id = value;
        else if (key == "Q")
            w.order_quantity = static_cast<std::int64_t>(parse_number(value, key));
        else if (key == "R")
            w.reorder_point = static_cast<std::int64_t>(parse_number(value, key));
        else if (key == "mu")
            w.demand.mean = parse_number(value, key);
        else if (key == "sigma2")
            w.demand.variance = parse_number(value, key);
        else if (key == "fill_target")
            w.fill_target = parse_number(value, key);
        else if (key == "lead_mean")
            w.lead.mean = parse_number(value, key);
        else if (key == "lead_sd")
            lead_sd = parse_number(value, key);
        else if (key == "lead_var") {
            w.lead.variance = parse_number(value, key);
            lead_var_set = true;
        } else if (key == "price")
            w.price = parse_number(value, key);
        else if (central && key == "R_override")
            ; // handled by the caller
        else
            throw SchemaError("unknown key '" + key + "' in [" + block.name + "]");
    }
    if (lead_sd >= 0.0 && lead_var_set)
        throw SchemaError("give lead_sd or lead_var, not both, for warehouse " + w.id);
    if (lead_sd >= 0.0)
        w.lead.variance = lead_sd * lead_sd;
    return w;
}

VariationType parse_variation_type(const std::string& tag, const std::string& param) {
    if (tag == "m")
        return VariationType::Multiplicative;
    if (tag == "a")
        return VariationType::Absolute;
    if (tag == "n")
        return VariationType::NetworkSize;
    throw SchemaError("variation row '" + param + "': type must be m, a or n, got '" + tag +
                      "'");
}

} // namespace

ScenarioFile read_scenario_file(std::istream& in) {
    ScenarioFile file;
    bool central_seen = false;
    for (const Block& block : parse_blocks(in)) {
        if (block.name == "central") {
            if (central_seen)
                throw SchemaError("more than one [central] block");
            central_seen = true;
            file.net.central = parse_warehouse(block, true);
            for (const auto& [key, value] : block.entries)
                if (key == "R_override")
                    file.net.central_R_override =
                        static_cast<std::int64_t>(parse_number(value, key));
        } else if (block.name == "warehouse") {
            file.net.locals.push_back(parse_warehouse(block, false));
        } else if (block.name == "variations") {
            file.has_variations = true;
            for (const auto& [key, value] : block.entries) {
                const auto colon = value.find(':');
                if (colon == std::string::npos)
                    throw SchemaError("variation row '" + key +
                                      "': expected '<m|a|n>: v1 v2 ...'");
                VariationRow row;
                row.parameter = key;
                row.type = parse_variation_type(trim(value.substr(0, colon)), key);
                std::istringstream vs(value.substr(colon + 1));
                std::string tok;
                while (vs >> tok)
                    row.values.push_back(parse_number(tok, key));
                if (row.values.empty())
                    throw SchemaError("variation row '" + key + "' has no values");
                file.variations.push_back(std::move(row));
            }
        } else {
            throw SchemaError("unknown section [" + block.name + "]");
        }
    }
    if (!central_seen)
        throw SchemaError("scenario file needs a [central] block");
    if (file.net.locals.empty())
        throw SchemaError("scenario file needs at least one [warehouse] block");
    file.net.refresh_subbatch();
    file.net.validate();
    return file;
}

ScenarioFile read_scenario_file_path(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file: " + path);
    return read_scenario_file(in);
}

void write_scenario_file(std::ostream& out, const NetworkConfig& net) {
    const auto emit = [&out](const WarehouseParams& w, bool central) {
        out << (central ? "[central]\n" : "[warehouse]\n");
        out << "id = " << w.id << "\n";
        if (!central) {
            out << "mu = " << w.demand.mean << "\n";
            out << "sigma2 = " << w.demand.variance << "\n";
        }
        out << "Q = " << w.order_quantity << "\n";
        if (!central)
            out << "fill_target = " << w.fill_target << "\n";
        out << "lead_mean = " << w.lead.mean << "\n";
        out << "lead_var = " << w.lead.variance << "\n";
        out << "price = " << w.price << "\n";
        if (w.reorder_point != 0)
            out << "R = " << w.reorder_point << "\n";
        out << "\n";
    };
    emit(net.central, true);
    if (net.central_R_override)
        out << "# central override applied: R_override = " << *net.central_R_override << "\n";
    for (const auto& w : net.locals)
        emit(w, false);
}

DemandTrace read_demand_trace(std::istream& in, const NetworkConfig& net) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < net.locals.size(); ++i)
        index[net.locals[i].id] = i;

    DemandTrace trace;
    trace.per_local.resize(net.locals.size());

    std::string line;
    if (!std::getline(in, line))
        throw SchemaError("demand trace: empty file");
    if (trim(line) != "day,warehouse_id,quantity")
        throw SchemaError("demand trace: expected header 'day,warehouse_id,quantity'");

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string day_s, wh_s, qty_s;
        if (!std::getline(ls, day_s, ',') || !std::getline(ls, wh_s, ',') ||
            !std::getline(ls, qty_s, ','))
            throw SchemaError("demand trace line " + std::to_string(line_no) +
                              ": expected day,warehouse_id,quantity");
        const int day = static_cast<int>(parse_number(trim(day_s), "day"));
        const auto qty = static_cast<std::int64_t>(parse_number(trim(qty_s), "quantity"));
        if (day < 0)
            throw SchemaError("demand trace line " + std::to_string(line_no) +
                              ": day must be >= 0");
        if (qty < 1)
            throw SchemaError("demand trace line " + std::to_string(line_no) +
                              ": quantity must be >= 1");
        const auto it = index.find(trim(wh_s));
        if (it == index.end())
            throw SchemaError("demand trace line " + std::to_string(line_no) +
                              ": unknown warehouse '" + trim(wh_s) + "'");
        auto& days = trace.per_local[it->second];
        if (static_cast<std::size_t>(day) >= days.size())
            days.resize(static_cast<std::size_t>(day) + 1);
        days[static_cast<std::size_t>(day)].push_back(qty);
        trace.days = std::max(trace.days, day + 1);
    }
    for (auto& days : trace.per_local)
        days.resize(static_cast<std::size_t>(trace.days));
    return trace;
}

DemandTrace read_demand_trace_path(const std::string& path, const NetworkConfig& net) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open demand trace: " + path);
    return read_demand_trace(in, net);
}

// ---------------------------------------------------------------------------
// Results CSV
// ---------------------------------------------------------------------------

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void push_local_metric(std::vector<ResultRow>& rows, const CaseResult& cell,
                       const std::string& warehouse, const std::string& metric, double value) {
    rows.push_back(
        {cell.scenario, cell.case_name, to_string(cell.method), warehouse, metric, value});
}

} // namespace

std::vector<ResultRow> result_rows(const ExperimentResults& results) {
    std::vector<ResultRow> rows;
    for (const auto& cell : results.cells) {
        push_local_metric(rows, cell, "-", "failed", cell.failed ? 1.0 : 0.0);
        push_local_metric(rows, cell, "-", "accuracy_noop", cell.accuracy_noop ? 1.0 : 0.0);
        if (cell.failed)
            continue;
        push_local_metric(rows, cell, "0", "central_reorder_point",
                          static_cast<double>(cell.central_R));
        push_local_metric(rows, cell, "0", "analytic_fill", cell.central_analytic_fill);
        push_local_metric(rows, cell, "0", "simulated_fill", cell.central_sim_fill);
        for (const auto& l : cell.locals) {
            push_local_metric(rows, cell, l.id, "reorder_point",
                              static_cast<double>(l.reorder_point));
            push_local_metric(rows, cell, l.id, "fill_target", l.fill_target);
            push_local_metric(rows, cell, l.id, "analytic_fill", l.analytic_fill);
            push_local_metric(rows, cell, l.id, "simulated_fill", l.sim_fill);
            push_local_metric(rows, cell, l.id, "computed_wait_mean", l.computed_wait_mean);
            push_local_metric(rows, cell, l.id, "computed_wait_sd", l.computed_wait_sd);
            push_local_metric(rows, cell, l.id, "simulated_wait_mean", l.sim_wait_mean);
            push_local_metric(rows, cell, l.id, "simulated_wait_sd", l.sim_wait_sd);
            push_local_metric(rows, cell, l.id, "flag_negative_variance",
                              l.negative_variance ? 1.0 : 0.0);
            push_local_metric(rows, cell, l.id, "flag_fallback", l.fallback ? 1.0 : 0.0);
            push_local_metric(rows, cell, l.id, "flag_gamma_fallback",
                              l.gamma_fallback ? 1.0 : 0.0);
            push_local_metric(rows, cell, l.id, "q_over_mu", l.q_over_mu);
        }
    }
    return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "scenario,case,method,warehouse,metric,value\n";
    for (const auto& r : rows)
        out << r.scenario << ',' << r.case_name << ',' << r.method << ',' << r.warehouse << ','
            << r.metric << ',' << format_value(r.value) << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw SchemaError("results csv: empty file");
    if (trim(line) != "scenario,case,method,warehouse,metric,value")
        throw SchemaError("results csv: unexpected header");
    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        std::istringstream ls(line);
        ResultRow r;
        std::string value;
        if (!std::getline(ls, r.scenario, ',') || !std::getline(ls, r.case_name, ',') ||
            !std::getline(ls, r.method, ',') || !std::getline(ls, r.warehouse, ',') ||
            !std::getline(ls, r.metric, ',') || !std::getline(ls, value, ','))
            throw SchemaError("results csv line " + std::to_string(line_no) + ": short row");
        try {
            r.value = std::stod(value);
        } catch (const std::exception&) {
            throw SchemaError("results csv line " + std::to_string(line_no) +
                              ": bad value '" + value + "'");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<WaitObservation> observations_from_rows(const std::vector<ResultRow>& rows) {
    struct Partial {
        WaitObservation o;
        int fields = 0;
    };
    std::map<std::string, Partial> acc;
    for (const auto& r : rows) {
        if (r.warehouse == "-" || r.warehouse == "0")
            continue;
        int field = -1;
        if (r.metric == "computed_wait_mean")
            field = 0;
        else if (r.metric == "computed_wait_sd")
            field = 1;
        else if (r.metric == "simulated_wait_mean")
            field = 2;
        else if (r.metric == "simulated_wait_sd")
            field = 3;
        if (field < 0)
            continue;
        const std::string key =
            r.scenario + '\x1f' + r.case_name + '\x1f' + r.method + '\x1f' + r.warehouse;
        Partial& p = acc[key];
        p.o.scenario = r.scenario;
        p.o.case_name = r.case_name;
        p.o.warehouse = r.warehouse;
        p.o.method = wait_method_from_string(r.method);
        switch (field) {
        case 0:
            p.o.computed_mean = r.value;
            break;
        case 1:
            p.o.computed_sd = r.value;
            break;
        case 2:
            p.o.simulated_mean = r.value;
            break;
        case 3:
            p.o.simulated_sd = r.value;
            break;
        }
        p.fields |= 1 << field;
    }
    std::vector<WaitObservation> out;
    for (auto& [key, p] : acc) {
        (void)key;
        if (p.fields == 0xF)
            out.push_back(p.o);
    }
    return out;
}

} // namespace echelon
