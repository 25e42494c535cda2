#include "echelon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "echelon/errors.hpp"

namespace echelon {

ErrorStats error_metrics(const std::vector<WaitObservation>& observations) {
    ErrorStats s;
    for (const auto& o : observations) {
        s.error_mean += o.error_mean();
        s.abs_error_mean += std::abs(o.error_mean());
        s.error_sd += o.error_sd();
        s.abs_error_sd += std::abs(o.error_sd());
        ++s.count;
    }
    if (s.count > 0) {
        const double n = static_cast<double>(s.count);
        s.error_mean /= n;
        s.abs_error_mean /= n;
        s.error_sd /= n;
        s.abs_error_sd /= n;
    }
    return s;
}

std::vector<WaitObservation> pair_observations(
    const std::string& scenario, const std::string& case_name, const WaitTimeEstimate& computed,
    const std::vector<std::pair<std::string, WaitStats>>& simulated) {
    if (computed.per_warehouse.size() != simulated.size())
        throw KeyMismatch("pair_observations: warehouse sets differ in size");
    std::vector<WaitObservation> out;
    out.reserve(simulated.size());
    for (const auto& [id, stats] : simulated) {
        const auto& est = computed.for_warehouse(id); // throws KeyMismatch if absent
        WaitObservation o;
        o.scenario = scenario;
        o.case_name = case_name;
        o.warehouse = id;
        o.method = computed.method;
        o.computed_mean = est.moments.mean;
        o.computed_sd = est.moments.sd();
        o.simulated_mean = stats.mean;
        o.simulated_sd = stats.sd;
        out.push_back(o);
    }
    return out;
}

namespace {

std::size_t method_index(WaitMethod m) { return static_cast<std::size_t>(m); }

// Rank positions (0 = best) by absolute error; ties resolved by method
// declaration order, which is also the iteration order here.
std::vector<int> rank_positions(const std::vector<double>& abs_errors) {
    const std::size_t n = abs_errors.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return abs_errors[a] < abs_errors[b];
    });
    std::vector<int> pos(n);
    for (std::size_t r = 0; r < n; ++r)
        pos[order[r]] = static_cast<int>(r);
    return pos;
}

} // namespace

RankingReport ranking_report(const std::vector<WaitObservation>& observations,
                             const std::vector<WaitMethod>& methods) {
    return ranking_report(observations, methods,
                          [](const WaitObservation&) { return true; });
}

RankingReport ranking_report(const std::vector<WaitObservation>& observations,
                             const std::vector<WaitMethod>& methods,
                             const std::function<bool(const WaitObservation&)>& group) {
    if (methods.size() < 2)
        throw DomainError("ranking_report: needs at least two methods");

    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, std::map<WaitMethod, const WaitObservation*>> by_case;
    for (const auto& o : observations) {
        if (!group(o))
            continue;
        by_case[{o.scenario, o.case_name, o.warehouse}][o.method] = &o;
    }

    RankingReport report;
    std::array<std::int64_t, 4> best_m{}, second_m{}, worst_m{};
    std::array<std::int64_t, 4> best_s{}, second_s{}, worst_s{};
    std::array<std::int64_t, 4> best_c{}, second_c{}, worst_c{};

    for (const auto& [key, per_method] : by_case) {
        (void)key;
        if (per_method.size() != methods.size())
            throw KeyMismatch("ranking_report: a test case is missing a method");
        std::vector<double> abs_mean, abs_sd;
        abs_mean.reserve(methods.size());
        abs_sd.reserve(methods.size());
        for (WaitMethod m : methods) {
            const auto it = per_method.find(m);
            if (it == per_method.end())
                throw KeyMismatch("ranking_report: method missing for a test case");
            abs_mean.push_back(std::abs(it->second->error_mean()));
            abs_sd.push_back(std::abs(it->second->error_sd()));
        }
        const std::vector<int> pos_mean = rank_positions(abs_mean);
        const std::vector<int> pos_sd = rank_positions(abs_sd);
        const int last = static_cast<int>(methods.size()) - 1;
        for (std::size_t i = 0; i < methods.size(); ++i) {
            const std::size_t mi = method_index(methods[i]);
            if (pos_mean[i] == 0)
                ++best_m[mi];
            if (pos_mean[i] <= 1)
                ++second_m[mi];
            if (pos_mean[i] == last)
                ++worst_m[mi];
            if (pos_sd[i] == 0)
                ++best_s[mi];
            if (pos_sd[i] <= 1)
                ++second_s[mi];
            if (pos_sd[i] == last)
                ++worst_s[mi];
            if (pos_mean[i] == 0 && pos_sd[i] == 0)
                ++best_c[mi];
            if (pos_mean[i] <= 1 && pos_sd[i] <= 1)
                ++second_c[mi];
            if (pos_mean[i] == last && pos_sd[i] == last)
                ++worst_c[mi];
        }
        ++report.cases;
    }

    report.empty_group = report.cases == 0;
    if (report.cases > 0) {
        const double n = static_cast<double>(report.cases);
        for (std::size_t i = 0; i < 4; ++i) {
            report.mean_rank[i] = {best_m[i] / n, second_m[i] / n, worst_m[i] / n};
            report.sd_rank[i] = {best_s[i] / n, second_s[i] / n, worst_s[i] / n};
            report.combined_rank[i] = {best_c[i] / n, second_c[i] / n, worst_c[i] / n};
        }
    }
    return report;
}

} // namespace echelon
