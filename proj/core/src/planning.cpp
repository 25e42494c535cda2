#include "echelon/planning.hpp"

#include <cmath>
#include <functional>
#include <memory>

#include "echelon/errors.hpp"
#include "echelon/fitting.hpp"

namespace echelon {

std::vector<std::int64_t> CalibrationResult::local_reorder_vector() const {
    std::vector<std::int64_t> out;
    out.reserve(locals.size());
    for (const auto& l : locals)
        out.push_back(l.reorder_point);
    return out;
}

namespace {

// Reorder points beyond this are treated as unreachable rather than ground
// through ever-larger fill evaluations.
constexpr std::int64_t kBracketCap = 2000000;

// Minimal integer r in the grown bracket with fill(r) >= target; fill must
// be non-decreasing in r.
std::int64_t minimal_reorder_point(const std::function<double(std::int64_t)>& fill,
                                   std::int64_t lo, std::int64_t hi, double target) {
    if (fill(lo) >= target)
        return lo;
    std::int64_t span = std::max<std::int64_t>(1, hi - lo);
    hi = std::min(hi, kBracketCap);
    while (fill(hi) < target) {
        if (hi >= kBracketCap)
            throw TargetUnreachable("fill-rate target " + std::to_string(target) +
                                    " not reachable within the bracket cap");
        hi = std::min(hi + span, kBracketCap);
        span *= 2;
    }
    // Invariant: fill(lo) < target <= fill(hi).
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (fill(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

} // namespace

double central_fill_rate(const CentralModel& model, std::int64_t central_R) {
    // Subbatch units; overrides that are not q-multiples are floored.
    const std::int64_t r_q = static_cast<std::int64_t>(
        std::floor(static_cast<double>(central_R) / static_cast<double>(model.q)));
    return order_fill_rate(r_q, model.central_Q_q, model.ltd, *model.order_size);
}

std::int64_t central_reorder_point(const NetworkConfig& net, double target) {
    return central_reorder_point(net, build_central_model(net), target);
}

std::int64_t central_reorder_point(const NetworkConfig& net, const CentralModel& model,
                                   double target) {
    if (!(target > 0.0 && target < 1.0))
        throw DomainError("central_reorder_point: target must lie in (0,1)");
    const std::int64_t q0_q = net.central.order_quantity / model.q;
    const auto fill = [&](std::int64_t r_q) {
        return order_fill_rate(r_q, q0_q, model.ltd, *model.order_size);
    };
    const std::int64_t lo = -q0_q;
    const std::int64_t hi = static_cast<std::int64_t>(
        std::ceil(model.ltd_moments.mean + 10.0 * model.ltd_moments.sd()));
    const std::int64_t r_q = minimal_reorder_point(fill, lo, std::max(hi, lo + 1), target);
    return r_q * model.q;
}

CalibrationResult local_reorder_points(const NetworkConfig& net, std::int64_t central_R,
                                       WaitMethod method) {
    return local_reorder_points_for_wait(net, central_R, estimate(method, net, central_R));
}

CalibrationResult local_reorder_points(const NetworkConfig& net, std::int64_t central_R,
                                       const CentralWaitInputs& inputs, WaitMethod method) {
    return local_reorder_points_for_wait(net, central_R,
                                         estimate(method, net, central_R, inputs));
}

CalibrationResult local_reorder_points_for_wait(const NetworkConfig& net,
                                                std::int64_t central_R,
                                                const WaitTimeEstimate& wait) {
    net.validate();
    CalibrationResult out;
    out.central_R = central_R;
    out.wait = wait;
    out.locals.reserve(net.locals.size());

    for (const auto& w : net.locals) {
        const MomentPair wait_moments = wait.for_warehouse(w.id).moments;
        const EffectiveLeadTime eff = EffectiveLeadTime::make(w.lead, wait_moments);
        const MomentPair ltd_moments = lead_time_demand_local(w, eff);
        const LtdDistribution ltd = select_ltd_distribution(ltd_moments);

        DiscretePtr order_size;
        if (w.demand.variance > w.demand.mean) {
            const auto process = fit_logarithmic_compound(w.demand);
            order_size = std::make_shared<LogarithmicDist>(process.order_size());
        } else {
            // Underdispersed demand has no logarithmic compounding; treat
            // incoming orders as single units.
            order_size = std::make_shared<PointMassDist>(1);
        }

        const auto fill = [&](std::int64_t r) {
            return order_fill_rate(r, w.order_quantity, ltd, *order_size);
        };
        const std::int64_t lo = -w.order_quantity;
        const std::int64_t hi = static_cast<std::int64_t>(
            std::ceil(ltd_moments.mean + 10.0 * ltd_moments.sd()));
        const std::int64_t r =
            minimal_reorder_point(fill, lo, std::max(hi, lo + 1), w.fill_target);

        CalibrationResult::Local entry;
        entry.id = w.id;
        entry.reorder_point = r;
        entry.achieved_fill = fill(r);
        entry.ltd_family = ltd.family;
        entry.ltd_moments = ltd_moments;
        entry.ltd_truncation = ltd.support_upper();
        out.locals.push_back(std::move(entry));
    }
    return out;
}

CalibrationResult calibrate(const NetworkConfig& net, double central_target, WaitMethod method) {
    const std::int64_t central_R = net.central_R_override
                                       ? *net.central_R_override
                                       : central_reorder_point(net, central_target);
    return local_reorder_points(net, central_R, method);
}

} // namespace echelon
