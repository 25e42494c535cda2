#include "echelon/wait_time.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "echelon/distributions.hpp"
#include "echelon/errors.hpp"
#include "echelon/fitting.hpp"
#include "echelon/quadrature.hpp"

namespace echelon {

const char* to_string(WaitMethod m) {
    switch (m) {
    case WaitMethod::AXS:
        return "axs";
    case WaitMethod::KKSL:
        return "kksl";
    case WaitMethod::BF:
        return "bf";
    case WaitMethod::NB:
        return "nb";
    }
    return "?";
}

WaitMethod wait_method_from_string(const std::string& s) {
    std::string t;
    for (char c : s)
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "axs")
        return WaitMethod::AXS;
    if (t == "kksl")
        return WaitMethod::KKSL;
    if (t == "bf")
        return WaitMethod::BF;
    if (t == "nb")
        return WaitMethod::NB;
    throw UnknownMethod("unknown wait-time method '" + s + "' (expected axs|kksl|bf|nb)");
}

const WaitTimeEstimate::PerWarehouse& WaitTimeEstimate::for_warehouse(const std::string& id) const {
    for (const auto& w : per_warehouse)
        if (w.id == id)
            return w;
    throw KeyMismatch("no wait estimate for warehouse '" + id + "'");
}

bool WaitTimeEstimate::any_flag_negative_variance() const {
    return std::any_of(per_warehouse.begin(), per_warehouse.end(),
                       [](const PerWarehouse& w) { return w.flags.negative_variance_clamped; });
}

bool WaitTimeEstimate::any_flag_fallback() const {
    return std::any_of(per_warehouse.begin(), per_warehouse.end(),
                       [](const PerWarehouse& w) { return w.flags.fallback_fired; });
}

MomentPair KkslOrderSizeModel::moments(std::int64_t order_quantity) const {
    const double q = static_cast<double>(order_quantity);
    switch (kind) {
    case Kind::PointMassAtQ:
        return {q, 0.0};
    case Kind::GeometricMultiple: {
        if (!(mean_multiple >= 1.0))
            throw DomainError("KkslOrderSizeModel: mean multiple must be >= 1");
        const double p = 1.0 / mean_multiple;
        return {q * mean_multiple, q * q * (1.0 - p) / (p * p)};
    }
    }
    throw DomainError("KkslOrderSizeModel: bad kind");
}

// ---------------------------------------------------------------------------
// Shared residual-horizon inputs
// ---------------------------------------------------------------------------

CentralWaitInputs central_wait_inputs(const NetworkConfig& net, std::size_t quad_nodes) {
    net.validate();
    CentralWaitInputs in;
    in.q = net.subbatch;
    const auto raw = gamma_raw_moments(net.central.lead);
    in.lead_mean = raw[0];
    in.lead_raw2 = raw[1];
    const ResidualMoments res = residual_lifetime_moments(raw[0], raw[1], raw[2], raw[3]);

    const ContinuousPtr hat_lead = make_lead_distribution(res.hat);
    const ContinuousPtr tilde_lead = make_lead_distribution(res.tilde);
    const CentralModel hat = build_central_model(net, *hat_lead, quad_nodes);
    const CentralModel tilde = build_central_model(net, *tilde_lead, quad_nodes);
    in.demand_hat = hat.ltd_moments;
    in.demand_tilde = tilde.ltd_moments;
    return in;
}

namespace {

double partial_expectation_point(const MomentPair& m, double z) {
    return std::max(0.0, m.mean - z);
}

} // namespace

// ---------------------------------------------------------------------------
// AXS
// ---------------------------------------------------------------------------

WaitTimeEstimate axs_wait(const NetworkConfig& net, std::int64_t central_R) {
    net.validate();
    double sum_mu = 0.0;
    double sum_sd = 0.0;
    for (const auto& w : net.locals) {
        sum_mu += w.demand.mean;
        sum_sd += w.demand.sd();
    }
    if (!(sum_mu > 0.0))
        throw DomainError("axs_wait: total local demand must be > 0");

    const double lead_mean = net.central.lead.mean;
    const double spread = sum_sd * lead_mean; // denominator of the safety factor
    const double k = (static_cast<double>(central_R + net.central.order_quantity) -
                      sum_mu * lead_mean) /
                     spread;
    const double g = normal_loss(k);
    const double scale = spread / sum_mu;
    const double mean = scale * g;
    // Var = scale^2 (E[((Z-k)^+)^2] - G(k)^2)
    double variance = scale * scale * (normal_loss2(k) - g * g);

    WaitDiagnostics flags;
    if (variance < 0.0) {
        flags.negative_variance_clamped = true;
        variance = 0.0;
    }

    WaitTimeEstimate out;
    out.method = WaitMethod::AXS;
    out.per_warehouse.reserve(net.locals.size());
    for (const auto& w : net.locals)
        out.per_warehouse.push_back({w.id, {std::max(0.0, mean), variance}, flags});
    return out;
}

// ---------------------------------------------------------------------------
// KKSL
// ---------------------------------------------------------------------------

namespace {

// Difference of partial expectations over (R0, R0 + Q0], continuous fit.
double pe_difference_continuous(const MomentPair& m, double z_lo, double z_hi, KkslFit fit,
                                bool* instability) {
    if (m.variance <= 0.0)
        return partial_expectation_point(m, z_lo) - partial_expectation_point(m, z_hi);
    if (fit == KkslFit::NegBin && m.variance > m.mean) {
        const NegativeBinomialDist d = negbin_from_moments(m);
        return d.partial_expectation(z_lo) - d.partial_expectation(z_hi);
    }
    if (fit == KkslFit::NegBin && instability)
        *instability = true; // fell through to the mixed-Erlang route
    const MixedErlangDist d = mixed_erlang_from_moments(m);
    return d.partial_expectation(z_lo) - d.partial_expectation(z_hi);
}

} // namespace

WaitTimeEstimate kksl_wait(const NetworkConfig& net, std::int64_t central_R,
                           const KkslOrderSizeModel& osm, KkslFit fit) {
    return kksl_wait(net, central_R, central_wait_inputs(net), osm, fit);
}

WaitTimeEstimate kksl_wait(const NetworkConfig& net, std::int64_t central_R,
                           const CentralWaitInputs& inputs, const KkslOrderSizeModel& osm,
                           KkslFit fit) {
    if (central_R < 0)
        throw NegativeReorderPoint("kksl_wait: only applies for central reorder points >= 0");
    const double q = static_cast<double>(inputs.q);
    const double q0 = static_cast<double>(net.central.order_quantity) / q;
    const double z_lo = static_cast<double>(central_R) / q;
    const double z_hi = z_lo + q0;

    WaitTimeEstimate out;
    out.method = WaitMethod::KKSL;
    out.per_warehouse.reserve(net.locals.size());
    for (const auto& w : net.locals) {
        const MomentPair o = osm.moments(w.order_quantity).scaled(1.0 / q);
        const MomentPair hat = inputs.demand_hat + o;
        const MomentPair tilde = inputs.demand_tilde + o;

        WaitDiagnostics flags;
        const double d1 = pe_difference_continuous(hat, z_lo, z_hi, fit, &flags.instability);
        const double d2 = pe_difference_continuous(tilde, z_lo, z_hi, fit, &flags.instability);
        const double mean = inputs.lead_mean / q0 * std::max(0.0, d1);
        const double raw2 = inputs.lead_raw2 / q0 * std::max(0.0, d2);
        double variance = raw2 - mean * mean;
        if (variance < 0.0) {
            flags.negative_variance_clamped = true;
            variance = 0.0;
        }
        out.per_warehouse.push_back({w.id, {mean, variance}, flags});
    }
    return out;
}

// ---------------------------------------------------------------------------
// BF
// ---------------------------------------------------------------------------

namespace {

// Demand-rate model: delay of a tagged order with coverage u at rate d,
// bounded by the (constant) central lead time.
double bf_delay(double lead, double coverage, double rate) {
    const double w = lead - coverage / rate;
    return std::clamp(w, 0.0, lead);
}

} // namespace

WaitTimeEstimate bf_wait(const NetworkConfig& net, std::int64_t central_R) {
    net.validate();
    const double lead = net.central.lead.mean;
    double rate_mean = 0.0;
    double rate_var = 0.0;
    for (const auto& w : net.locals) {
        rate_mean += w.demand.mean;
        rate_var += w.demand.variance;
    }
    rate_var /= lead; // variance of the average rate over the lead-time window
    if (!(rate_mean > 0.0))
        throw DomainError("bf_wait: total local demand must be > 0");
    const LognormalDist rate = lognormal_from_moments({rate_mean, rate_var});

    const GaussLegendreRule& rule = gauss_legendre(64);
    const double q0 = static_cast<double>(net.central.order_quantity);

    WaitTimeEstimate out;
    out.method = WaitMethod::BF;
    out.per_warehouse.reserve(net.locals.size());
    for (const auto& w : net.locals) {
        WaitDiagnostics flags;
        MomentPair mp;
        if (w.order_quantity > net.central.order_quantity + central_R) {
            // The method computes a negative expected wait here; substitute
            // the central lead time instead.
            flags.fallback_fired = true;
            mp = net.central.lead;
        } else {
            const double base = static_cast<double>(central_R) -
                                static_cast<double>(w.order_quantity);
            double m1 = 0.0;
            double m2 = 0.0;
            for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
                const double v = 0.5 * (rule.nodes[a] + 1.0) * q0; // position above R0
                const double coverage = base + v;
                const double wa = 0.5 * rule.weights[a];
                for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                    const double u = 0.5 * (rule.nodes[b] + 1.0);
                    const double d = rate.quantile(u);
                    const double wb = 0.5 * rule.weights[b];
                    const double delay = bf_delay(lead, coverage, d);
                    m1 += wa * wb * delay;
                    m2 += wa * wb * delay * delay;
                }
            }
            mp = {m1, std::max(0.0, m2 - m1 * m1)};
        }
        out.per_warehouse.push_back({w.id, mp, flags});
    }
    return out;
}

// ---------------------------------------------------------------------------
// NB
// ---------------------------------------------------------------------------

WaitTimeEstimate nb_wait(const NetworkConfig& net, std::int64_t central_R) {
    return nb_wait(net, central_R, central_wait_inputs(net));
}

namespace {

double pe_difference_nb(const MomentPair& m, double z_lo, double z_hi, WaitDiagnostics* flags) {
    if (m.variance > m.mean) {
        const NegativeBinomialDist d = negbin_from_moments(m);
        return d.partial_expectation(z_lo) - d.partial_expectation(z_hi);
    }
    if (m.variance > 0.0) {
        // Negative binomial undefined; gamma substitute, flagged.
        flags->gamma_fallback = true;
        const GammaDist d = gamma_from_moments(m);
        return d.partial_expectation(z_lo) - d.partial_expectation(z_hi);
    }
    flags->gamma_fallback = true;
    return partial_expectation_point(m, z_lo) - partial_expectation_point(m, z_hi);
}

} // namespace

WaitTimeEstimate nb_wait(const NetworkConfig& net, std::int64_t central_R,
                         const CentralWaitInputs& inputs) {
    const double q = static_cast<double>(inputs.q);
    const double q0 = static_cast<double>(net.central.order_quantity) / q;
    const double z_lo = static_cast<double>(central_R) / q;
    const double z_hi = z_lo + q0;

    WaitTimeEstimate out;
    out.method = WaitMethod::NB;
    out.per_warehouse.reserve(net.locals.size());
    for (const auto& w : net.locals) {
        const MomentPair shift = {static_cast<double>(w.order_quantity) / q, 0.0};
        const MomentPair hat = inputs.demand_hat + shift;
        const MomentPair tilde = inputs.demand_tilde + shift;

        WaitDiagnostics flags;
        const double d1 = pe_difference_nb(hat, z_lo, z_hi, &flags);
        const double d2 = pe_difference_nb(tilde, z_lo, z_hi, &flags);
        const double mean = inputs.lead_mean / q0 * std::max(0.0, d1);
        const double raw2 = inputs.lead_raw2 / q0 * std::max(0.0, d2);
        double variance = raw2 - mean * mean;
        if (variance < 0.0) {
            flags.negative_variance_clamped = true;
            variance = 0.0;
        }
        out.per_warehouse.push_back({w.id, {mean, variance}, flags});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

WaitTimeEstimate estimate(WaitMethod method, const NetworkConfig& net, std::int64_t central_R) {
    switch (method) {
    case WaitMethod::AXS:
        return axs_wait(net, central_R);
    case WaitMethod::KKSL:
        return kksl_wait(net, central_R);
    case WaitMethod::BF:
        return bf_wait(net, central_R);
    case WaitMethod::NB:
        return nb_wait(net, central_R);
    }
    throw UnknownMethod("estimate: bad method tag");
}

WaitTimeEstimate estimate(WaitMethod method, const NetworkConfig& net, std::int64_t central_R,
                          const CentralWaitInputs& inputs) {
    switch (method) {
    case WaitMethod::AXS:
        return axs_wait(net, central_R);
    case WaitMethod::KKSL:
        return kksl_wait(net, central_R, inputs);
    case WaitMethod::BF:
        return bf_wait(net, central_R);
    case WaitMethod::NB:
        return nb_wait(net, central_R, inputs);
    }
    throw UnknownMethod("estimate: bad method tag");
}

} // namespace echelon
