#include "echelon/network_model.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "echelon/errors.hpp"
#include "echelon/fitting.hpp"
#include "echelon/quadrature.hpp"

namespace echelon {

// ---------------------------------------------------------------------------
// LtdDistribution
// ---------------------------------------------------------------------------

double LtdDistribution::cdf(double x) const {
    if (discrete)
        return discrete->cdf(static_cast<std::int64_t>(std::floor(x)));
    return continuous->cdf(x);
}

double LtdDistribution::partial_expectation(double z) const {
    if (discrete)
        return discrete->partial_expectation(z);
    return continuous->partial_expectation(z);
}

double LtdDistribution::support_upper() const {
    if (discrete)
        return static_cast<double>(discrete->support_upper());
    if (moments.variance == 0.0)
        return moments.mean;
    return continuous->quantile(1.0 - kTailEps);
}

LtdDistribution select_ltd_distribution(const MomentPair& m) {
    require_valid(m, "select_ltd_distribution");
    LtdDistribution out;
    out.moments = m;
    if (m.variance > m.mean) {
        out.family = LtdFamily::NegativeBinomial;
        out.discrete = std::make_shared<NegativeBinomialDist>(negbin_from_moments(m));
    } else if (m.variance > 0.0) {
        out.family = LtdFamily::Gamma;
        out.continuous = std::make_shared<GammaDist>(gamma_from_moments(m));
    } else {
        // Zero-variance demand (including no demand at all); the selection
        // rule's gamma branch is undefined here, a step distribution is the
        // natural degenerate limit.
        out.family = LtdFamily::Gamma;
        out.continuous = std::make_shared<DegenerateDist>(m.mean);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local quantities
// ---------------------------------------------------------------------------

MomentPair lead_time_demand_local(const WarehouseParams& w, const EffectiveLeadTime& eff) {
    require_valid(eff.effective, "lead_time_demand_local");
    const double mean = w.demand.mean * eff.effective.mean;
    const double variance = w.demand.variance * eff.effective.mean +
                            w.demand.mean * w.demand.mean * eff.effective.variance;
    return {mean, variance};
}

double IntegerPmf::total() const {
    double t = 0.0;
    for (double m : mass)
        t += m;
    return t;
}

namespace {

// cdf values F(0..upto) for a discrete distribution; a stable pmf recurrence
// for the negative binomial, plain accumulation otherwise.
std::vector<double> discrete_cdf_table(const DiscreteDistribution& d, std::int64_t upto) {
    std::vector<double> table(static_cast<std::size_t>(upto) + 1);
    if (const auto* nb = dynamic_cast<const NegativeBinomialDist*>(&d)) {
        const double n = nb->size();
        const double p = nb->prob();
        const double log1mp = std::log1p(-p);
        double logf = n * std::log(p);
        double f = 0.0;
        bool linear = false;
        double F = 0.0;
        for (std::int64_t m = 0; m <= upto; ++m) {
            if (m > 0) {
                const double ratio = (n + static_cast<double>(m) - 1.0) / static_cast<double>(m);
                if (linear)
                    f *= ratio * (1.0 - p);
                else
                    logf += std::log(ratio) + log1mp;
            }
            if (!linear && logf > -660.0) {
                f = std::exp(logf);
                linear = true;
            }
            F += linear ? f : 0.0;
            table[static_cast<std::size_t>(m)] = std::min(F, 1.0);
        }
        return table;
    }
    double F = 0.0;
    for (std::int64_t m = 0; m <= upto; ++m) {
        F += d.pmf(m);
        table[static_cast<std::size_t>(m)] = std::min(F, 1.0);
    }
    return table;
}

// F_D evaluated at an integer argument, via a prebuilt table when discrete.
struct LtdCdf {
    const LtdDistribution& ltd;
    std::vector<double> table;

    LtdCdf(const LtdDistribution& d, std::int64_t max_arg) : ltd(d) {
        if (ltd.discrete && max_arg >= 0)
            table = discrete_cdf_table(*ltd.discrete, max_arg);
    }

    double operator()(std::int64_t x) const {
        if (x < 0)
            return 0.0;
        if (!table.empty() && x < static_cast<std::int64_t>(table.size()))
            return table[static_cast<std::size_t>(x)];
        return ltd.cdf(static_cast<double>(x));
    }
};

} // namespace

IntegerPmf inventory_level_pmf(std::int64_t reorder_point, std::int64_t order_quantity,
                               const LtdDistribution& ltd) {
    if (order_quantity < 1)
        throw DomainError("inventory_level_pmf: order quantity must be >= 1");
    const std::int64_t top = reorder_point + order_quantity;
    const auto d_max = static_cast<std::int64_t>(std::ceil(ltd.support_upper()));
    const std::int64_t j_min = reorder_point + 1 - d_max;
    IntegerPmf out;
    out.offset = j_min;
    out.mass.resize(static_cast<std::size_t>(top - j_min + 1));
    const LtdCdf cdf(ltd, top - j_min);
    const double inv_q = 1.0 / static_cast<double>(order_quantity);
    for (std::int64_t j = j_min; j <= top; ++j) {
        const double hi = cdf(top - j);
        const double lo = cdf(reorder_point - j);
        out.mass[static_cast<std::size_t>(j - j_min)] = inv_q * std::max(0.0, hi - lo);
    }
    return out;
}

double order_fill_rate(std::int64_t reorder_point, std::int64_t order_quantity,
                       const LtdDistribution& ltd, const DiscreteDistribution& order_size) {
    if (order_quantity < 1)
        throw DomainError("order_fill_rate: order quantity must be >= 1");
    const std::int64_t top = reorder_point + order_quantity;
    if (top <= 0)
        return 0.0;
    const LtdCdf cdf(ltd, top - 1);
    const double inv_q = 1.0 / static_cast<double>(order_quantity);
    // Pr(I = j) for j = 1..top, then suffix sums Pr(I >= k).
    std::vector<double> level(static_cast<std::size_t>(top) + 1, 0.0);
    for (std::int64_t j = 1; j <= top; ++j) {
        const double hi = cdf(top - j);
        const double lo = cdf(reorder_point - j);
        level[static_cast<std::size_t>(j)] = inv_q * std::max(0.0, hi - lo);
    }
    std::vector<double> tail(static_cast<std::size_t>(top) + 2, 0.0);
    for (std::int64_t j = top; j >= 1; --j)
        tail[static_cast<std::size_t>(j)] =
            tail[static_cast<std::size_t>(j) + 1] + level[static_cast<std::size_t>(j)];
    double beta = 0.0;
    if (const auto* tab = dynamic_cast<const TabulatedDist*>(&order_size)) {
        for (const auto& [k, w] : tab->points())
            if (k >= 1 && k <= top)
                beta += w * tail[static_cast<std::size_t>(k)];
    } else {
        const std::int64_t k_top = std::min<std::int64_t>(top, order_size.support_upper());
        for (std::int64_t k = 1; k <= k_top; ++k)
            beta += order_size.pmf(k) * tail[static_cast<std::size_t>(k)];
    }
    return std::clamp(beta, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Central order-count distribution
// ---------------------------------------------------------------------------

namespace {

constexpr double kOrderCountTail = 1e-9;
constexpr std::int64_t kOrderCountCap = 200000;

// Average of F_D(k Q + x - 1) over x = 1..Q for one quadrature node; each
// node keeps a cursor so consecutive k blocks reuse the cdf recurrence.
class NodeCursor {
public:
    virtual ~NodeCursor() = default;
    virtual double block_average(std::int64_t k) = 0; // delta(k | l) for this node
};

// Negative binomial window demand: p shared across windows, n scales with l.
class NegBinCursor final : public NodeCursor {
public:
    NegBinCursor(double n, double p, std::int64_t q)
        : n_(n), p_(p), log1mp_(std::log1p(-p)), q_(q), logf_(n * std::log(p)) {
        if (logf_ > -660.0) {
            f_ = std::exp(logf_);
            linear_ = true;
        }
        cum_ = linear_ ? f_ : 0.0; // F(0)
        m_ = 0;
    }

    double block_average(std::int64_t k) override {
        const std::int64_t first = k * q_;
        const std::int64_t last = first + q_ - 1;
        double sum = 0.0;
        std::int64_t m = first;
        while (m <= last && !saturated_) {
            advance_to(m);
            sum += cum_;
            // Accumulated pmf sums plateau a few ulps short of one; treat
            // the block tail as saturated once inside the truncation band.
            if (cum_ >= 1.0 - kTailEps)
                saturated_ = true;
            ++m;
        }
        if (m <= last) // cdf saturated: the remaining terms are all 1
            sum += static_cast<double>(last - m + 1);
        return sum / static_cast<double>(q_);
    }

private:
    void advance_to(std::int64_t m) {
        while (m_ < m) {
            ++m_;
            const double ratio = (n_ + static_cast<double>(m_) - 1.0) / static_cast<double>(m_);
            if (linear_) {
                f_ *= ratio * (1.0 - p_);
            } else {
                logf_ += std::log(ratio) + log1mp_;
                if (logf_ > -660.0) {
                    f_ = std::exp(logf_);
                    linear_ = true;
                }
            }
            cum_ += linear_ ? f_ : 0.0;
        }
    }

    double n_, p_, log1mp_;
    std::int64_t q_;
    double logf_;
    double f_ = 0.0;
    bool linear_ = false;
    bool saturated_ = false;
    double cum_;
    std::int64_t m_;
};

// Gamma window demand (variance <= mean); the x-sum is smooth in x, so it is
// evaluated as a midpoint-corrected integral of the cdf.
class GammaCursor final : public NodeCursor {
public:
    GammaCursor(double shape, double scale, std::int64_t q)
        : shape_(shape), scale_(scale), q_(q) {}

    double block_average(std::int64_t k) override {
        const double a = static_cast<double>(k * q_) - 0.5;
        const double b = a + static_cast<double>(q_);
        const double integral = integrate_gl(
            [&](double t) {
                return t <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, t / scale_);
            },
            std::max(0.0, a), b, 16);
        return integral / static_cast<double>(q_);
    }

private:
    double shape_, scale_;
    std::int64_t q_;
};

// Deterministic window demand equal to `total`.
class DeterministicCursor final : public NodeCursor {
public:
    DeterministicCursor(double total, std::int64_t q) : total_(total), q_(q) {}

    double block_average(std::int64_t k) override {
        // F(m) = 1 for m >= total: count x in 1..q with kq + x - 1 >= total.
        const double first = std::ceil(total_) - static_cast<double>(k * q_) + 1.0;
        if (first <= 1.0)
            return 1.0;
        if (first > static_cast<double>(q_))
            return 0.0;
        return (static_cast<double>(q_) - first + 1.0) / static_cast<double>(q_);
    }

private:
    double total_;
    std::int64_t q_;
};

} // namespace

std::vector<double> central_order_count_dist(const WarehouseParams& local,
                                             const ContinuousDistribution& central_lead,
                                             std::size_t quad_nodes) {
    if (local.demand.mean <= 0.0)
        return {1.0}; // no demand, no orders

    const std::int64_t q = local.order_quantity;
    const GaussLegendreRule& rule = gauss_legendre(quad_nodes);

    std::vector<std::unique_ptr<NodeCursor>> cursors;
    std::vector<double> weights;
    cursors.reserve(quad_nodes);
    weights.reserve(quad_nodes);
    for (std::size_t j = 0; j < quad_nodes; ++j) {
        const double u = 0.5 * (rule.nodes[j] + 1.0); // map to (0,1)
        const double w = 0.5 * rule.weights[j];
        const double l = central_lead.quantile(u);
        if (!(l > 0.0))
            continue;
        const double mean = local.demand.mean * l;
        const double var = local.demand.variance * l;
        if (var > mean) {
            const double p = mean / var;
            const double n = mean * p / (1.0 - p);
            cursors.push_back(std::make_unique<NegBinCursor>(n, p, q));
        } else if (var > 0.0) {
            cursors.push_back(
                std::make_unique<GammaCursor>(mean * mean / var, var / mean, q));
        } else {
            cursors.push_back(std::make_unique<DeterministicCursor>(mean, q));
        }
        weights.push_back(w);
    }

    std::vector<double> s;
    double prev_delta = 0.0;
    for (std::int64_t k = 0;; ++k) {
        if (k > kOrderCountCap)
            throw QuadratureFailure("central_order_count_dist: tail mass unresolved after " +
                                    std::to_string(kOrderCountCap) + " order counts");
        double delta = 0.0;
        for (std::size_t j = 0; j < cursors.size(); ++j)
            delta += weights[j] * cursors[j]->block_average(k);
        delta = std::min(delta, 1.0);
        s.push_back(std::max(0.0, delta - prev_delta));
        prev_delta = delta;
        if (delta > 1.0 - kOrderCountTail)
            break;
    }
    return s;
}

MomentPair central_ltd_moments(const NetworkConfig& net,
                               const std::vector<std::vector<double>>& per_local_order_counts,
                               double lead_mean) {
    if (per_local_order_counts.size() != net.locals.size())
        throw DomainError("central_ltd_moments: one order-count pmf per local warehouse");
    const double q = static_cast<double>(net.subbatch);
    double mean = 0.0;
    double variance = 0.0;
    for (std::size_t i = 0; i < net.locals.size(); ++i) {
        const auto& w = net.locals[i];
        const double target = w.demand.mean * lead_mean;
        mean += target / q;
        const auto& s = per_local_order_counts[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double dev =
                (target - static_cast<double>(k) * static_cast<double>(w.order_quantity)) / q;
            acc += dev * dev * s[k];
        }
        variance += acc;
    }
    return {mean, variance};
}

DiscretePtr central_order_size_pmf(const NetworkConfig& net) {
    double total_rate = 0.0;
    for (const auto& w : net.locals)
        if (w.demand.mean > 0.0)
            total_rate += w.demand.mean / static_cast<double>(w.order_quantity);
    if (total_rate <= 0.0)
        throw ConfigError("central_order_size_pmf: no local demand");
    std::vector<std::pair<std::int64_t, double>> points;
    for (const auto& w : net.locals) {
        if (w.demand.mean <= 0.0)
            continue;
        points.emplace_back(w.order_quantity / net.subbatch,
                            (w.demand.mean / static_cast<double>(w.order_quantity)) /
                                total_rate);
    }
    return std::make_shared<TabulatedDist>(std::move(points));
}

CentralModel build_central_model(const NetworkConfig& net,
                                 const ContinuousDistribution& central_lead,
                                 std::size_t quad_nodes) {
    net.validate();
    CentralModel model;
    model.q = net.subbatch;
    model.central_Q_q = net.central.order_quantity / net.subbatch;
    model.order_counts.reserve(net.locals.size());
    for (const auto& w : net.locals)
        model.order_counts.push_back(central_order_count_dist(w, central_lead, quad_nodes));
    model.ltd_moments = central_ltd_moments(net, model.order_counts, central_lead.mean());
    model.ltd = select_ltd_distribution(model.ltd_moments);
    model.order_size = central_order_size_pmf(net);
    return model;
}

CentralModel build_central_model(const NetworkConfig& net, std::size_t quad_nodes) {
    const ContinuousPtr lead = make_lead_distribution(net.central.lead);
    return build_central_model(net, *lead, quad_nodes);
}

ContinuousPtr make_lead_distribution(const MomentPair& lead) {
    if (lead.variance > 0.0)
        return std::make_shared<GammaDist>(gamma_from_moments(lead));
    return std::make_shared<DegenerateDist>(lead.mean);
}

} // namespace echelon
