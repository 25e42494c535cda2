#include "echelon/fitting.hpp"

#include <cmath>

#include "echelon/errors.hpp"

namespace echelon {

CompoundPoissonLogarithmic::CompoundPoissonLogarithmic(double lambda, double theta)
    : lambda_(lambda), theta_(theta), arrivals_(lambda), order_size_(theta) {}

MomentPair CompoundPoissonLogarithmic::day_moments() const {
    // Compound Poisson: mean = lambda E[K], variance = lambda E[K^2].
    const double ek = order_size_.mean();
    const double ek2 = order_size_.variance() + ek * ek;
    return {lambda_ * ek, lambda_ * ek2};
}

NegativeBinomialDist CompoundPoissonLogarithmic::window_total(double t) const {
    if (!(t > 0.0))
        throw DomainError("window_total: window length must be > 0");
    const MomentPair day = day_moments();
    return negbin_from_moments({day.mean * t, day.variance * t});
}

std::int64_t CompoundPoissonLogarithmic::sample_day(Rng& rng) const {
    const std::int64_t customers = arrivals_.sample(rng);
    std::int64_t total = 0;
    for (std::int64_t c = 0; c < customers; ++c)
        total += order_size_.sample(rng);
    return total;
}

CompoundPoissonLogarithmic fit_logarithmic_compound(const MomentPair& demand) {
    require_valid(demand, "fit_logarithmic_compound");
    if (!(demand.mean > 0.0))
        throw DomainError("fit_logarithmic_compound: mean must be > 0");
    if (!(demand.variance > demand.mean))
        throw VarianceNotAboveMean(
            "fit_logarithmic_compound: needs variance > mean for a logarithmic order size");
    const double theta = 1.0 - demand.mean / demand.variance;
    const double lambda = -demand.mean * (1.0 - theta) * std::log(theta) / theta;
    return CompoundPoissonLogarithmic(lambda, theta);
}

NegativeBinomialDist negbin_from_moments(const MomentPair& m) {
    require_valid(m, "negbin_from_moments");
    if (!(m.mean > 0.0))
        throw DomainError("negbin_from_moments: mean must be > 0");
    if (!(m.variance > m.mean))
        throw VarianceNotAboveMean("negbin_from_moments: needs variance > mean");
    const double p = m.mean / m.variance;
    const double n = m.mean * p / (1.0 - p);
    return NegativeBinomialDist(n, p);
}

GammaDist gamma_from_moments(const MomentPair& m) {
    require_valid(m, "gamma_from_moments");
    if (!(m.mean > 0.0) || !(m.variance > 0.0))
        throw DomainError("gamma_from_moments: mean and variance must be > 0");
    return GammaDist(m.mean * m.mean / m.variance, m.variance / m.mean);
}

MixedErlangDist mixed_erlang_from_moments(const MomentPair& m, int phase_cap) {
    require_valid(m, "mixed_erlang_from_moments");
    if (!(m.mean > 0.0) || !(m.variance > 0.0))
        throw DomainError("mixed_erlang_from_moments: mean and variance must be > 0");
    const double scv = m.scv();
    if (scv < 1.0 / static_cast<double>(phase_cap))
        throw NumericalInstability(
            "mixed_erlang_from_moments: squared coefficient of variation " +
            std::to_string(scv) + " needs more than " + std::to_string(phase_cap) +
            " phases");
    // k = 1 handles scv >= 1 (atom at zero); otherwise the unique k with
    // 1/k <= scv <= 1/(k-1).
    int k = 1;
    if (scv < 1.0)
        k = static_cast<int>(std::ceil(1.0 / scv - 1e-12));
    const double kd = static_cast<double>(k);
    const double disc = kd * (1.0 + scv) - kd * kd * scv;
    const double p = (kd * scv - std::sqrt(std::max(0.0, disc))) / (1.0 + scv);
    const double rate = (kd - p) / m.mean;
    return MixedErlangDist(k, std::clamp(p, 0.0, 1.0), rate);
}

LognormalDist lognormal_from_moments(const MomentPair& m) {
    require_valid(m, "lognormal_from_moments");
    if (!(m.mean > 0.0) || !(m.variance > 0.0))
        throw DomainError("lognormal_from_moments: mean and variance must be > 0");
    const double s2 = std::log1p(m.variance / (m.mean * m.mean));
    return LognormalDist(std::log(m.mean) - 0.5 * s2, std::sqrt(s2));
}

ResidualMoments residual_lifetime_moments(double m1, double m2, double m3, double m4) {
    if (!(m1 > 0.0))
        throw DomainError("residual_lifetime_moments: E[L] must be > 0");
    if (!(m2 > 0.0))
        throw DomainError("residual_lifetime_moments: E[L^2] must be > 0");
    ResidualMoments r;
    const double hat_mean = m2 / (2.0 * m1);
    const double hat_raw2 = m3 / (3.0 * m1);
    r.hat = {hat_mean, std::max(0.0, hat_raw2 - hat_mean * hat_mean)};
    const double tilde_mean = m3 / (3.0 * m2);
    const double tilde_raw2 = m4 / (6.0 * m2);
    r.tilde = {tilde_mean, std::max(0.0, tilde_raw2 - tilde_mean * tilde_mean)};
    return r;
}

ResidualMoments residual_lifetime_moments(const MomentPair& lead, double third_moment,
                                          double fourth_moment) {
    return residual_lifetime_moments(lead.mean, lead.raw2(), third_moment, fourth_moment);
}

std::array<double, 4> gamma_raw_moments(const MomentPair& m) {
    if (m.variance <= 0.0) {
        // Degenerate lead time: moments of a constant.
        const double c = m.mean;
        return {c, c * c, c * c * c, c * c * c * c};
    }
    const GammaDist g = gamma_from_moments(m);
    return {g.raw_moment(1), g.raw_moment(2), g.raw_moment(3), g.raw_moment(4)};
}

} // namespace echelon
