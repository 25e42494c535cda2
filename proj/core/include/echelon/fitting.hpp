#pragma once

#include <array>
#include <memory>

#include "echelon/distributions.hpp"
#include "echelon/moments.hpp"
#include "echelon/rng.hpp"

namespace echelon {

/// Customer arrivals per day are Poisson(lambda), order sizes are i.i.d.
/// logarithmic(theta). Daily totals are then negative binomial, which is
/// what makes the moment fits below consistent with each other.
class CompoundPoissonLogarithmic {
public:
    CompoundPoissonLogarithmic(double lambda, double theta);

    double lambda() const { return lambda_; }
    double theta() const { return theta_; }

    /// Implied per-day demand moments.
    MomentPair day_moments() const;

    /// Total demand over a window of t days as a negative binomial.
    NegativeBinomialDist window_total(double t) const;

    /// One day of demand: customer count then per-customer sizes, in draw
    /// order.
    std::int64_t sample_day(Rng& rng) const;

    const PoissonDist& arrivals() const { return arrivals_; }
    const LogarithmicDist& order_size() const { return order_size_; }

private:
    double lambda_;
    double theta_;
    PoissonDist arrivals_;
    LogarithmicDist order_size_;
};

/// theta = 1 - mu/sigma^2, lambda = -mu (1-theta) log(theta)/theta.
/// Throws VarianceNotAboveMean when sigma^2 <= mu.
CompoundPoissonLogarithmic fit_logarithmic_compound(const MomentPair& demand);

/// Moment inversion n(1-p)/p = mean, n(1-p)/p^2 = variance.
/// Throws VarianceNotAboveMean when variance <= mean.
NegativeBinomialDist negbin_from_moments(const MomentPair& m);

/// shape = mean^2/variance, scale = variance/mean.
GammaDist gamma_from_moments(const MomentPair& m);

/// Classical E_{k-1,k} fit: integer k with 1/k <= scv <= 1/(k-1), mixing
/// weight from the scv equation. Phase counts above `phase_cap` raise
/// NumericalInstability instead of silently clamping.
MixedErlangDist mixed_erlang_from_moments(const MomentPair& m, int phase_cap = 10000);

LognormalDist lognormal_from_moments(const MomentPair& m);

/// Moments of the two auxiliary residual-lifetime horizons derived from a
/// lead time L with raw moments m1..m4:
///   hat:   E = m2/(2 m1),  E[.^2] = m3/(3 m1)
///   tilde: E = m3/(3 m2),  E[.^2] = m4/(6 m2)
struct ResidualMoments {
    MomentPair hat;
    MomentPair tilde;
};

ResidualMoments residual_lifetime_moments(double m1, double m2, double m3, double m4);

/// Convenience overload: first two raw moments from the MomentPair, third
/// and fourth supplied by the caller's lead-time family.
ResidualMoments residual_lifetime_moments(const MomentPair& lead, double third_moment,
                                          double fourth_moment);

/// Raw moments m1..m4 of a gamma lead time with the given mean/variance.
std::array<double, 4> gamma_raw_moments(const MomentPair& m);

} // namespace echelon
