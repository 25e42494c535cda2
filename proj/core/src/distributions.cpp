#include "echelon/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/negative_binomial.hpp>

#include "echelon/errors.hpp"

namespace echelon {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;
} // namespace

// ---------------------------------------------------------------------------
// Interface defaults
// ---------------------------------------------------------------------------

std::int64_t DiscreteDistribution::support_upper() const {
    // Exponential bracket then binary search on the cdf.
    std::int64_t hi = 1;
    const double target = 1.0 - kTailEps;
    // Start near the mean to keep cdf calls cheap.
    hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(mean() + 10.0 * std::sqrt(variance())) + 1);
    while (cdf(hi) < target) {
        if (hi > (std::int64_t{1} << 50))
            throw NumericalInstability("support_upper: tail mass unresolved");
        hi *= 2;
    }
    std::int64_t lo = 0;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (cdf(mid) < target)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

double DiscreteDistribution::partial_expectation(double z) const {
    if (z <= 0.0)
        return mean() - z;
    const auto zf = static_cast<std::int64_t>(std::floor(z));
    // E[X] - sum_{x=0}^{zf} x f(x) - z (1 - F(zf))
    double below = 0.0;
    for (std::int64_t x = 1; x <= zf; ++x)
        below += static_cast<double>(x) * pmf(x);
    const double tail = 1.0 - cdf(zf);
    const double value = mean() - below - z * tail;
    return std::max(0.0, value);
}

// ---------------------------------------------------------------------------
// Scalar functions
// ---------------------------------------------------------------------------

double logarithmic_pmf(std::int64_t k, double theta) {
    if (k < 1)
        throw DomainError("logarithmic_pmf: k must be >= 1");
    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("logarithmic_pmf: theta must lie in (0,1)");
    const double log_p = static_cast<double>(k) * std::log(theta) -
                         std::log(static_cast<double>(k)) -
                         std::log(-std::log1p(-theta));
    return std::exp(log_p);
}

double poisson_pmf(std::int64_t x, double lambda) {
    if (!(lambda > 0.0))
        throw DomainError("poisson_pmf: lambda must be > 0");
    if (x < 0)
        return 0.0;
    const double log_p = -lambda + static_cast<double>(x) * std::log(lambda) -
                         boost::math::lgamma(static_cast<double>(x) + 1.0);
    return std::exp(log_p);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_loss(double k) {
    if (k < 0.0)
        return normal_loss(-k) - k;
    // phi(k) - k * (1 - Phi(k)); erfc keeps the tail accurate for large k.
    return normal_pdf(k) - k * 0.5 * std::erfc(k * kInvSqrt2);
}

double normal_loss2(double k) {
    const double tail = k >= 0.0 ? 0.5 * std::erfc(k * kInvSqrt2) : normal_cdf(-k);
    return (1.0 + k * k) * tail - k * normal_pdf(k);
}

// ---------------------------------------------------------------------------
// Poisson
// ---------------------------------------------------------------------------

PoissonDist::PoissonDist(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0))
        throw DomainError("PoissonDist: lambda must be > 0");
}

double PoissonDist::pmf(std::int64_t k) const {
    if (k < 0)
        return 0.0;
    return poisson_pmf(k, lambda_);
}

double PoissonDist::cdf(std::int64_t k) const {
    if (k < 0)
        return 0.0;
    // P(X <= k) = Q(k+1, lambda)
    return boost::math::gamma_q(static_cast<double>(k) + 1.0, lambda_);
}

std::int64_t PoissonDist::sample(Rng& rng) const {
    // Inversion by sequential search; fine for the moderate rates used here.
    double u = rng.uniform01();
    double p = std::exp(-lambda_);
    double c = p;
    std::int64_t k = 0;
    const std::int64_t cap =
        static_cast<std::int64_t>(lambda_ + 12.0 * std::sqrt(lambda_)) + 64;
    while (u > c && k < cap) {
        ++k;
        p *= lambda_ / static_cast<double>(k);
        c += p;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Logarithmic
// ---------------------------------------------------------------------------

LogarithmicDist::LogarithmicDist(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("LogarithmicDist: theta must lie in (0,1)");
    const double ln1m = std::log1p(-theta_);
    mean_ = -theta_ / ((1.0 - theta_) * ln1m);
    variance_ = -theta_ * (theta_ + ln1m) /
                ((1.0 - theta_) * (1.0 - theta_) * ln1m * ln1m);
}

double LogarithmicDist::pmf(std::int64_t k) const {
    if (k < 1)
        return 0.0;
    return logarithmic_pmf(k, theta_);
}

double LogarithmicDist::cdf(std::int64_t k) const {
    if (k < 1)
        return 0.0;
    double acc = 0.0;
    double term = theta_; // theta^x
    const double norm = -1.0 / std::log1p(-theta_);
    for (std::int64_t x = 1; x <= k; ++x) {
        acc += term / static_cast<double>(x);
        term *= theta_;
        if (term / static_cast<double>(x + 1) < kTailEps * 1e-3 && x > 8)
            break;
    }
    return std::min(1.0, norm * acc);
}

std::int64_t LogarithmicDist::sample(Rng& rng) const {
    double u = rng.uniform01();
    const double norm = -1.0 / std::log1p(-theta_);
    double term = norm * theta_;
    std::int64_t k = 1;
    double c = term;
    while (u > c && k < (std::int64_t{1} << 32)) {
        term *= theta_ * static_cast<double>(k) / static_cast<double>(k + 1);
        ++k;
        c += term;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Negative binomial
// ---------------------------------------------------------------------------

NegativeBinomialDist::NegativeBinomialDist(double n, double p) : n_(n), p_(p) {
    if (!(n > 0.0) || !(p > 0.0 && p < 1.0))
        throw DomainError("NegativeBinomialDist: need n > 0 and p in (0,1)");
}

double NegativeBinomialDist::pmf(std::int64_t k) const {
    if (k < 0)
        return 0.0;
    const double x = static_cast<double>(k);
    const double log_p = boost::math::lgamma(n_ + x) - boost::math::lgamma(n_) -
                         boost::math::lgamma(x + 1.0) + n_ * std::log(p_) +
                         x * std::log1p(-p_);
    return std::exp(log_p);
}

double NegativeBinomialDist::cdf(std::int64_t k) const {
    if (k < 0)
        return 0.0;
    // P(X <= k) = I_p(n, k+1)
    return boost::math::ibeta(n_, static_cast<double>(k) + 1.0, p_);
}

std::int64_t NegativeBinomialDist::support_upper() const {
    const boost::math::negative_binomial_distribution<double> d(n_, p_);
    const double q = boost::math::quantile(d, 1.0 - kTailEps);
    std::int64_t k = static_cast<std::int64_t>(std::ceil(q));
    while (cdf(k) < 1.0 - kTailEps)
        ++k;
    return k;
}

std::int64_t NegativeBinomialDist::sample(Rng& rng) const {
    // Inversion with the pmf recurrence f(x+1) = f(x) (n+x)(1-p)/(x+1).
    double u = rng.uniform01();
    double f = std::pow(p_, n_);
    if (f <= 0.0) {
        // Far-spread distribution; fall back to quantile transform.
        const boost::math::negative_binomial_distribution<double> d(n_, p_);
        return static_cast<std::int64_t>(boost::math::quantile(d, u));
    }
    double c = f;
    std::int64_t x = 0;
    const std::int64_t cap =
        static_cast<std::int64_t>(mean() + 14.0 * std::sqrt(variance())) + 64;
    while (u > c && x < cap) {
        f *= (n_ + static_cast<double>(x)) * (1.0 - p_) / (static_cast<double>(x) + 1.0);
        ++x;
        c += f;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Tabulated
// ---------------------------------------------------------------------------

TabulatedDist::TabulatedDist(std::vector<std::pair<std::int64_t, double>> points)
    : points_(std::move(points)) {
    if (points_.empty())
        throw DomainError("TabulatedDist: empty support");
    std::sort(points_.begin(), points_.end());
    // Merge duplicate values.
    std::size_t w = 0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].first == points_[w].first)
            points_[w].second += points_[i].second;
        else
            points_[++w] = points_[i];
    }
    points_.resize(w + 1);

    cumulative_.resize(points_.size());
    double acc = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].second < 0.0)
            throw DomainError("TabulatedDist: negative weight");
        acc += points_[i].second;
        cumulative_[i] = acc;
        const double v = static_cast<double>(points_[i].first);
        m1 += points_[i].second * v;
        m2 += points_[i].second * v * v;
    }
    if (std::abs(acc - 1.0) > 1e-9)
        throw DomainError("TabulatedDist: weights must sum to 1");
    mean_ = m1;
    variance_ = std::max(0.0, m2 - m1 * m1);
}

double TabulatedDist::pmf(std::int64_t k) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(),
                                     std::make_pair(k, -1.0));
    if (it == points_.end() || it->first != k)
        return 0.0;
    return it->second;
}

double TabulatedDist::cdf(std::int64_t k) const {
    // Index of the last support point <= k.
    const auto it = std::upper_bound(points_.begin(), points_.end(),
                                     std::make_pair(k, std::numeric_limits<double>::max()));
    if (it == points_.begin())
        return 0.0;
    return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

std::int64_t TabulatedDist::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), points_.size() - 1);
    return points_[i].first;
}

std::int64_t TabulatedDist::support_upper() const { return points_.back().first; }

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

GammaDist::GammaDist(double shape, double scale) : shape_(shape), scale_(scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw DomainError("GammaDist: shape and scale must be > 0");
}

double GammaDist::pdf(double x) const {
    if (x < 0.0)
        return 0.0;
    const boost::math::gamma_distribution<double> d(shape_, scale_);
    return boost::math::pdf(d, x);
}

double GammaDist::cdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    return boost::math::gamma_p(shape_, x / scale_);
}

double GammaDist::quantile(double u) const {
    const boost::math::gamma_distribution<double> d(shape_, scale_);
    return boost::math::quantile(d, u);
}

double GammaDist::partial_expectation(double z) const {
    if (z <= 0.0)
        return mean() - z;
    // shape*scale*(1 - F_{shape+1}(z)) - z*(1 - F_shape(z))
    const double t = z / scale_;
    const double v = mean() * boost::math::gamma_q(shape_ + 1.0, t) -
                     z * boost::math::gamma_q(shape_, t);
    return std::max(0.0, v);
}

double GammaDist::raw_moment(int r) const {
    double m = 1.0;
    for (int i = 0; i < r; ++i)
        m *= scale_ * (shape_ + static_cast<double>(i));
    return m;
}

// ---------------------------------------------------------------------------
// Mixed Erlang
// ---------------------------------------------------------------------------

MixedErlangDist::MixedErlangDist(int phases, double weight, double rate)
    : phases_(phases), weight_(weight), rate_(rate) {
    if (phases < 1 || !(rate > 0.0) || weight < 0.0 || weight > 1.0)
        throw DomainError("MixedErlangDist: invalid parameters");
}

namespace {

double erlang_cdf(int k, double rate, double x) {
    if (k == 0)
        return x >= 0.0 ? 1.0 : 0.0; // zero phases: point mass at origin
    if (x <= 0.0)
        return 0.0;
    return boost::math::gamma_p(static_cast<double>(k), rate * x);
}

double erlang_pdf(int k, double rate, double x) {
    if (k == 0 || x < 0.0)
        return 0.0;
    const boost::math::gamma_distribution<double> d(static_cast<double>(k), 1.0 / rate);
    return boost::math::pdf(d, x);
}

// E[(X - z)^+] for Erlang(k, rate), z >= 0.
double erlang_partial_expectation(int k, double rate, double z) {
    if (k == 0)
        return 0.0;
    const double m = static_cast<double>(k) / rate;
    const double v = m * boost::math::gamma_q(static_cast<double>(k) + 1.0, rate * z) -
                     z * boost::math::gamma_q(static_cast<double>(k), rate * z);
    return std::max(0.0, v);
}

} // namespace

double MixedErlangDist::pdf(double x) const {
    return weight_ * erlang_pdf(phases_ - 1, rate_, x) +
           (1.0 - weight_) * erlang_pdf(phases_, rate_, x);
}

double MixedErlangDist::cdf(double x) const {
    return weight_ * erlang_cdf(phases_ - 1, rate_, x) +
           (1.0 - weight_) * erlang_cdf(phases_, rate_, x);
}

double MixedErlangDist::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("MixedErlangDist::quantile: u must lie in (0,1)");
    if (phases_ == 1 && u <= weight_)
        return 0.0; // atom at the origin
    double lo = 0.0;
    double hi = (mean() + 1.0) * 2.0;
    while (cdf(hi) < u)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi))
            break;
    }
    return 0.5 * (lo + hi);
}

double MixedErlangDist::mean() const {
    return (static_cast<double>(phases_) - weight_) / rate_;
}

double MixedErlangDist::variance() const {
    const double k = static_cast<double>(phases_);
    // E[X^2] = p (k-1) k / nu^2 + (1-p) k (k+1) / nu^2
    const double m2 = (weight_ * (k - 1.0) * k + (1.0 - weight_) * k * (k + 1.0)) /
                      (rate_ * rate_);
    const double m = mean();
    return m2 - m * m;
}

double MixedErlangDist::partial_expectation(double z) const {
    if (z <= 0.0)
        return mean() - z;
    return weight_ * erlang_partial_expectation(phases_ - 1, rate_, z) +
           (1.0 - weight_) * erlang_partial_expectation(phases_, rate_, z);
}

// ---------------------------------------------------------------------------
// Lognormal
// ---------------------------------------------------------------------------

LognormalDist::LognormalDist(double location, double scale)
    : location_(location), scale_(scale) {
    if (!(scale > 0.0))
        throw DomainError("LognormalDist: scale must be > 0");
}

double LognormalDist::pdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    const boost::math::lognormal_distribution<double> d(location_, scale_);
    return boost::math::pdf(d, x);
}

double LognormalDist::cdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    return normal_cdf((std::log(x) - location_) / scale_);
}

double LognormalDist::quantile(double u) const {
    const boost::math::lognormal_distribution<double> d(location_, scale_);
    return boost::math::quantile(d, u);
}

double LognormalDist::mean() const {
    return std::exp(location_ + 0.5 * scale_ * scale_);
}

double LognormalDist::variance() const {
    const double m = mean();
    return (std::exp(scale_ * scale_) - 1.0) * m * m;
}

double LognormalDist::partial_expectation(double z) const {
    if (z <= 0.0)
        return mean() - z;
    const double d = (std::log(z) - location_) / scale_;
    return mean() * normal_cdf(scale_ - d) - z * (1.0 - normal_cdf(d));
}

// ---------------------------------------------------------------------------
// Degenerate
// ---------------------------------------------------------------------------

DegenerateDist::DegenerateDist(double v) : v_(v) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError("DegenerateDist: value must be finite and >= 0");
}

double DegenerateDist::pdf(double x) const {
    return x == v_ ? std::numeric_limits<double>::infinity() : 0.0;
}

} // namespace echelon
