#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "echelon/moments.hpp"
#include "echelon/rng.hpp"

namespace echelon {

/// Support truncation: pmf/cdf sums stop at the 1 - kTailEps quantile.
/// The truncation point is exposed via support_upper() so results can be
/// audited.
inline constexpr double kTailEps = 1e-12;

// ---------------------------------------------------------------------------
// Interfaces
// ---------------------------------------------------------------------------

/// Distribution on the non-negative integers.
class DiscreteDistribution {
public:
    virtual ~DiscreteDistribution() = default;

    virtual double pmf(std::int64_t k) const = 0;
    virtual double cdf(std::int64_t k) const = 0;
    virtual double mean() const = 0;
    virtual double variance() const = 0;
    virtual std::int64_t sample(Rng& rng) const = 0;

    /// Smallest k with cdf(k) >= 1 - kTailEps.
    virtual std::int64_t support_upper() const;

    /// E[(X - z)^+] for real z. Evaluated as
    ///   E[X] - sum_{x<=z} x f(x) - z (1 - F(floor(z)))
    /// which also handles negative z (where it equals E[X] - z).
    double partial_expectation(double z) const;
};

/// Distribution on the non-negative reals.
class ContinuousDistribution {
public:
    virtual ~ContinuousDistribution() = default;

    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double quantile(double u) const = 0;
    virtual double mean() const = 0;
    virtual double variance() const = 0;

    /// E[(X - z)^+].
    virtual double partial_expectation(double z) const = 0;

    virtual double sample(Rng& rng) const { return quantile(rng.uniform01()); }
};

using DiscretePtr = std::shared_ptr<const DiscreteDistribution>;
using ContinuousPtr = std::shared_ptr<const ContinuousDistribution>;

// ---------------------------------------------------------------------------
// Scalar functions
// ---------------------------------------------------------------------------

/// Logarithmic pmf -theta^k / (k ln(1-theta)), k >= 1, theta in (0,1).
double logarithmic_pmf(std::int64_t k, double theta);

/// Poisson pmf e^-lambda lambda^x / x!, lambda > 0.
double poisson_pmf(std::int64_t x, double lambda);

double normal_pdf(double x);
double normal_cdf(double x);

/// Normal loss function G(k) = phi(k) - k (1 - Phi(k)).
double normal_loss(double k);

/// Second-order normal loss E[((Z - k)^+)^2] = (1 + k^2)(1 - Phi(k)) - k phi(k).
double normal_loss2(double k);

// ---------------------------------------------------------------------------
// Discrete families
// ---------------------------------------------------------------------------

class PoissonDist final : public DiscreteDistribution {
public:
    explicit PoissonDist(double lambda);

    double pmf(std::int64_t k) const override;
    double cdf(std::int64_t k) const override;
    double mean() const override { return lambda_; }
    double variance() const override { return lambda_; }
    std::int64_t sample(Rng& rng) const override;

    double lambda() const { return lambda_; }

private:
    double lambda_;
};

/// Logarithmic order-size distribution, support {1, 2, ...}.
class LogarithmicDist final : public DiscreteDistribution {
public:
    explicit LogarithmicDist(double theta);

    double pmf(std::int64_t k) const override;
    double cdf(std::int64_t k) const override;
    double mean() const override { return mean_; }
    double variance() const override { return variance_; }
    std::int64_t sample(Rng& rng) const override;

    double theta() const { return theta_; }

private:
    double theta_;
    double mean_;
    double variance_;
};

/// Negative binomial with pmf Gamma(n+x)/(Gamma(n) x!) p^n (1-p)^x.
class NegativeBinomialDist final : public DiscreteDistribution {
public:
    NegativeBinomialDist(double n, double p);

    double pmf(std::int64_t k) const override;
    double cdf(std::int64_t k) const override;
    double mean() const override { return n_ * (1.0 - p_) / p_; }
    double variance() const override { return n_ * (1.0 - p_) / (p_ * p_); }
    std::int64_t sample(Rng& rng) const override;
    std::int64_t support_upper() const override;

    double size() const { return n_; }
    double prob() const { return p_; }

private:
    double n_;
    double p_;
};

class PointMassDist final : public DiscreteDistribution {
public:
    explicit PointMassDist(std::int64_t v) : v_(v) {}

    double pmf(std::int64_t k) const override { return k == v_ ? 1.0 : 0.0; }
    double cdf(std::int64_t k) const override { return k >= v_ ? 1.0 : 0.0; }
    double mean() const override { return static_cast<double>(v_); }
    double variance() const override { return 0.0; }
    std::int64_t sample(Rng&) const override { return v_; }
    std::int64_t support_upper() const override { return v_; }

private:
    std::int64_t v_;
};

/// Explicit pmf over a sparse set of integer support points; weights must
/// be normalized by the producer. Used for order-size mixes at the central
/// warehouse.
class TabulatedDist final : public DiscreteDistribution {
public:
    /// points: (value, weight) pairs; values need not be sorted or unique
    /// (duplicate values merge their weights).
    explicit TabulatedDist(std::vector<std::pair<std::int64_t, double>> points);

    double pmf(std::int64_t k) const override;
    double cdf(std::int64_t k) const override;
    double mean() const override { return mean_; }
    double variance() const override { return variance_; }
    std::int64_t sample(Rng& rng) const override;
    std::int64_t support_upper() const override;

    const std::vector<std::pair<std::int64_t, double>>& points() const { return points_; }

private:
    std::vector<std::pair<std::int64_t, double>> points_; // sorted by value
    std::vector<double> cumulative_;
    double mean_;
    double variance_;
};

// ---------------------------------------------------------------------------
// Continuous families
// ---------------------------------------------------------------------------

class GammaDist final : public ContinuousDistribution {
public:
    GammaDist(double shape, double scale);

    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double u) const override;
    double mean() const override { return shape_ * scale_; }
    double variance() const override { return shape_ * scale_ * scale_; }
    double partial_expectation(double z) const override;

    double shape() const { return shape_; }
    double scale() const { return scale_; }

    /// Raw moment E[X^r] = scale^r * shape (shape+1) ... (shape+r-1).
    double raw_moment(int r) const;

private:
    double shape_;
    double scale_;
};

/// Two-moment mixed Erlang E_{k-1,k}: Erlang(k-1, rate) with probability p,
/// Erlang(k, rate) with probability 1-p. k = 1 covers scv >= 1 with an atom
/// at zero.
class MixedErlangDist final : public ContinuousDistribution {
public:
    MixedErlangDist(int phases, double weight, double rate);

    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double u) const override;
    double mean() const override;
    double variance() const override;
    double partial_expectation(double z) const override;

    int phases() const { return phases_; }
    double weight() const { return weight_; }
    double rate() const { return rate_; }

private:
    int phases_;    // k
    double weight_; // p, probability of the (k-1)-phase branch
    double rate_;   // nu
};

class LognormalDist final : public ContinuousDistribution {
public:
    LognormalDist(double location, double scale);

    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double u) const override;
    double mean() const override;
    double variance() const override;
    double partial_expectation(double z) const override;

private:
    double location_; // mu of ln X
    double scale_;    // sigma of ln X
};

/// Point mass at a positive constant; degenerate lead time.
class DegenerateDist final : public ContinuousDistribution {
public:
    explicit DegenerateDist(double v);

    double pdf(double x) const override;
    double cdf(double x) const override { return x >= v_ ? 1.0 : 0.0; }
    double quantile(double) const override { return v_; }
    double mean() const override { return v_; }
    double variance() const override { return 0.0; }
    double partial_expectation(double z) const override { return v_ > z ? v_ - z : 0.0; }

private:
    double v_;
};

} // namespace echelon
