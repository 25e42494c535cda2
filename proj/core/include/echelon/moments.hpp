#pragma once

#include <cmath>
#include <string>

#include "echelon/errors.hpp"

namespace echelon {

/// Mean/variance pair. Used for demand per day, lead times, wait times and
/// lead-time demand throughout the library.
struct MomentPair {
    double mean = 0.0;
    double variance = 0.0;

    double sd() const { return std::sqrt(variance); }

    /// Second raw moment E[X^2].
    double raw2() const { return variance + mean * mean; }

    /// Squared coefficient of variation; mean must be nonzero.
    double scv() const { return variance / (mean * mean); }

    /// Moments of the sum of two independent quantities.
    MomentPair operator+(const MomentPair& other) const {
        return {mean + other.mean, variance + other.variance};
    }

    MomentPair scaled(double factor) const {
        return {mean * factor, variance * factor * factor};
    }

    bool valid() const { return std::isfinite(mean) && variance >= 0.0; }
};

inline void require_valid(const MomentPair& m, const std::string& what) {
    if (!m.valid())
        throw DomainError(what + ": invalid moments (mean=" + std::to_string(m.mean) +
                          ", variance=" + std::to_string(m.variance) + ")");
}

} // namespace echelon
