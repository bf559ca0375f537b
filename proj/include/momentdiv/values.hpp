#pragma once

#include "momentdiv/canonical.hpp"

namespace momentdiv {

/// Pay x_upper - x_lower whenever the surplus reaches x_upper, dropping it to x_lower.
struct BarrierPolicy {
    double x_lower = 0.0;
    double x_upper = 0.0;

    /// Throws ConfigError unless x_upper > x_lower >= 0.
    void validate() const;
    friend bool operator==(const BarrierPolicy&, const BarrierPolicy&) = default;
};

/// Never pay a dividend; J and R vanish identically.
struct NoDividendPolicy {};

/// Expected discounted dividends. Linear with unit slope above x_upper.
double value_J(const CanonicalSolution& g, const BarrierPolicy& p, double x);
/// Expected discounted number of dividend payments.
double value_R(const CanonicalSolution& g, const BarrierPolicy& p, double x);
/// Dividends net of a fixed cost c per payment: J - c R.
double value_H(const CanonicalSolution& g, double c, const BarrierPolicy& p, double x);
/// Value of the classical (unconstrained) problem, reflecting at x*.
double value_U(const CanonicalSolution& g, double x);

inline double value_J(const CanonicalSolution&, const NoDividendPolicy&, double) { return 0.0; }
inline double value_R(const CanonicalSolution&, const NoDividendPolicy&, double) { return 0.0; }

/// J with its first two derivatives; at x_upper the left-hand derivatives are returned.
GValues value_J_derivatives(const CanonicalSolution& g, const BarrierPolicy& p, double x);
GValues value_R_derivatives(const CanonicalSolution& g, const BarrierPolicy& p, double x);

/// The below-barrier formulas g(x) * const continued to every x. Finite
/// differences of these centred at x_upper give one-sided derivatives at the barrier.
double value_J_interior(const CanonicalSolution& g, const BarrierPolicy& p, double x);
double value_R_interior(const CanonicalSolution& g, const BarrierPolicy& p, double x);
double value_H_interior(const CanonicalSolution& g, double c, const BarrierPolicy& p, double x);

}  // namespace momentdiv
