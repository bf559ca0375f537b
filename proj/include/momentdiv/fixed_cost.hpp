#pragma once

#include "momentdiv/values.hpp"

namespace momentdiv {

enum class FixedCostCase { interior, ruin };

const char* to_string(FixedCostCase c) noexcept;

/// Optimal barrier policy when every dividend payment costs c.
struct FixedCostSolution {
    double c = 0.0;
    BarrierPolicy policy;
    FixedCostCase kind = FixedCostCase::interior;
    /// Largest smooth-fit defect |H'(x) - 1| over the barriers that define the case.
    double residual = 0.0;
    CanonicalSolution g;

    /// H(x; c, policy).
    double value_at(double x) const { return value_H(g, c, policy, x); }
};

/// Smooth-fit solution: interior case when 0 < x_lower < x* < x_upper
/// satisfies g'(x_lower) = g'(x_upper) = (g(x_upper) - g(x_lower)) / (x_upper - x_lower - c),
/// otherwise the ruin case x_lower = 0 with g'(x_upper) (x_upper - c) = g(x_upper).
FixedCostSolution solve_fixed_cost(const CanonicalSolution& g, double c);

/// Which branch solve_fixed_cost takes for cost c.
FixedCostCase fixed_cost_case(const CanonicalSolution& g, double c);

/// The cost above which the optimal policy lets the surplus drop to 0.
double ruin_cost_threshold(const CanonicalSolution& g);

/// The x_upper > x* with g'(x_upper) = g'(x_lower), for x_lower in [0, x*];
/// x* itself when x_lower is at or right of x*.
double paired_barrier(const CanonicalSolution& g, double x_lower);

}  // namespace momentdiv
