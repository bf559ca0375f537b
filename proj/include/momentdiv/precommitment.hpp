#pragma once

#include <optional>
#include <string>
#include <vector>

#include "momentdiv/fixed_cost.hpp"

namespace momentdiv {

inline constexpr double kTolConstraint = 1e-8;

/// Optimal policy for a fixed initial surplus x0 subject to R(x0) <= 1/k.
struct PrecommitmentSolution {
    double x0 = 0.0;
    double k = 0.0;
    double c_star = 0.0;  // Lagrange multiplier: the fixed cost whose solution binds the constraint
    /// Empty when no binding barrier policy exists and no dividends are paid.
    std::optional<BarrierPolicy> policy;
    FixedCostCase kind = FixedCostCase::interior;
    bool slack = false;   // constraint not binding (no-dividend fallback)
    double V = 0.0;
    double constraint_residual = 0.0;  // |R(x0; policy) - 1/k|
    int iterations = 0;
};

/// Bisection on the fixed cost c until R(x0; x_lower_c, x_upper_c) = 1/k
/// within kTolConstraint * max(1, 1/k).
PrecommitmentSolution solve_precommitment(const CanonicalSolution& g, double x0, double k);

struct PrecommitmentRow {
    double x0 = 0.0;
    double k = 0.0;
    std::optional<PrecommitmentSolution> solution;
    std::string error;  // set when solution is empty
};

/// One row per k at fixed x0. Rows fail independently.
std::vector<PrecommitmentRow> precommitment_sweep_k(const CanonicalSolution& g, double x0,
                                                    const std::vector<double>& ks);
/// One row per x0 at fixed k. Rows fail independently.
std::vector<PrecommitmentRow> precommitment_sweep_x0(const CanonicalSolution& g, const std::vector<double>& x0s,
                                                     double k);

/// The k at and above which the precommitment lower barrier is 0 for this x0.
double precommitment_ruin_k(const CanonicalSolution& g, double x0);

}  // namespace momentdiv
