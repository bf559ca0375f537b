#pragma once

#include <optional>
#include <string>
#include <vector>

#include "momentdiv/values.hpp"

namespace momentdiv {

/// Time-consistent barrier policy for the moment constraint R <= 1/k.
struct EquilibriumSolution {
    double k = 0.0;
    /// Empty for k > 1, where paying nothing is the only admissible strategy.
    std::optional<BarrierPolicy> policy;
    /// |g(x_lower) - (1 - k) g(x_upper)| / g(x_upper)
    double residual_46 = 0.0;
    /// |R(x_upper) - 1/k|
    double residual_42 = 0.0;
    /// |J'(x_upper-) - 1|
    double smoothfit_residual = 0.0;
};

/// Finds x_upper > x* with g(x_upper - k g/g') = (1 - k) g(x_upper) and sets
/// x_lower = x_upper - k g(x_upper)/g'(x_upper). For k = 1, x_lower is 0.
EquilibriumSolution solve_equilibrium(const CanonicalSolution& g, double k);

/// g(x)/g'(x_upper) below the barrier, unit slope above; 0 for no dividends.
double equilibrium_value(const CanonicalSolution& g, const EquilibriumSolution& sol, double x);

struct EquilibriumCertificate {
    struct Check {
        bool passed = true;
        double worst = 0.0;     // largest violation found (<= 0 when passed with margin)
        double witness_x = 0.0;
        double witness_y = 0.0;  // deviation target for the no-profitable-deviation check
        std::string detail;
    };

    double k = 0.0;
    std::optional<BarrierPolicy> policy;
    double tolerance = 0.0;
    std::size_t grid_points = 0;
    Check eq1;   // R(x) <= 1/k + tol on the grid
    Check eq2;   // (A - r)J <= tol off the barrier and |J'(x_upper-) - 1| <= tol
    Check eq3;   // J(x) >= J(y) + x - y - tol for feasible deviations y <= x
    std::string note;

    bool passed() const noexcept { return eq1.passed && eq2.passed && eq3.passed; }
    std::string to_json() const;
};

inline constexpr double kTolCertificate = 1e-8;

/// Checks the equilibrium conditions for `policy` (or no dividends) on x_grid.
EquilibriumCertificate verify_equilibrium(const CanonicalSolution& g, double k,
                                          const std::optional<BarrierPolicy>& policy,
                                          const std::vector<double>& x_grid, double tol = kTolCertificate);

inline EquilibriumCertificate verify_equilibrium(const CanonicalSolution& g, const EquilibriumSolution& sol,
                                                 const std::vector<double>& x_grid,
                                                 double tol = kTolCertificate) {
    return verify_equilibrium(g, sol.k, sol.policy, x_grid, tol);
}

/// n uniform points on [0, x_max].
std::vector<double> uniform_grid(double x_max, std::size_t n);

}  // namespace momentdiv
