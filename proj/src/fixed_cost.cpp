#include "momentdiv/fixed_cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momentdiv/roots.hpp"

namespace momentdiv {

namespace {

constexpr double kTolBarrier = 1e-13;

// Smallest hi > lo with pred(hi), stepping by a doubling increment.
template <class Pred>
std::pair<double, double> expand_right(const CanonicalSolution& g, double lo, double step, Pred pred) {
    double hi = lo + step;
    const double limit = g.domain_limit();
    while (!pred(hi)) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if (hi > limit) throw NumericError("no bracket found below x = " + std::to_string(limit));
    }
    return {lo, hi};
}

// phi(x_lower) = g(x_upper) - g(x_lower) - g'(x_lower)(x_upper - x_lower - c) with
// x_upper paired to x_lower; increasing in x_lower, positive at x*.
double phi(const CanonicalSolution& g, double c, double xl) {
    const double xu = paired_barrier(g, xl);
    const double dg = g.d1(xl);
    return (g.diff(xl, xu) - dg * (xu - xl - c)) / dg;
}

}  // namespace

const char* to_string(FixedCostCase c) noexcept { return c == FixedCostCase::interior ? "interior" : "ruin"; }

double paired_barrier(const CanonicalSolution& g, double x_lower) {
    const double xs = g.inflection();
    const double target = g.d1(x_lower);
    if (x_lower >= xs || target <= g.d1(xs)) return xs;
    auto f = [&](double x) { return g.d1(x) - target; };
    const auto [lo, hi] = expand_right(g, xs, std::max(0.25 * xs, 0.05), [&](double x) { return f(x) >= 0.0; });
    return roots::toms748(f, lo, hi, kTolBarrier);
}

FixedCostCase fixed_cost_case(const CanonicalSolution& g, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("fixed cost c must be positive and finite");
    return phi(g, c, 0.0) < 0.0 ? FixedCostCase::interior : FixedCostCase::ruin;
}

FixedCostSolution solve_fixed_cost(const CanonicalSolution& g, double c) {
    FixedCostSolution sol{c, {}, fixed_cost_case(g, c), 0.0, g};
    const double xs = g.inflection();

    if (sol.kind == FixedCostCase::interior) {
        const double xl = roots::toms748([&](double x) { return phi(g, c, x); }, 0.0, xs, kTolBarrier);
        if (xl > 0.0) {
            sol.policy = {xl, paired_barrier(g, xl)};
        } else {
            sol.kind = FixedCostCase::ruin;  // the root sits on the case boundary
        }
    }
    if (sol.kind == FixedCostCase::ruin) {
        auto psi = [&](double x) { return x - c - g(x) / g.d1(x); };
        const double start = std::max(xs, c);
        const auto [lo, hi] = expand_right(g, start, std::max(0.25 * start, 0.05), [&](double x) { return psi(x) >= 0.0; });
        sol.policy = {0.0, roots::toms748(psi, lo, hi, kTolBarrier)};
    }

    // Smooth-fit defects H'(x_upper-) - 1 and, in the interior case, H'(x_lower) - 1.
    const double slope = (sol.policy.x_upper - sol.policy.x_lower - c) / g.diff(sol.policy.x_lower, sol.policy.x_upper);
    sol.residual = std::abs(g.d1(sol.policy.x_upper) * slope - 1.0);
    if (sol.kind == FixedCostCase::interior) {
        sol.residual = std::max(sol.residual, std::abs(g.d1(sol.policy.x_lower) * slope - 1.0));
    }
    return sol;
}

double ruin_cost_threshold(const CanonicalSolution& g) {
    double lo = 1.0, hi = 1.0;
    while (fixed_cost_case(g, lo) == FixedCostCase::ruin) {
        lo *= 0.5;
        if (lo < 1e-12) throw NumericError("no interior fixed-cost solution found for small costs");
    }
    while (fixed_cost_case(g, hi) == FixedCostCase::interior) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericError("no ruin-case fixed-cost solution found for large costs");
    }
    // Bisection on the case indicator.
    while (hi - lo > 1e-3 * kTolRoot * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (fixed_cost_case(g, mid) == FixedCostCase::interior ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace momentdiv
