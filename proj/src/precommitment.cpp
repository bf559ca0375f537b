#include "momentdiv/precommitment.hpp"

#include <cmath>

#include "momentdiv/parallel.hpp"

namespace momentdiv {

namespace {

constexpr double kCostStart = 1e-6;
constexpr double kCostFloor = 1e-14;
constexpr double kCostCeiling = 1e12;
constexpr int kMaxIterations = 400;

}  // namespace

PrecommitmentSolution solve_precommitment(const CanonicalSolution& g, double x0, double k) {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw ConfigError("precommitment needs x0 > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("precommitment needs k > 0");

    PrecommitmentSolution out;
    out.x0 = x0;
    out.k = k;
    const double target = 1.0 / k;
    const double tol = kTolConstraint * std::max(1.0, target);

    // R(x0) along the fixed-cost solutions; decreasing in c.
    auto excess = [&](double c) {
        ++out.iterations;
        FixedCostSolution s = solve_fixed_cost(g, c);
        return std::make_pair(value_R(g, s.policy, x0) - target, s);
    };

    double lo = kCostStart, hi = 1.0;
    auto [e_hi, s_hi] = excess(hi);
    while (e_hi > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kCostCeiling) throw NumericError("no cost bracket found for the moment constraint");
        std::tie(e_hi, s_hi) = excess(hi);
    }
    auto [e_lo, s_lo] = excess(lo);
    while (e_lo < 0.0 && lo > kCostFloor) {
        hi = lo;
        e_hi = e_lo;
        s_hi = s_lo;
        lo *= 0.1;
        std::tie(e_lo, s_lo) = excess(lo);
    }
    if (e_lo < 0.0) {
        // Even the cheapest cost pays too often: nothing binds, pay nothing.
        out.slack = true;
        out.constraint_residual = target;
        return out;
    }

    FixedCostSolution best = std::abs(e_lo) < std::abs(e_hi) ? s_lo : s_hi;
    double best_err = std::min(std::abs(e_lo), std::abs(e_hi));
    while (best_err > tol && out.iterations < kMaxIterations) {
        // Geometric midpoint while the bracket spans decades.
        const double mid = hi > 2.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const auto [e, s] = excess(mid);
        if (std::abs(e) < best_err) {
            best_err = std::abs(e);
            best = s;
        }
        (e > 0.0 ? lo : hi) = mid;
    }

    out.c_star = best.c;
    out.policy = best.policy;
    out.kind = best.kind;
    out.V = value_J(g, best.policy, x0);
    out.constraint_residual = best_err;
    return out;
}

namespace {

PrecommitmentRow solve_row(const CanonicalSolution& g, double x0, double k) {
    PrecommitmentRow row{x0, k, std::nullopt, {}};
    try {
        row.solution = solve_precommitment(g, x0, k);
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<PrecommitmentRow> precommitment_sweep_k(const CanonicalSolution& g, double x0,
                                                    const std::vector<double>& ks) {
    if (ks.empty()) throw ConfigError("precommitment sweep needs at least one k");
    std::vector<PrecommitmentRow> rows(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) { rows[i] = solve_row(g, x0, ks[i]); });
    return rows;
}

std::vector<PrecommitmentRow> precommitment_sweep_x0(const CanonicalSolution& g, const std::vector<double>& x0s,
                                                     double k) {
    if (x0s.empty()) throw ConfigError("precommitment sweep needs at least one x0");
    std::vector<PrecommitmentRow> rows(x0s.size());
    parallel_for(x0s.size(), [&](std::size_t i) { rows[i] = solve_row(g, x0s[i], k); });
    return rows;
}

double precommitment_ruin_k(const CanonicalSolution& g, double x0) {
    if (!(x0 > 0.0)) throw ConfigError("precommitment needs x0 > 0");
    // x_lower_c reaches 0 exactly at the ruin cost threshold and R(x0) decreases in c.
    const FixedCostSolution s = solve_fixed_cost(g, ruin_cost_threshold(g));
    return 1.0 / value_R(g, s.policy, x0);
}

}  // namespace momentdiv
