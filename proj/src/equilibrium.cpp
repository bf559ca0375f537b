#include "momentdiv/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "momentdiv/roots.hpp"

namespace momentdiv {

namespace {

constexpr double kTolBarrier = 1e-13;

// Bracket [lo, hi] with f(lo) < 0 <= f(hi), stepping right from lo.
template <class F>
std::pair<double, double> expand_right(const CanonicalSolution& g, double lo, F&& f) {
    double step = std::max(0.25 * lo, 0.05);
    double hi = lo + step;
    while (f(hi) < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if (hi > g.domain_limit()) throw NumericError("no equilibrium bracket below x = " + std::to_string(g.domain_limit()));
    }
    return {lo, hi};
}

const char* const kNote =
    "The equilibrium condition on local deviations is certified through a sufficient condition only: "
    "(A - r)J <= 0 away from the barrier together with smooth fit J'(x_upper-) = 1. The liminf form "
    "over small stopping times and the strong-equilibrium property are not checked directly, because "
    "the stopping times in that definition are not constructed explicitly.";

}  // namespace

EquilibriumSolution solve_equilibrium(const CanonicalSolution& g, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("equilibrium needs k > 0");
    EquilibriumSolution sol;
    sol.k = k;
    if (k > 1.0) return sol;

    const double xs = g.inflection();
    // x_lower(x) = x - k g/g' is increasing right of x*.
    auto lower = [&](double x) { return x - k * g(x) / g.d1(x); };

    double xu;
    if (k == 1.0) {
        const auto [lo, hi] = expand_right(g, xs, lower);
        xu = roots::bracketed(lower, lo, hi, kTolBarrier);
    } else {
        // F(x)/g'(x) with F = h g'(x) - (g(x) - g(x - h)), h = k g(x)/g'(x); negative at x*.
        auto F = [&](double x) {
            const double h = k * g(x) / g.d1(x);
            if (h > x) return -std::numeric_limits<double>::min() - (h - x);  // x_lower < 0: left of the root
            return g.backward_remainder(x, h) / g.d1(x);
        };
        double start = xs;
        if (lower(xs) < 0.0) {
            const auto [lo, hi] = expand_right(g, xs, lower);
            start = roots::bracketed(lower, lo, hi, kTolBarrier);
            // Step just inside x_lower >= 0.
            while (lower(start) < 0.0) start = std::nextafter(start, std::numeric_limits<double>::infinity());
        }
        const auto [lo, hi] = expand_right(g, start, F);
        xu = roots::bracketed(F, lo, hi, kTolBarrier);
    }
    const double xl = k == 1.0 ? 0.0 : std::max(lower(xu), 0.0);
    sol.policy = BarrierPolicy{xl, xu};

    const double gu = g(xu);
    const double span = g.diff(xl, xu);
    sol.residual_46 = std::abs(span - k * gu) / gu;
    sol.residual_42 = std::abs(gu / span - 1.0 / k);
    sol.smoothfit_residual = std::abs(g.d1(xu) * (xu - xl) / span - 1.0);
    return sol;
}

double equilibrium_value(const CanonicalSolution& g, const EquilibriumSolution& sol, double x) {
    if (!(x >= 0.0)) throw ConfigError("state x must be >= 0");
    if (!sol.policy) return 0.0;
    const BarrierPolicy& p = *sol.policy;
    const double slope = g.d1(p.x_upper);
    if (x <= p.x_upper) return g(x) / slope;
    return x - p.x_lower + g(p.x_lower) / slope;
}

std::vector<double> uniform_grid(double x_max, std::size_t n) {
    if (n < 2 || !(x_max > 0.0)) throw ConfigError("uniform_grid needs n >= 2 and x_max > 0");
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x_max * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

EquilibriumCertificate verify_equilibrium(const CanonicalSolution& g, double k,
                                          const std::optional<BarrierPolicy>& policy,
                                          const std::vector<double>& x_grid, double tol) {
    if (!(k > 0.0)) throw ConfigError("certificate needs k > 0");
    if (x_grid.empty()) throw ConfigError("certificate needs a nonempty grid");
    EquilibriumCertificate cert;
    cert.k = k;
    cert.policy = policy;
    cert.tolerance = tol;
    cert.grid_points = x_grid.size();
    cert.note = kNote;

    std::vector<double> xs = x_grid;
    std::sort(xs.begin(), xs.end());
    if (xs.front() < 0.0) throw ConfigError("certificate grid must be nonnegative");

    auto record = [](EquilibriumCertificate::Check& c, double violation, double x, double y, std::string detail) {
        if (violation > c.worst || c.detail.empty()) {
            c.worst = violation;
            c.witness_x = x;
            c.witness_y = y;
            c.detail = std::move(detail);
        }
    };

    if (!policy) {
        // J = R = 0: the constraint holds, the generator term vanishes and no
        // deviation satisfies R(y) <= 1/k - 1 < 0 when k > 1.
        cert.eq1.detail = "no dividends: R = 0";
        cert.eq2.detail = "no dividends: J = 0";
        cert.eq3.detail = k > 1.0 ? "no feasible deviation" : "no dividends";
        if (k <= 1.0) {
            // Paying x - y now is feasible at y = 0 and strictly better.
            for (double x : xs) {
                if (x > tol) {
                    cert.eq3.passed = false;
                    record(cert.eq3, x, x, 0.0, "immediate dividend beats paying nothing");
                }
            }
        }
        return cert;
    }

    const BarrierPolicy& p = *policy;
    p.validate();
    const DiffusionModel& m = g.model();

    // (EqI) the constraint holds everywhere.
    for (double x : xs) {
        const double v = value_R(g, p, x) - 1.0 / k;
        record(cert.eq1, v, x, 0.0, "R(x) - 1/k");
        if (v > tol) cert.eq1.passed = false;
    }

    // (EqII') generator inequality off the barrier plus smooth fit at it.
    const SmoothFunction J = [&](double x) { return value_J_derivatives(g, p, x); };
    for (double x : xs) {
        if (x == p.x_upper) continue;
        const double v = generator_apply(J, m, x) - m.r * value_J(g, p, x);
        record(cert.eq2, v, x, 0.0, "(A - r)J(x)");
        if (v > tol) cert.eq2.passed = false;
    }
    const double fit = std::abs(value_J_derivatives(g, p, p.x_upper).dg - 1.0);
    if (fit > tol) {
        cert.eq2.passed = false;
        cert.eq2.worst = std::max(cert.eq2.worst, fit);
        cert.eq2.witness_x = p.x_upper;
        cert.eq2.witness_y = 0.0;
        cert.eq2.detail = "|J'(x_upper-) - 1|";
    }

    // (EqIII) no profitable immediate dividend x - y to a feasible level y <= x,
    // i.e. K(x) = J(x) - x dominates K(y) for R(y) <= 1/k - 1. Deviation levels
    // are the grid points plus x_lower itself.
    std::vector<double> ys = xs;
    ys.push_back(p.x_lower);
    std::sort(ys.begin(), ys.end());
    const double bound = 1.0 / k - 1.0 + tol;
    double best_k = -std::numeric_limits<double>::infinity();
    double best_y = 0.0;
    std::size_t iy = 0;
    for (double x : xs) {
        for (; iy < ys.size() && ys[iy] <= x; ++iy) {
            const double y = ys[iy];
            if (value_R(g, p, y) > bound) continue;
            const double ky = value_J(g, p, y) - y;
            if (ky > best_k) {
                best_k = ky;
                best_y = y;
            }
        }
        if (best_k == -std::numeric_limits<double>::infinity()) continue;
        const double v = best_k - (value_J(g, p, x) - x);
        record(cert.eq3, v, x, best_y, "J(y) + x - y - J(x)");
        if (v > tol) cert.eq3.passed = false;
    }
    return cert;
}

std::string EquilibriumCertificate::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    if (policy) {
        j["policy"] = {{"x_lower", policy->x_lower}, {"x_upper", policy->x_upper}};
    } else {
        j["policy"] = "no-dividend";
    }
    j["tolerance"] = tolerance;
    j["grid_points"] = grid_points;
    auto check = [](const Check& c) {
        return nlohmann::ordered_json{{"passed", c.passed}, {"worst", c.worst}, {"witness_x", c.witness_x},
                                      {"witness_y", c.witness_y}, {"detail", c.detail}};
    };
    j["EqI"] = check(eq1);
    j["EqII_prime"] = check(eq2);
    j["EqIII"] = check(eq3);
    j["passed"] = passed();
    j["note"] = note;
    return j.dump(2);
}

}  // namespace momentdiv
