#pragma once

#include <cmath>

#include "momentdiv/canonical.hpp"
#include "momentdiv/figures.hpp"

namespace oracle {

// Example model parameters, restated here so the oracles do not read them from the library.
inline constexpr double kMu = 0.06;
inline constexpr double kSigma2 = 0.03;
inline constexpr double kR = 0.02;

inline double alpha(double sign, double mu = kMu, double s2 = kSigma2, double r = kR) {
    return -mu / s2 + sign * std::sqrt(mu * mu / (s2 * s2) + 2.0 * r / s2);
}
inline const double a1 = alpha(+1.0);
inline const double a2 = alpha(-1.0);

// Closed form with g'(0) = 1.
inline double g(double x) { return (std::exp(a1 * x) - std::exp(a2 * x)) / (a1 - a2); }
inline double dg(double x) { return (a1 * std::exp(a1 * x) - a2 * std::exp(a2 * x)) / (a1 - a2); }
inline double d2g(double x) { return (a1 * a1 * std::exp(a1 * x) - a2 * a2 * std::exp(a2 * x)) / (a1 - a2); }
inline const double x_star = std::log(a2 * a2 / (a1 * a1)) / (a1 - a2);

inline double J(double xl, double xu, double x) {
    if (x > xu) return x - xl + J(xl, xu, xl);
    return g(x) * (xu - xl) / (g(xu) - g(xl));
}
inline double R(double xl, double xu, double x) {
    if (x > xu) return 1.0 + R(xl, xu, xl);
    return g(x) / (g(xu) - g(xl));
}
inline double U(double x) { return x <= x_star ? g(x) / dg(x_star) : x - x_star + g(x_star) / dg(x_star); }

}  // namespace oracle

inline const momentdiv::CanonicalSolution& example_g() {
    static const momentdiv::CanonicalSolution g = momentdiv::solve_canonical(momentdiv::example_model());
    return g;
}
