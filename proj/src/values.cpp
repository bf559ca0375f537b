#include "momentdiv/values.hpp"

#include <cmath>
#include <string>

namespace momentdiv {

void BarrierPolicy::validate() const {
    if (!(x_lower >= 0.0) || !(x_upper > x_lower) || !std::isfinite(x_upper)) {
        throw ConfigError("barrier policy needs x_upper > x_lower >= 0, got (" + std::to_string(x_lower) + ", " +
                          std::to_string(x_upper) + ")");
    }
}

namespace {

void check_x(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("state x must be finite and >= 0");
}

// g(x_upper) - g(x_lower)
double span(const CanonicalSolution& g, const BarrierPolicy& p) {
    p.validate();
    return g.diff(p.x_lower, p.x_upper);
}

}  // namespace

double value_J_interior(const CanonicalSolution& g, const BarrierPolicy& p, double x) {
    return g(x) * (p.x_upper - p.x_lower) / span(g, p);
}

double value_R_interior(const CanonicalSolution& g, const BarrierPolicy& p, double x) { return g(x) / span(g, p); }

double value_H_interior(const CanonicalSolution& g, double c, const BarrierPolicy& p, double x) {
    return value_J_interior(g, p, x) - c * value_R_interior(g, p, x);
}

double value_J(const CanonicalSolution& g, const BarrierPolicy& p, double x) {
    check_x(x);
    if (x <= p.x_upper) return value_J_interior(g, p, x);
    return x - p.x_lower + value_J_interior(g, p, p.x_lower);
}

double value_R(const CanonicalSolution& g, const BarrierPolicy& p, double x) {
    check_x(x);
    if (x <= p.x_upper) return value_R_interior(g, p, x);
    return 1.0 + value_R_interior(g, p, p.x_lower);
}

double value_H(const CanonicalSolution& g, double c, const BarrierPolicy& p, double x) {
    if (!(c > 0.0)) throw ConfigError("fixed cost c must be positive");
    return value_J(g, p, x) - c * value_R(g, p, x);
}

double value_U(const CanonicalSolution& g, double x) {
    check_x(x);
    const double xs = g.inflection();
    const double slope = g.d1(xs);
    if (x <= xs) return g(x) / slope;
    return x - xs + g(xs) / slope;
}

GValues value_J_derivatives(const CanonicalSolution& g, const BarrierPolicy& p, double x) {
    check_x(x);
    if (x > p.x_upper) return {value_J(g, p, x), 1.0, 0.0};
    const double scale = (p.x_upper - p.x_lower) / span(g, p);
    const GValues v = g.eval(x);
    return {v.g * scale, v.dg * scale, v.d2g * scale};
}

GValues value_R_derivatives(const CanonicalSolution& g, const BarrierPolicy& p, double x) {
    check_x(x);
    if (x > p.x_upper) return {value_R(g, p, x), 0.0, 0.0};
    const double scale = 1.0 / span(g, p);
    const GValues v = g.eval(x);
    return {v.g * scale, v.dg * scale, v.d2g * scale};
}

}  // namespace momentdiv
