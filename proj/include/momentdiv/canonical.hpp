#pragma once

#include <functional>
#include <memory>
#include <string>

#include "momentdiv/model.hpp"
#include "momentdiv/roots.hpp"

namespace momentdiv {

inline constexpr double kTolOde = 1e-9;
using roots::kTolRoot;
/// The represented domain may grow up to this multiple of the requested x_max.
inline constexpr double kMaxDomainGrowth = 1024.0;

struct GValues {
    double g = 0.0;
    double dg = 0.0;
    double d2g = 0.0;
};

/// The increasing solution g of mu g' + sigma^2 g''/2 = r g with g(0) = 0,
/// normalized so that g'(0) equals `normalization()`.
///
/// Wiener-drift models use the exponential closed form. General models are
/// integrated onto a uniform grid and interpolated with cubic Hermite
/// polynomials; the grid is extended on demand when a caller evaluates past
/// the current end, up to kMaxDomainGrowth times the requested x_max.
/// Instances are immutable from the caller's point of view and thread-safe.
class CanonicalSolution {
public:
    const DiffusionModel& model() const noexcept;
    bool closed_form() const noexcept;
    double alpha1() const noexcept;  // closed form only
    double alpha2() const noexcept;  // closed form only
    double normalization() const noexcept;
    double x_max() const noexcept;   // requested domain
    double domain_limit() const noexcept;  // largest x that may be evaluated
    double r() const noexcept;

    /// Inflection point x_b, also the classical barrier x*.
    double inflection() const noexcept;

    double operator()(double x) const { return eval(x).g; }
    double d1(double x) const { return eval(x).dg; }
    double d2(double x) const { return eval(x).d2g; }
    GValues eval(double x) const;

    /// g(b) - g(a), computed without cancellation in the closed form.
    double diff(double a, double b) const;

    /// g(x - h) - g(x) + h g'(x), accurate even when it is far below h g'(x).
    double backward_remainder(double x, double h) const;

    /// Residual mu g' + sigma^2 g''/2 - r g at x, relative to 1 + |g(x)|.
    /// In grid form g'' comes from a finite difference of g', so this is a
    /// genuine consistency check rather than an identity.
    double ode_residual(double x) const;

    /// Grid dump {"kind", "normalization", "x_b", "x", "g", "dg"}; the closed
    /// form is sampled on `n` uniform points over [0, x_max].
    std::string to_json(int n = 501) const;

    struct Impl;
    explicit CanonicalSolution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

/// Validates `m` (throws ModelValidationError) and builds g on [0, x_max].
/// Throws NumericError if g is not increasing, concave then convex, or if the
/// integration blows up.
CanonicalSolution solve_canonical(const DiffusionModel& m, double x_max = kDefaultGridMax,
                                  double normalization = 1.0);

/// Integrates the general ODE even for a wiener-drift model (cross-check path).
CanonicalSolution solve_canonical_grid(const DiffusionModel& m, double x_max = kDefaultGridMax,
                                       double normalization = 1.0);

double inflection_point(const CanonicalSolution& g);

/// A function with its first two derivatives at x.
using SmoothFunction = std::function<GValues(double)>;

/// mu(x) f'(x) + sigma(x)^2 f''(x) / 2.
double generator_apply(const SmoothFunction& f, const DiffusionModel& m, double x);

}  // namespace momentdiv
