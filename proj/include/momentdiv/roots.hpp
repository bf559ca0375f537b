#pragma once

// Bracketed scalar root finding on top of Boost.Math.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "momentdiv/error.hpp"

namespace momentdiv::roots {

inline constexpr double kTolRoot = 1e-10;

namespace detail {
inline auto width_tolerance(double tol) {
    return [tol](double a, double b) { return std::abs(b - a) <= tol; };
}
}  // namespace detail

/// Root of `f` in [lo, hi] by TOMS 748; f(lo) and f(hi) must differ in sign.
/// The returned point is the bracket end with the smaller |f|.
template <class F>
double toms748(F&& f, double lo, double hi, double tol = kTolRoot, std::uintmax_t max_iter = 300) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw NumericError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    std::uintmax_t iters = max_iter;
    const auto [a, b] =
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, detail::width_tolerance(tol), iters);
    return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

/// Plain bisection on [lo, hi]; f(lo) and f(hi) must differ in sign.
/// Returns the final bracket.
template <class F>
std::pair<double, double> bisect_bracket(F&& f, double lo, double hi, double tol = kTolRoot,
                                         std::uintmax_t max_iter = 400) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return {lo, lo};
    if (fhi == 0.0) return {hi, hi};
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw NumericError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    std::uintmax_t iters = max_iter;
    return boost::math::tools::bisect(f, lo, hi, detail::width_tolerance(tol), iters);
}

template <class F>
double bisect(F&& f, double lo, double hi, double tol = kTolRoot, std::uintmax_t max_iter = 400) {
    const auto [a, b] = bisect_bracket(f, lo, hi, tol, max_iter);
    return 0.5 * (a + b);
}

/// Bisection while the bracket is wide (> 1), TOMS 748 once it is narrow.
template <class F>
double bracketed(F&& f, double lo, double hi, double tol = kTolRoot) {
    if (hi - lo > 1.0) {
        const auto [a, b] = bisect_bracket(f, lo, hi, 1.0);
        if (a == b) return a;
        lo = a;
        hi = b;
    }
    return toms748(f, lo, hi, tol);
}

}  // namespace momentdiv::roots
