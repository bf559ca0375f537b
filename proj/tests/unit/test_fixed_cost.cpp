#include <doctest.h>

#include <random>

#include "common.hpp"
#include "momentdiv/fixed_cost.hpp"

using namespace momentdiv;

namespace {

// One-sided slope of H at the barriers by central differences of the below-barrier formula.
double slope_upper(const CanonicalSolution& g, double c, const BarrierPolicy& p) {
    const double h = 1e-6;
    return (value_H_interior(g, c, p, p.x_upper + h) - value_H_interior(g, c, p, p.x_upper - h)) / (2 * h);
}
double slope_lower(const CanonicalSolution& g, double c, const BarrierPolicy& p) {
    const double h = 1e-6;
    return (value_H(g, c, p, p.x_lower + h) - value_H(g, c, p, p.x_lower - h)) / (2 * h);
}

// Threshold oracle: x0 with g'(x0) = g'(0) on the closed form, then c = x0 - g(x0)/g'(0).
double threshold_oracle() {
    double lo = oracle::x_star, hi = 20.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle::dg(mid) < 1.0 ? lo : hi) = mid;
    }
    return lo - oracle::g(lo);
}

}  // namespace

TEST_SUITE("fixed_cost") {

TEST_CASE("golden barriers") {
    const auto& g = example_g();
    const struct { double c, xl, xu; } cases[] = {{0.1, 0.7670, 1.8528}, {0.6, 0.5453, 2.9769}, {2.0, 0.3183, 4.9580}};
    for (const auto& t : cases) {
        const auto sol = solve_fixed_cost(g, t.c);
        CHECK(sol.kind == FixedCostCase::interior);
        CHECK(std::abs(sol.policy.x_lower - t.xl) <= 1e-4);
        CHECK(std::abs(sol.policy.x_upper - t.xu) <= 1e-4);
        CHECK(sol.residual <= kTolRoot);
        CHECK(sol.value_at(0.5) == value_H(g, t.c, sol.policy, 0.5));
    }
}

TEST_CASE("defining equations hold on the closed form") {
    const auto& g = example_g();
    for (double c : {0.05, 0.3, 1.0, 3.0}) {
        const auto sol = solve_fixed_cost(g, c);
        const double xl = sol.policy.x_lower, xu = sol.policy.x_upper;
        const double q = (oracle::g(xu) - oracle::g(xl)) / (xu - xl - c);
        CHECK(std::abs(oracle::dg(xu) / q - 1.0) <= 1e-10);
        CHECK(std::abs(oracle::dg(xl) / q - 1.0) <= 1e-10);
    }
}

TEST_CASE("ruin case") {
    const auto& g = example_g();
    const auto sol = solve_fixed_cost(g, 10.0);
    CHECK(sol.kind == FixedCostCase::ruin);
    CHECK(sol.policy.x_lower == 0.0);
    const double xu = sol.policy.x_upper;
    CHECK(xu > 10.0);
    CHECK(std::abs(oracle::dg(xu) * (xu - 10.0) - oracle::g(xu)) <= 1e-10 * oracle::g(xu));
    CHECK(std::abs(slope_upper(g, 10.0, sol.policy) - 1.0) <= 1e-8);
}

TEST_CASE("smooth fit by central differences") {
    const auto& g = example_g();
    // Rounding in H alone limits a step-1e-6 difference quotient to ~eps |H| / h = 2e-10.
    const double tol = 1e-8;
    for (double c : {0.1, 0.6, 2.0}) {
        const auto sol = solve_fixed_cost(g, c);
        CHECK(sol.residual <= kTolRoot);
        CHECK(std::abs(slope_upper(g, c, sol.policy) - 1.0) <= tol);
        CHECK(std::abs(slope_lower(g, c, sol.policy) - 1.0) <= tol);
    }
}

TEST_CASE("invariants and monotone ladder") {
    const auto& g = example_g();
    const double xs = g.inflection();
    double prev_lo = xs, prev_hi = xs;
    for (double c : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
        const auto sol = solve_fixed_cost(g, c);
        CHECK(sol.policy.x_lower < xs);
        CHECK(sol.policy.x_upper > xs);
        CHECK(sol.policy.x_upper > c);
        CHECK(sol.policy.x_lower > 0.0);
        CHECK(sol.policy.x_lower < prev_lo);
        CHECK(sol.policy.x_upper > prev_hi);
        prev_lo = sol.policy.x_lower;
        prev_hi = sol.policy.x_upper;
    }
}

TEST_CASE("vanishing cost converges to the classical barrier") {
    const auto& g = example_g();
    const double xs = g.inflection();
    double gap_lo = 1e9, gap_hi = 1e9;
    double prev_H[3] = {-1e9, -1e9, -1e9};
    const double xs_eval[3] = {0.5, 1.0, 2.0};
    for (double c : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const auto sol = solve_fixed_cost(g, c);
        CHECK(xs - sol.policy.x_lower < gap_lo);
        CHECK(sol.policy.x_upper - xs < gap_hi);
        gap_lo = xs - sol.policy.x_lower;
        gap_hi = sol.policy.x_upper - xs;
        for (int i = 0; i < 3; ++i) {
            const double h = sol.value_at(xs_eval[i]);
            CHECK(h > prev_H[i]);
            CHECK(h < value_U(g, xs_eval[i]));
            prev_H[i] = h;
        }
    }
    CHECK(gap_hi < 0.1);
    for (int i = 0; i < 3; ++i) CHECK(value_U(g, xs_eval[i]) - prev_H[i] < 1e-2);
}

TEST_CASE("optimality against perturbed policies") {
    const auto& g = example_g();
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z(0.0, 1.0);
    for (double c : {0.1, 0.6, 2.0}) {
        const auto sol = solve_fixed_cost(g, c);
        int tried = 0;
        while (tried < 200) {
            const BarrierPolicy p{std::max(0.0, sol.policy.x_lower + 0.2 * z(rng)), sol.policy.x_upper + 0.3 * z(rng)};
            if (!(p.x_upper > p.x_lower)) continue;
            ++tried;
            for (double x : {0.5, g.inflection(), 3.0})
                CHECK(sol.value_at(x) >= value_H(g, c, p, x) - 1e-12);
        }
    }
}

TEST_CASE("ruin cost threshold") {
    const auto& g = example_g();
    const double cbar = ruin_cost_threshold(g);
    CHECK(cbar > 2.0);
    CHECK(cbar == doctest::Approx(5.5049978361069).epsilon(1e-10));
    CHECK(cbar == doctest::Approx(threshold_oracle()).epsilon(1e-10));
    CHECK(fixed_cost_case(g, 0.99 * cbar) == FixedCostCase::interior);
    CHECK(fixed_cost_case(g, 1.01 * cbar) == FixedCostCase::ruin);
    CHECK(solve_fixed_cost(g, 0.99 * cbar).kind == FixedCostCase::interior);
    CHECK(solve_fixed_cost(g, 1.01 * cbar).kind == FixedCostCase::ruin);
}

TEST_CASE("coarse scan locates the same threshold") {
    const auto& g = example_g();
    double c = 2.0;
    while (fixed_cost_case(g, c + 0.1) == FixedCostCase::interior) c += 0.1;
    const double cbar = ruin_cost_threshold(g);
    CHECK(cbar > c);
    CHECK(cbar <= c + 0.1);
}

TEST_CASE("paired barrier matches slopes") {
    const auto& g = example_g();
    for (double xl : {0.1, 0.5, 1.0}) {
        const double xu = paired_barrier(g, xl);
        CHECK(xu > g.inflection());
        CHECK(oracle::dg(xu) == doctest::Approx(oracle::dg(xl)).epsilon(1e-12));
    }
}

TEST_CASE("invalid cost") {
    CHECK_THROWS_AS(solve_fixed_cost(example_g(), 0.0), ConfigError);
    CHECK_THROWS_AS(solve_fixed_cost(example_g(), -1.0), ConfigError);
}

}
