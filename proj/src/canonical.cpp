#include "momentdiv/canonical.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "momentdiv/roots.hpp"

namespace momentdiv {

namespace {

// Intervals per chunk of the integration grid; one chunk spans x_max.
constexpr int kChunkIntervals = 10240;
constexpr int kMaxChunks = static_cast<int>(kMaxDomainGrowth);
// exp() overflows a little above 709; keep a margin for the closed form.
constexpr double kMaxExponent = 700.0;

using State = std::array<double, 2>;

struct Chunk {
    std::vector<double> g, dg, d2g;  // kChunkIntervals + 1 nodes, last shared with the next chunk
};

double hermite(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
}

}  // namespace

struct CanonicalSolution::Impl {
    DiffusionModel model;
    double x_max = 0.0;
    double s = 1.0;  // g'(0)
    double x_b = 0.0;

    // Closed form.
    bool closed = false;
    double a1 = 0.0, a2 = 0.0;

    // Grid form. Chunks are published once and never modified afterwards, so
    // readers only need an acquire load of the count.
    double h = 0.0;
    mutable std::array<std::unique_ptr<const Chunk>, kMaxChunks> chunks;
    mutable std::atomic<int> n_chunks{0};
    mutable std::mutex grow_mutex;

    double second(double x, double g, double dg) const {
        const double sig = model.sigma(x);
        return 2.0 * (model.r * g - model.mu(x) * dg) / (sig * sig);
    }

    void integrate_chunk(int j) const {
        State y{0.0, s};
        const double x0 = j * kChunkIntervals * h;
        if (j > 0) {
            const Chunk& prev = *chunks[j - 1];
            y = {prev.g.back(), prev.dg.back()};
        }
        auto rhs = [this](const State& st, State& dst, double x) {
            dst[0] = st[1];
            dst[1] = second(x, st[0], st[1]);
        };
        auto chunk = std::make_unique<Chunk>();
        chunk->g.reserve(kChunkIntervals + 1);
        chunk->dg.reserve(kChunkIntervals + 1);
        chunk->d2g.reserve(kChunkIntervals + 1);
        std::vector<double> times(kChunkIntervals + 1);
        for (int i = 0; i <= kChunkIntervals; ++i) times[i] = x0 + i * h;
        // Use the exact endpoint so that chunk boundaries coincide bit-for-bit.
        auto observer = [&](const State& st, double x) {
            chunk->g.push_back(st[0]);
            chunk->dg.push_back(st[1]);
            chunk->d2g.push_back(second(x, st[0], st[1]));
        };
        namespace ode = boost::numeric::odeint;
        try {
            ode::integrate_times(ode::make_controlled(1e-14, 1e-12, ode::runge_kutta_dopri5<State>()), rhs, y,
                                 times.begin(), times.end(), h, observer);
        } catch (const EvalError& e) {
            throw NumericError(std::string("coefficient evaluation failed during integration: ") + e.what());
        }
        for (int i = 0; i <= kChunkIntervals; ++i) {
            if (!std::isfinite(chunk->g[i]) || !std::isfinite(chunk->dg[i]) || !std::isfinite(chunk->d2g[i])) {
                throw NumericError("integration of g blew up at x = " + std::to_string(times[i]));
            }
        }
        chunks[j] = std::move(chunk);
    }

    // Makes chunks [0, j] available.
    void ensure(int j) const {
        if (j < n_chunks.load(std::memory_order_acquire)) return;
        if (j >= kMaxChunks) {
            throw NumericError("canonical solution domain exhausted beyond x = " +
                               std::to_string(kMaxDomainGrowth * x_max));
        }
        std::lock_guard<std::mutex> lock(grow_mutex);
        for (int c = n_chunks.load(std::memory_order_relaxed); c <= j; ++c) {
            integrate_chunk(c);
            n_chunks.store(c + 1, std::memory_order_release);
        }
    }

    GValues eval_grid(double x) const {
        if (x < -h) throw ConfigError("canonical solution evaluated at negative x = " + std::to_string(x));
        if (!std::isfinite(x)) throw ConfigError("canonical solution evaluated at non-finite x");
        const double u = std::max(x, 0.0) / h;
        if (u >= static_cast<double>(kMaxChunks) * kChunkIntervals) {
            throw NumericError("canonical solution domain exhausted at x = " + std::to_string(x));
        }
        long i = static_cast<long>(u);
        int c = static_cast<int>(i / kChunkIntervals);
        // The right end of a chunk is also the left end of the next one.
        if (c == kMaxChunks) c = kMaxChunks - 1;
        ensure(c);
        const Chunk& ch = *chunks[c];
        int k = static_cast<int>(i - static_cast<long>(c) * kChunkIntervals);
        if (k >= kChunkIntervals) k = kChunkIntervals - 1;
        const double t = (x - (static_cast<double>(c) * kChunkIntervals + k) * h) / h;
        GValues v;
        v.g = hermite(t, h, ch.g[k], ch.g[k + 1], ch.dg[k], ch.dg[k + 1]);
        v.dg = hermite(t, h, ch.dg[k], ch.dg[k + 1], ch.d2g[k], ch.d2g[k + 1]);
        v.d2g = second(x, v.g, v.dg);
        return v;
    }

    GValues eval_closed(double x) const {
        if (!std::isfinite(x)) throw ConfigError("canonical solution evaluated at non-finite x");
        if (a1 * x > kMaxExponent || a2 * x > kMaxExponent) {
            throw NumericError("canonical solution overflows at x = " + std::to_string(x));
        }
        const double e1 = std::exp(a1 * x), e2 = std::exp(a2 * x);
        const double scale = s / (a1 - a2);
        return {scale * (e1 - e2), scale * (a1 * e1 - a2 * e2), scale * (a1 * a1 * e1 - a2 * a2 * e2)};
    }

    GValues eval(double x) const { return closed ? eval_closed(x) : eval_grid(x); }

    double limit() const { return closed ? kMaxExponent / a1 : kMaxDomainGrowth * x_max; }
};

const DiffusionModel& CanonicalSolution::model() const noexcept { return impl_->model; }
bool CanonicalSolution::closed_form() const noexcept { return impl_->closed; }
double CanonicalSolution::alpha1() const noexcept { return impl_->a1; }
double CanonicalSolution::alpha2() const noexcept { return impl_->a2; }
double CanonicalSolution::normalization() const noexcept { return impl_->s; }
double CanonicalSolution::x_max() const noexcept { return impl_->x_max; }
double CanonicalSolution::domain_limit() const noexcept { return impl_->limit(); }
double CanonicalSolution::r() const noexcept { return impl_->model.r; }
double CanonicalSolution::inflection() const noexcept { return impl_->x_b; }

GValues CanonicalSolution::eval(double x) const { return impl_->eval(x); }

double CanonicalSolution::diff(double a, double b) const {
    const Impl& m = *impl_;
    if (m.closed) {
        if (m.a1 * std::max(a, b) > kMaxExponent) {
            throw NumericError("canonical solution overflows at x = " + std::to_string(std::max(a, b)));
        }
        const double d = b - a;
        const double t1 = std::exp(m.a1 * a) * std::expm1(m.a1 * d);
        const double t2 = std::exp(m.a2 * a) * std::expm1(m.a2 * d);
        return m.s / (m.a1 - m.a2) * (t1 - t2);
    }
    // Short intervals: integrate g' by 3-point Gauss-Legendre to avoid cancellation.
    if (std::abs(b - a) <= 4.0 * m.h) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        const double q = std::sqrt(0.6);
        return half * (5.0 / 9.0 * m.eval(mid - q * half).dg + 8.0 / 9.0 * m.eval(mid).dg +
                       5.0 / 9.0 * m.eval(mid + q * half).dg);
    }
    return m.eval(b).g - m.eval(a).g;
}

namespace {

// e^z - 1 - z without cancellation for small |z|.
double expm1_minus_z(double z) {
    if (std::abs(z) > 0.1) return std::expm1(z) - z;
    double term = z * z / 2.0, sum = 0.0;
    for (int n = 3; std::abs(term) > 1e-18 * std::abs(sum) || n < 4; ++n) {
        sum += term;
        term *= z / n;
    }
    return sum;
}

}  // namespace

double CanonicalSolution::backward_remainder(double x, double h) const {
    const Impl& m = *impl_;
    if (m.closed) {
        const double t1 = std::exp(m.a1 * x) * expm1_minus_z(-m.a1 * h);
        const double t2 = std::exp(m.a2 * x) * expm1_minus_z(-m.a2 * h);
        return m.s / (m.a1 - m.a2) * (t1 - t2);
    }
    // Integral of g'(x) - g'(t) over [x - h, x], 3-point Gauss-Legendre per grid cell.
    const double dgx = m.eval(x).dg;
    const int cells = std::max(1, static_cast<int>(std::ceil(h / m.h)));
    const double w = h / cells, q = std::sqrt(0.6);
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double mid = x - h + (i + 0.5) * w, half = 0.5 * w;
        sum += half * (5.0 / 9.0 * (dgx - m.eval(mid - q * half).dg) + 8.0 / 9.0 * (dgx - m.eval(mid).dg) +
                       5.0 / 9.0 * (dgx - m.eval(mid + q * half).dg));
    }
    return sum;
}

double CanonicalSolution::ode_residual(double x) const {
    const Impl& m = *impl_;
    const double step = m.closed ? 1e-3 : m.h;
    const double lo = std::max(x - 2.0 * step, 0.0);
    const double c = lo + 2.0 * step;  // one-sided shift near 0 keeps the stencil in the domain
    const double f[5] = {m.eval(lo).dg, m.eval(lo + step).dg, m.eval(c).dg, m.eval(c + step).dg,
                         m.eval(c + 2.0 * step).dg};
    // Fourth-order derivative of g' at x: central when possible, otherwise forward.
    double d2;
    if (c == x) {
        d2 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * step);
    } else {
        const double t = (x - lo) / step;  // in [0, 2)
        // Derivative of the quartic through the five samples at offset t.
        const double w[5] = {
            ((((4 * t - 30) * t + 70) * t - 50)) / 24.0,
            -(((4 * t - 27) * t + 52) * t - 24) / 6.0,
            (((4 * t - 24) * t + 38) * t - 12) / 4.0,
            -(((4 * t - 21) * t + 28) * t - 8) / 6.0,
            (((4 * t - 18) * t + 22) * t - 6) / 24.0,
        };
        d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += w[i] * f[i];
        d2 /= step;
    }
    const GValues v = m.eval(x);
    const double sig = m.model.sigma(x);
    return (m.model.mu(x) * v.dg + 0.5 * sig * sig * d2 - m.model.r * v.g) / (1.0 + std::abs(v.g));
}

std::string CanonicalSolution::to_json(int n) const {
    const Impl& m = *impl_;
    nlohmann::ordered_json j;
    j["kind"] = m.closed ? "closed-form" : "grid";
    j["normalization"] = m.s;
    j["x_b"] = m.x_b;
    j["x_max"] = m.x_max;
    if (m.closed) {
        j["alpha1"] = m.a1;
        j["alpha2"] = m.a2;
    }
    std::vector<double> xs, gs, dgs;
    if (m.closed) {
        if (n < 2) throw ConfigError("to_json needs at least 2 sample points");
        for (int i = 0; i < n; ++i) {
            const double x = m.x_max * i / (n - 1);
            const GValues v = m.eval(x);
            xs.push_back(x);
            gs.push_back(v.g);
            dgs.push_back(v.dg);
        }
    } else {
        m.ensure(0);
        const Chunk& ch = *m.chunks[0];
        for (int i = 0; i <= kChunkIntervals; ++i) xs.push_back(i * m.h);
        gs = ch.g;
        dgs = ch.dg;
    }
    j["x"] = xs;
    j["g"] = gs;
    j["dg"] = dgs;
    return j.dump();
}

namespace {

// Bracket on [lo, hi] for the inflection point using node-spaced sampling.
double locate_inflection(const CanonicalSolution::Impl& m) {
    auto d2 = [&](double x) { return m.eval(x).d2g; };
    if (m.closed) {
        return std::log(m.a2 * m.a2 / (m.a1 * m.a1)) / (m.a1 - m.a2);
    }
    const double step = m.x_max / 1024.0;
    double lo = 0.0;
    double flo = d2(lo);
    if (!(flo < 0.0)) throw NumericError("g''(0) is not negative; inflection point not found");
    const double limit = m.limit();
    for (double hi = step; hi <= limit; hi += step) {
        const double fhi = d2(hi);
        if (fhi >= 0.0) return roots::toms748(d2, lo, hi, 1e-14);
        lo = hi;
    }
    throw NumericError("g'' has no sign change up to x = " + std::to_string(limit) + "; enlarge x_max");
}

void check_invariants(const CanonicalSolution& g) {
    const double x_max = g.x_max();
    const double x_b = g.inflection();
    const int n = 4096;
    const double tol_shape = 1e-9;
    double prev_dg = g.d1(x_b);
    if (g(0.0) != 0.0 || !(g.d1(0.0) > 0.0)) throw NumericError("canonical solution violates g(0) = 0, g'(0) > 0");
    for (int i = 1; i <= n; ++i) {
        const double x = x_max * i / n;
        const GValues v = g.eval(x);
        if (!(v.dg > 0.0)) throw NumericError("g' is not positive at x = " + std::to_string(x));
        const double scale = tol_shape * (1.0 + std::abs(v.dg));
        if (x < x_b && v.d2g > scale) throw NumericError("g'' is positive left of x_b at x = " + std::to_string(x));
        if (x > x_b && v.d2g < -scale) throw NumericError("g'' is negative right of x_b at x = " + std::to_string(x));
        if (x > x_b) {
            if (v.dg < prev_dg) throw NumericError("g' decreases right of x_b at x = " + std::to_string(x));
            prev_dg = v.dg;
        }
        const double res = std::abs(g.ode_residual(x));
        if (res > kTolOde) {
            throw NumericError("ODE residual " + std::to_string(res) + " exceeds tolerance at x = " +
                               std::to_string(x));
        }
    }
}

std::shared_ptr<CanonicalSolution::Impl> base_impl(const DiffusionModel& m, double x_max, double normalization) {
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ConfigError("x_max must be positive");
    if (!(normalization > 0.0) || !std::isfinite(normalization)) throw ConfigError("normalization must be positive");
    require_valid(m);
    auto impl = std::make_shared<CanonicalSolution::Impl>();
    impl->model = m;
    impl->x_max = x_max;
    impl->s = normalization;
    return impl;
}

CanonicalSolution finish(std::shared_ptr<CanonicalSolution::Impl> impl) {
    impl->x_b = locate_inflection(*impl);
    CanonicalSolution g(impl);
    check_invariants(g);
    return g;
}

}  // namespace

CanonicalSolution solve_canonical(const DiffusionModel& m, double x_max, double normalization) {
    if (m.kind != ModelKind::wiener_drift) return solve_canonical_grid(m, x_max, normalization);
    auto impl = base_impl(m, x_max, normalization);
    const double mu = m.mu.constant_value();
    const double sig = m.sigma.constant_value();
    const double s2 = sig * sig;
    const double root = std::sqrt(mu * mu / (s2 * s2) + 2.0 * m.r / s2);
    impl->closed = true;
    impl->a1 = -mu / s2 + root;
    impl->a2 = -mu / s2 - root;
    return finish(std::move(impl));
}

CanonicalSolution solve_canonical_grid(const DiffusionModel& m, double x_max, double normalization) {
    auto impl = base_impl(m, x_max, normalization);
    impl->h = x_max / kChunkIntervals;
    impl->ensure(0);
    return finish(std::move(impl));
}

double inflection_point(const CanonicalSolution& g) { return g.inflection(); }

double generator_apply(const SmoothFunction& f, const DiffusionModel& m, double x) {
    if (!(x >= 0.0)) throw ConfigError("generator_apply needs x >= 0");
    const GValues v = f(x);
    const double sig = m.sigma(x);
    return m.mu(x) * v.dg + 0.5 * sig * sig * v.d2g;
}

}  // namespace momentdiv
