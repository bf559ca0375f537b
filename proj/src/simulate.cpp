#include "momentdiv/simulate.hpp"

#include <cmath>
#include <string>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "momentdiv/parallel.hpp"

namespace momentdiv {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman and Vigna); std and Boost 1.74 ship no generator
// this fast with cheap independent seeding.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    explicit Xoshiro256pp(std::uint64_t key) {
        for (auto& w : s_) w = key = splitmix64(key);
    }

    result_type operator()() {
        const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return out;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose) {
    return splitmix64(seed ^ splitmix64(index * 2 + purpose));
}

// Bridge crossing probabilities below e^-40 are treated as zero.
constexpr double kBridgeCutoff = 40.0;

struct Params {
    double xl, xu, lump, r, dt, sqdt;
    long steps;
    bool bridge;
};

struct ConstCoef {
    double mu, sigma;
    void operator()(double, double& m, double& s) const {
        m = mu;
        s = sigma;
    }
};

struct ExprCoef {
    const DiffusionModel* model;
    void operator()(double x, double& m, double& s) const {
        m = model->mu(x);
        s = model->sigma(x);
    }
};

struct NoSink {
    void dividend(double, double) {}
    void ruin(double) {}
};

struct TraceSink {
    PathTrace* trace;
    void dividend(double t, double size) {
        trace->dividend_times.push_back(t);
        trace->dividend_sizes.push_back(size);
    }
    void ruin(double t) { trace->ruin_time = t; }
};

struct PathResult {
    double J = 0.0, R = 0.0;
    long steps = 0;
};

template <class Coef, class Sink>
PathResult run_path(const Coef& coef, const Params& P, double x0, std::uint64_t seed, std::uint64_t path,
                    bool antithetic, Sink& sink) {
    PathResult out;
    double x = x0;
    if (x <= 0.0) {
        sink.ruin(0.0);
        return out;
    }
    if (x >= P.xu) {
        // Immediate lump down to x_lower.
        out.J += x - P.xl;
        out.R += 1.0;
        sink.dividend(0.0, x - P.xl);
        x = P.xl;
        if (x <= 0.0) {
            sink.ruin(0.0);
            return out;
        }
    }

    const std::uint64_t normal_index = antithetic ? path / 2 : path;
    const double sign = antithetic && (path & 1) ? -1.0 : 1.0;
    Xoshiro256pp normals(stream_key(seed, normal_index, 0));
    Xoshiro256pp uniforms(stream_key(seed, path, 1));
    boost::random::normal_distribution<double> normal;
    boost::random::uniform_01<double> uniform;

    double mu, sigma;
    for (long i = 0; i < P.steps; ++i) {
        coef(x, mu, sigma);
        const double var = sigma * sigma * P.dt;
        double xn = x + mu * P.dt + sigma * P.sqdt * (sign * normal(normals));

        bool crossed = xn >= P.xu;
        if (!crossed && P.bridge && var > 0.0) {
            const double a = 2.0 * (P.xu - x) * (P.xu - xn) / var;
            crossed = a < kBridgeCutoff && uniform(uniforms) < std::exp(-a);
        }
        double from = x;
        if (crossed) {
            const double t = (i + 1) * P.dt;
            const double disc = std::exp(-P.r * t);
            // The rest of the step continues from x_lower.
            do {
                out.J += disc * P.lump;
                out.R += disc;
                sink.dividend(t, P.lump);
                xn -= P.lump;
            } while (xn >= P.xu);
            from = P.xl;
        }

        bool ruined = xn <= 0.0;
        if (!ruined && P.bridge && var > 0.0) {
            const double a = 2.0 * from * xn / var;
            ruined = a < kBridgeCutoff && uniform(uniforms) < std::exp(-a);
        }
        if (ruined) {
            out.steps = i + 1;
            sink.ruin((i + 1) * P.dt);
            return out;
        }
        x = xn;
    }
    out.steps = P.steps;
    return out;
}

Params make_params(const DiffusionModel& m, const BarrierPolicy& p, const SimConfig& cfg) {
    p.validate();
    cfg.validate(m.r);
    return {p.x_lower,   p.x_upper, p.x_upper - p.x_lower, m.r, cfg.dt, std::sqrt(cfg.dt),
            static_cast<long>(std::ceil(cfg.horizon(m.r) / cfg.dt - 1e-9)), cfg.bridge_correction};
}

bool constant_coefficients(const DiffusionModel& m) {
    return m.mu.kind() == Expression::Kind::constant && m.sigma.kind() == Expression::Kind::constant;
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

MCEstimate estimate(const std::vector<double>& samples, std::uint64_t n_paths, std::uint64_t seed) {
    const std::size_t n = samples.size();
    MCEstimate e;
    e.n_paths = n_paths;
    e.seed = seed;
    e.mean = pairwise_sum(samples.data(), n) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
        const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
        e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

}  // namespace

void SimConfig::validate(double r) const {
    if (!(r > 0.0)) throw ConfigError("simulation needs a positive discount rate");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (t_horizon != 0.0 && !(t_horizon >= 100.0 / r * (1.0 - 1e-12))) {
        throw ConfigError("t_horizon must be at least 100/r = " + std::to_string(100.0 / r));
    }
    if (n_paths < 2) throw ConfigError("need at least 2 paths");
    if (antithetic && n_paths % 2 != 0) throw ConfigError("antithetic sampling needs an even path count");
}

SimResult simulate_policy(const DiffusionModel& m, const BarrierPolicy& p, double x0, const SimConfig& cfg) {
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ConfigError("x0 must be finite and >= 0");
    const Params P = make_params(m, p, cfg);
    const std::uint64_t n = cfg.n_paths;
    std::vector<double> J(n), R(n);
    std::vector<long> steps(n);

    const bool fast = constant_coefficients(m);
    const ConstCoef cc{fast ? m.mu.constant_value() : 0.0, fast ? m.sigma.constant_value() : 0.0};
    const ExprCoef ec{&m};

    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
        NoSink sink;
        const std::uint64_t end = std::min<std::uint64_t>(n, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < end; ++i) {
            const PathResult res = fast ? run_path(cc, P, x0, cfg.seed, i, cfg.antithetic, sink)
                                        : run_path(ec, P, x0, cfg.seed, i, cfg.antithetic, sink);
            J[i] = res.J;
            R[i] = res.R;
            steps[i] = res.steps;
        }
    });

    if (cfg.antithetic) {
        // Pair means are the independent samples.
        for (std::uint64_t i = 0; i < n / 2; ++i) {
            J[i] = 0.5 * (J[2 * i] + J[2 * i + 1]);
            R[i] = 0.5 * (R[2 * i] + R[2 * i + 1]);
        }
        J.resize(n / 2);
        R.resize(n / 2);
    }

    SimResult out;
    out.J = estimate(J, n, cfg.seed);
    out.R = estimate(R, n, cfg.seed);
    double total = 0.0;
    for (long s : steps) total += static_cast<double>(s);
    out.mean_steps = total / static_cast<double>(n);
    return out;
}

PathTrace simulate_path(const DiffusionModel& m, const BarrierPolicy& p, double x0, const SimConfig& cfg,
                        std::uint64_t path_index) {
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ConfigError("x0 must be finite and >= 0");
    const Params P = make_params(m, p, cfg);
    PathTrace trace;
    TraceSink sink{&trace};
    const PathResult res = run_path(ExprCoef{&m}, P, x0, cfg.seed, path_index, cfg.antithetic, sink);
    trace.J = res.J;
    trace.R = res.R;
    return trace;
}

std::vector<ConvergenceRow> convergence_sweep(const CanonicalSolution& g, const BarrierPolicy& p, double x0,
                                              const std::vector<double>& dt_list, const SimConfig& cfg) {
    if (dt_list.empty()) throw ConfigError("convergence sweep needs at least one dt");
    for (std::size_t i = 1; i < dt_list.size(); ++i) {
        if (!(dt_list[i] < dt_list[i - 1])) throw ConfigError("dt list must be strictly decreasing");
    }
    const double j_ref = value_J(g, p, x0);
    const double r_ref = value_R(g, p, x0);
    std::vector<ConvergenceRow> rows;
    for (double dt : dt_list) {
        SimConfig c = cfg;
        c.dt = dt;
        ConvergenceRow row;
        row.dt = dt;
        row.estimate = simulate_policy(g.model(), p, x0, c);
        row.bias_J = row.estimate.J.mean - j_ref;
        row.bias_R = row.estimate.R.mean - r_ref;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace momentdiv
