#include "momentdiv/figures.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "momentdiv/equilibrium.hpp"
#include "momentdiv/fixed_cost.hpp"
#include "momentdiv/parallel.hpp"
#include "momentdiv/precommitment.hpp"

namespace momentdiv {

namespace {

constexpr double kSensitivityX = 0.025;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string row(std::initializer_list<double> values) {
    std::string s;
    for (double v : values) {
        if (!s.empty()) s += ',';
        s += num(v);
    }
    return s + '\n';
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// The small-parameter point followed by 0.025, 0.05, ..., 0.625.
std::vector<double> ladder(double first) {
    std::vector<double> v{first};
    for (int i = 1; i <= 25; ++i) v.push_back(0.025 * i);
    return v;
}

using Body = std::function<std::size_t(std::ostream&)>;

FigureFile write_figure(const std::string& dir, const std::string& name, const Body& body) {
    FigureFile f{name, (std::filesystem::path(dir) / (name + ".csv")).string(), 0, {}};
    try {
        std::ostringstream os;
        f.rows = body(os);
        std::ofstream out(f.path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + f.path);
        out << os.str();
    } catch (const std::exception& e) {
        f.error = e.what();
    }
    return f;
}

std::size_t fig1(const CanonicalSolution& g, std::ostream& os) {
    os << "x,g,dg,d2g\n";
    const auto xs = linspace(0.0, 5.0, 501);
    for (double x : xs) {
        const GValues v = g.eval(x);
        os << row({x, v.g, v.dg, v.d2g});
    }
    return xs.size();
}

std::size_t fig2(const CanonicalSolution& g, std::ostream& os) {
    os << "c,x_lower,x_upper,x,H\n";
    std::size_t n = 0;
    for (double c : {0.1, 0.6, 2.0}) {
        const FixedCostSolution s = solve_fixed_cost(g, c);
        for (double x : linspace(0.0, s.policy.x_upper + 1.0, 201)) {
            os << row({c, s.policy.x_lower, s.policy.x_upper, x, s.value_at(x)});
            ++n;
        }
    }
    return n;
}

std::size_t fig3(const CanonicalSolution& g, std::ostream& os) {
    std::vector<double> x0s{0.025, 0.05, 0.075};
    for (int i = 1; i <= 27; ++i) x0s.push_back(0.1 * i);
    os << "k,x0,c_star,x_lower,x_upper,V\n";
    std::size_t n = 0;
    for (double k : {0.4, 0.8}) {
        os << row({k, 0.0, 0.0, 0.0, 0.0, 0.0});
        ++n;
        for (const PrecommitmentRow& r : precommitment_sweep_x0(g, x0s, k)) {
            if (!r.solution) throw NumericError("precommitment failed at x0 = " + num(r.x0) + ": " + r.error);
            const auto& s = *r.solution;
            const BarrierPolicy p = s.policy.value_or(BarrierPolicy{});
            os << row({k, s.x0, s.c_star, p.x_lower, p.x_upper, s.V});
            ++n;
        }
    }
    return n;
}

std::size_t fig4(const CanonicalSolution& g, std::ostream& os) {
    os << "k,x_lower,x_upper,x,J\n";
    std::size_t n = 0;
    for (double k : {0.01, 0.5, 0.99}) {
        const EquilibriumSolution s = solve_equilibrium(g, k);
        for (double x : linspace(0.0, 5.0, 201)) {
            os << row({k, s.policy->x_lower, s.policy->x_upper, x, equilibrium_value(g, s, x)});
            ++n;
        }
    }
    return n;
}

std::size_t fig5(const CanonicalSolution& g, std::ostream& os) {
    const auto cs = ladder(1e-6);
    std::vector<FixedCostSolution> sols(cs.size(), FixedCostSolution{0.0, {}, FixedCostCase::interior, 0.0, g});
    parallel_for(cs.size(), [&](std::size_t i) { sols[i] = solve_fixed_cost(g, cs[i]); });
    const double u = value_U(g, kSensitivityX);
    os << "c,x,value,x_lower,x_upper,U,x_star\n";
    for (const auto& s : sols) {
        os << row({s.c, kSensitivityX, s.value_at(kSensitivityX), s.policy.x_lower, s.policy.x_upper, u,
                   g.inflection()});
    }
    return sols.size();
}

std::size_t fig6(const CanonicalSolution& g, std::ostream& os) {
    const double u = value_U(g, kSensitivityX);
    os << "k,x0,value,x_lower,x_upper,U,x_star\n";
    std::size_t n = 0;
    for (const PrecommitmentRow& r : precommitment_sweep_k(g, kSensitivityX, fig6_k_values())) {
        if (!r.solution) throw NumericError("precommitment failed at k = " + num(r.k) + ": " + r.error);
        const auto& s = *r.solution;
        const BarrierPolicy p = s.policy.value_or(BarrierPolicy{});
        os << row({s.k, s.x0, s.V, p.x_lower, p.x_upper, u, g.inflection()});
        ++n;
    }
    return n;
}

std::size_t fig7(const CanonicalSolution& g, std::ostream& os) {
    const auto ks = ladder(1e-7);
    std::vector<EquilibriumSolution> sols(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) { sols[i] = solve_equilibrium(g, ks[i]); });
    const double u = value_U(g, kSensitivityX);
    os << "k,x,value,x_lower,x_upper,U,x_star\n";
    for (const auto& s : sols) {
        os << row({s.k, kSensitivityX, equilibrium_value(g, s, kSensitivityX), s.policy->x_lower,
                   s.policy->x_upper, u, g.inflection()});
    }
    return sols.size();
}

}  // namespace

DiffusionModel example_model() { return DiffusionModel::wiener_drift(0.06, 0.03, 0.02); }

const std::vector<double>& fig6_k_values() {
    // Chosen so that the corresponding Lagrange costs span about 1e-9 to 0.6.
    static const std::vector<double> ks{
        0.00893212311126738, 0.0414599533993498, 0.0893276984221259, 0.152781418451972, 0.192518305771818,
        0.242609835560409,   0.300000112827751,  0.350133850844845,  0.400000000048371, 0.464836614589025,
        0.504629778154618,   0.564542335424184,  0.632054272689476,
    };
    return ks;
}

std::vector<FigureFile> reproduce_figures(const CanonicalSolution& g, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    using Fig = std::size_t (*)(const CanonicalSolution&, std::ostream&);
    const std::pair<const char*, Fig> figs[] = {{"fig1", fig1}, {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4},
                                                {"fig5", fig5}, {"fig6", fig6}, {"fig7", fig7}};
    std::vector<FigureFile> out;
    for (const auto& [name, fn] : figs) {
        out.push_back(write_figure(out_dir, name, [&, fn = fn](std::ostream& os) { return fn(g, os); }));
    }
    return out;
}

std::vector<FigureFile> reproduce_figures(const std::string& out_dir) {
    return reproduce_figures(solve_canonical(example_model()), out_dir);
}

}  // namespace momentdiv
