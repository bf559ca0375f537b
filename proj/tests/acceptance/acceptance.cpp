// Acceptance criteria runner. `acceptance N` checks criterion N; without an
// argument every criterion runs. Each criterion prints indented detail lines
// followed by one verdict line, and the exit status is nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "momentdiv/equilibrium.hpp"
#include "momentdiv/figures.hpp"
#include "momentdiv/fixed_cost.hpp"
#include "momentdiv/precommitment.hpp"
#include "momentdiv/simulate.hpp"

using namespace momentdiv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool ok = true;
    std::string summary;
};

// Accumulates named checks and prints failures as detail lines.
struct Checker {
    int total = 0, failed = 0;
    void operator()(bool ok, const std::string& what) {
        ++total;
        if (!ok) ++failed;
        std::printf("  %s %s\n", ok ? "ok  " : "FAIL", what.c_str());
    }
    bool ok() const { return failed == 0; }
    std::string counts() const { return std::to_string(total - failed) + "/" + std::to_string(total) + " checks"; }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const CanonicalSolution& g() {
    static const CanonicalSolution sol = solve_canonical(example_model());
    return sol;
}

Verdict criterion1() {
    const auto t0 = Clock::now();
    const double xs = solve_canonical(example_model()).inflection();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    Checker check;
    check(std::abs(xs - 1.1405) <= 5e-5, fmt("x* = %.10f vs 1.1405 (tol 5e-5)", xs));
    check(secs < 1.0, fmt("runtime %.4f s < 1 s", secs));
    return {check.ok(), check.counts()};
}

Verdict criterion2() {
    const auto t0 = Clock::now();
    const struct { double c, xl, xu; } cases[] = {{0.1, 0.7670, 1.8528}, {0.6, 0.5453, 2.9769}, {2.0, 0.3183, 4.9580}};
    std::vector<FixedCostSolution> sols;
    for (const auto& t : cases) sols.push_back(solve_fixed_cost(g(), t.c));
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    Checker check;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const auto& p = sols[i].policy;
        check(std::abs(p.x_lower - cases[i].xl) <= 1e-4 && std::abs(p.x_upper - cases[i].xu) <= 1e-4,
              fmt("c = %.1f: (%.6f, %.6f) vs (%.4f, ", cases[i].c, p.x_lower, p.x_upper, cases[i].xl) +
                  fmt("%.4f) (tol 1e-4)", cases[i].xu));
    }
    check(secs < 1.0, fmt("runtime %.4f s < 1 s", secs));
    return {check.ok(), check.counts()};
}

Verdict criterion3() {
    const auto t0 = Clock::now();
    const struct { double k, xl, xu; } cases[] = {{0.01, 1.1206, 1.1507}, {0.5, 0.3757, 1.9893}, {0.99, 0.0059, 3.2056}};
    std::vector<EquilibriumSolution> sols;
    for (const auto& t : cases) sols.push_back(solve_equilibrium(g(), t.k));
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    Checker check;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const auto& p = *sols[i].policy;
        check(std::abs(p.x_lower - cases[i].xl) <= 1e-4 && std::abs(p.x_upper - cases[i].xu) <= 1e-4,
              fmt("k = %.2f: (%.6f, %.6f) vs (%.4f, ", cases[i].k, p.x_lower, p.x_upper, cases[i].xl) +
                  fmt("%.4f) (tol 1e-4)", cases[i].xu));
    }
    check(secs < 1.0, fmt("runtime %.4f s < 1 s", secs));
    return {check.ok(), check.counts()};
}

Verdict criterion4() {
    const auto t0 = Clock::now();
    const struct { double k, x0, V; } cases[] = {
        {0.4, 0.1, 0.803856424058494}, {0.4, 0.5, 2.14611371519001}, {0.4, 1.0, 2.70139459726172},
        {0.4, 2.0, 3.58614547732458},  {0.8, 0.1, 0.791525131935807}, {0.8, 0.5, 1.99461327451429},
        {0.8, 1.0, 2.45018837358318},  {0.8, 2.0, 3.13766064235084}};
    Checker check;
    for (const auto& t : cases) {
        const double V = solve_precommitment(g(), t.x0, t.k).V;
        check(rel(V, t.V) <= 1e-4, fmt("k = %.1f, x0 = %.1f: V = %.12f vs %.12f", t.k, t.x0, V, t.V) +
                                       fmt(" (rel err %.2e)", rel(V, t.V)));
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    check(secs < 10.0, fmt("runtime %.4f s < 10 s", secs));
    return {check.ok(), check.counts()};
}

using Table = std::vector<std::vector<double>>;

Table read_csv(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    Table rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Column `col` of the row keyed by `key`; NaN when missing.
double find(const Table& t, double key, std::size_t col) {
    for (const auto& r : t)
        if (std::abs(r[0] - key) <= 1e-12 * std::max(1.0, std::abs(key))) return r.at(col);
    return std::nan("");
}

struct Point {
    double key, value;
};

// Reference coordinates for the sensitivity figures at x = x0 = 0.025.
const std::vector<Point> kFig5Value = {
    {0.000001, 0.23285063476179}, {0.025, 0.2190000912156},   {0.05, 0.211293827638586},  {0.075, 0.205067347192409},
    {0.1, 0.19968468082339},      {0.125, 0.194877443831074}, {0.15, 0.190499446806344},  {0.175, 0.186459626213246},
    {0.2, 0.182696266457372},     {0.225, 0.179165032406952}, {0.25, 0.175832682888366},  {0.275, 0.172673464326354},
    {0.3, 0.169666900025165},     {0.325, 0.166796362808084}, {0.35, 0.164048114128147},  {0.375, 0.161410634579611},
    {0.4, 0.158874143810545},     {0.425, 0.156430247718543}, {0.45, 0.154071673661853},  {0.475, 0.151792068049035},
    {0.5, 0.149585839102762},     {0.525, 0.147448032960041}, {0.55, 0.145374234797706},  {0.575, 0.143360489019345},
    {0.6, 0.141403234168786},     {0.625, 0.139499249352213}};
const std::vector<Point> kFig5Lower = {{0.000001, 1.13018939439675}, {0.025, 0.885397281880118},
                                       {0.1, 0.767010883354394},     {0.5, 0.572652947048029},
                                       {0.6, 0.545345549222892},     {0.625, 0.539038681188981}};
const std::vector<Point> kFig5Upper = {{0.000001, 1.15099157861911}, {0.025, 1.52377842902634},
                                       {0.05, 1.65760639905956},     {0.1, 1.85284650651488},
                                       {0.5, 2.79500807361437}};
const std::vector<Point> kFig6Value = {
    {0.00893212311126738, 0.232867370751838}, {0.0414599533993498, 0.232866220306548},
    {0.0893276984221259, 0.232861829497781},  {0.152781418451972, 0.232851057083638},
    {0.192518305771818, 0.232841440053187},   {0.242609835560409, 0.232826171574312},
    {0.300000112827751, 0.232804375008439},   {0.350133850844845, 0.232781583600709},
    {0.400000000048371, 0.23275545488356},    {0.464836614589025, 0.232716343036345},
    {0.504629778154618, 0.232689472961664},   {0.564542335424184, 0.23264492626242},
    {0.632054272689476, 0.232588869959545}};
const std::vector<Point> kFig6Lower = {{0.00893212311126738, 1.13947859334401},
                                       {0.0414599533993498, 1.1357666405696},
                                       {0.0893276984221259, 1.13019028140108},
                                       {0.152781418451972, 1.12294120983937},
                                       {0.632054272689476, 1.07060354773639}};
const std::vector<Point> kFig6Upper = {{0.00893212311126738, 1.14155859336817},
                                       {0.0414599533993498, 1.14542126321179},
                                       {0.0893276984221259, 1.15099129268048},
                                       {0.152781418451972, 1.15851652462865}};
const std::vector<Point> kFig7Value = {
    {0.0000001, 0.232867426685655}, {0.025, 0.232767217573785}, {0.05, 0.232454437077106},  {0.075, 0.231912649361208},
    {0.1, 0.231128716896055},       {0.125, 0.230093850027199}, {0.15, 0.228804422945915},  {0.175, 0.227262418099941},
    {0.2, 0.225475413631427},       {0.225, 0.223456107001674}, {0.25, 0.221221450009721},  {0.275, 0.218791531519473},
    {0.3, 0.216188368801758},       {0.325, 0.213434755329412}, {0.35, 0.210553273318428},  {0.375, 0.207565529648726},
    {0.4, 0.204491628307028},       {0.425, 0.201349859430824}, {0.45, 0.198156566440207},  {0.475, 0.194926146475263},
    {0.5, 0.191671141508639},       {0.525, 0.188402384203394}, {0.55, 0.185129170872616},  {0.575, 0.181859441906339},
    {0.6, 0.178599956823331},       {0.625, 0.175356456373894}};
const std::vector<Point> kFig7Lower = {{0.0000001, 1.14053419739797}, {0.025, 1.09075414115241},
                                       {0.05, 1.04156963966334},      {0.1, 0.945618493539192},
                                       {0.5, 0.375698081725486},      {0.625, 0.260956091372392}};
const std::vector<Point> kFig7Upper = {{0.0000001, 1.14053449739952}, {0.025, 1.16636790478205},
                                       {0.05, 1.19397319255645},      {0.1, 1.254745345361},
                                       {0.5, 1.98926005395037}};

Verdict criterion5() {
    const auto t0 = Clock::now();
    const fs::path dir = fs::temp_directory_path() / "momentdiv_acceptance_figures";
    fs::remove_all(dir);
    Checker check;
    for (const auto& f : reproduce_figures(g(), dir.string()))
        check(f.error.empty(), f.name + ".csv written (" + std::to_string(f.rows) + " rows)" +
                                   (f.error.empty() ? "" : ": " + f.error));

    const struct {
        const char* name;
        const std::vector<Point>* points;
        std::size_t col;
        const char* label;
    } series[] = {{"fig5", &kFig5Value, 2, "value"},   {"fig5", &kFig5Lower, 3, "x_lower"},
                  {"fig5", &kFig5Upper, 4, "x_upper"}, {"fig6", &kFig6Value, 2, "value"},
                  {"fig6", &kFig6Lower, 3, "x_lower"}, {"fig6", &kFig6Upper, 4, "x_upper"},
                  {"fig7", &kFig7Value, 2, "value"},   {"fig7", &kFig7Lower, 3, "x_lower"},
                  {"fig7", &kFig7Upper, 4, "x_upper"}};
    std::map<std::string, Table> tables;
    std::map<std::string, int> sampled;
    for (const auto& s : series) {
        if (!tables.count(s.name)) tables[s.name] = read_csv(dir / (std::string(s.name) + ".csv"));
        double worst = 0.0, worst_key = 0.0;
        bool present = true;
        for (const auto& p : *s.points) {
            const double v = find(tables[s.name], p.key, s.col);
            if (std::isnan(v)) present = false;
            else if (rel(v, p.value) > worst) {
                worst = rel(v, p.value);
                worst_key = p.key;
            }
        }
        sampled[s.name] += static_cast<int>(s.points->size());
        check(present && worst <= 1e-4, std::string(s.name) + " " + s.label + ": " + std::to_string(s.points->size()) +
                                            " coordinates" + (present ? "" : " (missing rows)") +
                                            fmt(", worst rel err %.2e at %g", worst, worst_key));
    }
    for (const auto& [name, n] : sampled) check(n >= 10, name + ": " + std::to_string(n) + " coordinates sampled (>= 10)");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    check(secs < 60.0, fmt("runtime %.3f s < 60 s", secs));
    return {check.ok(), check.counts()};
}

Verdict criterion6() {
    const auto t0 = Clock::now();
    std::vector<std::pair<std::string, BarrierPolicy>> policies;
    for (double c : {0.1, 0.6, 2.0}) policies.emplace_back(fmt("fixed cost c = %.1f", c), solve_fixed_cost(g(), c).policy);
    for (double k : {0.01, 0.5, 0.99}) policies.emplace_back(fmt("equilibrium k = %.2f", k), *solve_equilibrium(g(), k).policy);

    SimConfig cfg;
    cfg.n_paths = 200000;
    cfg.dt = 1e-3;
    cfg.seed = 20240601;
    Checker check;
    int inside = 0, total = 0;
    for (const auto& [label, p] : policies) {
        for (double x0 : {0.5, 1.0, p.x_upper}) {
            const auto c0 = Clock::now();
            const SimResult res = simulate_policy(g().model(), p, x0, cfg);
            const double J = value_J(g(), p, x0), R = value_R(g(), p, x0);
            const double zJ = (res.J.mean - J) / res.J.std_error;
            const double zR = (res.R.mean - R) / res.R.std_error;
            const bool ok = std::abs(zJ) <= 3.0 && std::abs(zR) <= 3.0;
            inside += (std::abs(zJ) <= 3.0) + (std::abs(zR) <= 3.0);
            total += 2;
            check(ok, label + fmt(", x0 = %.4f: J %.6f vs %.6f (z %+.2f), ", x0, res.J.mean, J, zJ) +
                          fmt("R %.6f vs %.6f (z %+.2f) [%.0f s]", res.R.mean, R, zR,
                              std::chrono::duration<double>(Clock::now() - c0).count()));
            std::fflush(stdout);
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    check(secs < 300.0, fmt("runtime %.1f s < 300 s", secs));
    return {check.ok(), std::to_string(inside) + "/" + std::to_string(total) + " estimates within 3 stderr; " +
                            check.counts()};
}

Verdict criterion7() {
    const auto t0 = Clock::now();
    const auto& G = g();
    const double xs = G.inflection();
    Checker check;

    // Smooth fit.
    double worst_fc = 0.0, worst_eq = 0.0;
    for (double c : {0.05, 0.1, 0.6, 2.0, 10.0}) worst_fc = std::max(worst_fc, solve_fixed_cost(G, c).residual);
    for (double k : {0.01, 0.25, 0.5, 0.99, 1.0})
        worst_eq = std::max(worst_eq, solve_equilibrium(G, k).smoothfit_residual);
    check(worst_fc <= 1e-8, fmt("fixed-cost smooth-fit residual %.2e <= 1e-8", worst_fc));
    check(worst_eq <= 1e-8, fmt("equilibrium smooth-fit residual %.2e <= 1e-8", worst_eq));
    double worst_pc = 0.0;
    for (double k : {0.1, 0.4, 0.8}) {
        const auto s = solve_precommitment(G, 1.0, k);
        worst_pc = std::max(worst_pc, solve_fixed_cost(G, s.c_star).residual);
    }
    check(worst_pc <= 1e-8, fmt("precommitment (Lagrangian) smooth-fit residual %.2e <= 1e-8", worst_pc));

    // R monotone in both barriers.
    bool lattice = true;
    const double lowers[] = {0.0, 0.1, 0.2, 0.3}, uppers[] = {0.5, 1.0, 1.5, 2.5, 4.0};
    for (double x : {0.2, 0.4})
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                const double r = value_R(G, {lowers[i], uppers[j]}, x);
                if (j > 0 && !(r < value_R(G, {lowers[i], uppers[j - 1]}, x))) lattice = false;
                if (i > 0 && !(r > value_R(G, {lowers[i - 1], uppers[j]}, x))) lattice = false;
            }
    check(lattice, "R decreasing in x_upper and increasing in x_lower on a 4 x 5 lattice");

    // Fixed-cost ladder.
    {
        bool mono = true, order = true;
        double lo = xs, hi = xs;
        for (double c : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
            const auto p = solve_fixed_cost(G, c).policy;
            mono = mono && p.x_lower < lo && p.x_upper > hi;
            order = order && p.x_lower < xs && xs < p.x_upper && p.x_upper > c;
            lo = p.x_lower;
            hi = p.x_upper;
        }
        check(mono, "fixed-cost barriers spread monotonically on c = 0.05 .. 1.6");
        check(order, "fixed-cost barriers straddle x* and x_upper > c");
        bool conv = true;
        double gap = 1e9, H1 = -1e9;
        for (double c : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const auto s = solve_fixed_cost(G, c);
            const double gp = std::max(xs - s.policy.x_lower, s.policy.x_upper - xs);
            const double h = s.value_at(1.0);
            conv = conv && gp < gap && h > H1 && h < value_U(G, 1.0);
            gap = gp;
            H1 = h;
        }
        check(conv && gap < 0.1, fmt("fixed-cost barriers -> x* and H(1) increases to U(1) as c -> 0 (gap %.3g)", gap));
    }

    // Precommitment ladder.
    {
        bool mono = true;
        double lo = 1e9, hi = 0.0;
        for (double k : {0.1, 0.2, 0.4, 0.8}) {
            const auto p = *solve_precommitment(G, 1.0, k).policy;
            mono = mono && p.x_lower < lo && p.x_upper > hi && p.x_lower < xs && xs < p.x_upper;
            lo = p.x_lower;
            hi = p.x_upper;
        }
        check(mono, "precommitment x_upper increasing, x_lower decreasing in k, straddling x*");
        bool conv = true;
        double V = 0.0;
        for (double k : {1e-1, 1e-2, 1e-3}) {
            const double v = solve_precommitment(G, 1.0, k).V;
            conv = conv && v > V && v < value_U(G, 1.0);
            V = v;
        }
        check(conv && value_U(G, 1.0) - V < 1e-3, fmt("precommitment V(1) increases to U(1) as k -> 0 (gap %.2e)",
                                                      value_U(G, 1.0) - V));
    }

    // Equilibrium ladder.
    {
        bool mono = true;
        double lo = -1.0, hi = 1e9, v = -1.0;
        for (double k : {0.5, 0.25, 0.1, 0.01}) {
            const auto s = solve_equilibrium(G, k);
            const auto& p = *s.policy;
            const double e = equilibrium_value(G, s, 1.0);
            mono = mono && p.x_lower > lo && p.x_upper < hi && p.x_lower < xs && xs < p.x_upper && e > v;
            lo = p.x_lower;
            hi = p.x_upper;
            v = e;
        }
        check(mono, "equilibrium barriers -> x* and value at 1 increases on k = 0.5 .. 0.01");
        check(solve_equilibrium(G, 1.0).policy->x_lower == 0.0 && solve_equilibrium(G, 0.99).policy->x_lower > 0.0,
              "equilibrium x_lower = 0 at k = 1 and > 0 below");
    }

    // Certificate.
    {
        const auto grid = uniform_grid(5.0, 400);
        const auto sol = solve_equilibrium(G, 0.5);
        const auto cert = verify_equilibrium(G, sol, grid);
        check(cert.eq1.passed && cert.eq2.passed && cert.eq3.passed,
              fmt("certificate for k = 0.5 passes (EqI %.1e, EqII' %.1e, EqIII %.1e)", cert.eq1.worst, cert.eq2.worst,
                  cert.eq3.worst));
        const BarrierPolicy bent{sol.policy->x_lower, sol.policy->x_upper + 0.3};
        const auto bad = verify_equilibrium(G, 0.5, bent, grid);
        check(!bad.eq2.passed && !bad.passed(),
              fmt("certificate for the perturbed policy fails EqII' (worst %.3g at x = %.4f)", bad.eq2.worst,
                  bad.eq2.witness_x));
    }

    // Normalization invariance on both representations.
    {
        DiffusionModel general = example_model();
        general.kind = ModelKind::general;
        double worst = 0.0;
        for (const DiffusionModel& m : {example_model(), general}) {
            const auto one = m.kind == ModelKind::general ? solve_canonical_grid(m, 10.0, 1.0) : solve_canonical(m, 10.0, 1.0);
            const auto seven = m.kind == ModelKind::general ? solve_canonical_grid(m, 10.0, 7.0) : solve_canonical(m, 10.0, 7.0);
            auto cmp = [&](const BarrierPolicy& a, const BarrierPolicy& b) {
                worst = std::max({worst, std::abs(a.x_lower - b.x_lower), std::abs(a.x_upper - b.x_upper)});
            };
            worst = std::max(worst, std::abs(one.inflection() - seven.inflection()));
            for (double c : {0.1, 0.6, 2.0}) cmp(solve_fixed_cost(one, c).policy, solve_fixed_cost(seven, c).policy);
            for (double k : {0.01, 0.5, 0.99}) cmp(*solve_equilibrium(one, k).policy, *solve_equilibrium(seven, k).policy);
            for (double k : {0.4, 0.8})
                cmp(*solve_precommitment(one, 1.0, k).policy, *solve_precommitment(seven, 1.0, k).policy);
            for (double x : {0.5, 1.0, 3.0}) {
                const BarrierPolicy p{0.3757, 1.9893};
                worst = std::max({worst, std::abs(value_J(one, p, x) - value_J(seven, p, x)),
                                  std::abs(value_R(one, p, x) - value_R(seven, p, x)),
                                  std::abs(value_U(one, x) - value_U(seven, x))});
            }
        }
        check(worst <= kTolRoot, fmt("normalization g'(0) = 1 vs 7: worst barrier/value change %.2e <= 1e-10", worst));
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    check(secs < 120.0, fmt("runtime %.3f s < 120 s", secs));
    return {check.ok(), check.counts()};
}

Verdict criterion8() {
    Checker check;
    const auto cert = verify_equilibrium(g(), solve_equilibrium(g(), 0.5), uniform_grid(5.0, 400));
    const auto j = nlohmann::json::parse(cert.to_json());
    const std::string note = j.value("note", "");
    check(!note.empty(), "certificate output carries a note");
    check(note.find("liminf") != std::string::npos, "note declares the liminf form as not checked directly");
    check(note.find("strong") != std::string::npos, "note declares the strong-equilibrium property as not checked");
    check(note.find("sufficient condition") != std::string::npos, "note names the sufficient generator condition");
    std::printf("  note: %s\n", note.c_str());
    return {check.ok(), check.counts()};
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8};
    std::vector<int> which;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
            return 64;
        }
        which.push_back(n);
    } else {
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
    }
    bool all = true;
    for (int n : which) {
        std::printf("criterion %d\n", n);
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[n - 1]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("criterion %d: %s (%s; %.3f s)\n", n, v.ok ? "PASS" : "FAIL", v.summary.c_str(), secs);
        all = all && v.ok;
    }
    return all ? 0 : 1;
}
