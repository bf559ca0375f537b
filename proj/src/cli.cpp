#include "momentdiv/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "momentdiv/equilibrium.hpp"
#include "momentdiv/figures.hpp"
#include "momentdiv/fixed_cost.hpp"
#include "momentdiv/parallel.hpp"
#include "momentdiv/precommitment.hpp"
#include "momentdiv/simulate.hpp"

namespace momentdiv {

namespace {

// Model loading failures map to the validation exit code.
struct ModelLoadError : Error {
    using Error::Error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string policy_text(const BarrierPolicy& p) { return "(" + fixed4(p.x_lower) + ", " + fixed4(p.x_upper) + ")"; }

std::vector<double> parse_sweep(const std::string& spec) {
    double a, b;
    long n;
    char tail;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%ld%c", &a, &b, &n, &tail) != 3 || n < 1) {
        throw ConfigError("sweep '" + spec + "' must have the form a:b:n with n >= 1");
    }
    std::vector<double> v(n);
    for (long i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

BarrierPolicy parse_policy(const std::string& text) {
    double lo, hi;
    char tail;
    if (std::sscanf(text.c_str(), "%lf,%lf%c", &lo, &hi, &tail) != 2) {
        throw ConfigError("policy '" + text + "' must have the form x_lower,x_upper");
    }
    BarrierPolicy p{lo, hi};
    p.validate();
    return p;
}

struct Common {
    std::string model_path;
    std::string out_path;
};

DiffusionModel load_model(const Common& c) {
    if (c.model_path.empty()) return example_model();
    try {
        return DiffusionModel::load(c.model_path);
    } catch (const ConfigError& e) {
        throw ModelLoadError(e.what());
    } catch (const ParseError& e) {
        throw ModelLoadError(std::string("coefficient expression: ") + e.what());
    }
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Writes `content` to `path` and the run manifest next to it.
void write_output(const std::string& path, const std::string& content, const CLI::App& sub,
                  const DiffusionModel& model, double wall_seconds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    out << content;
    out.close();

    nlohmann::ordered_json flags = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->count() == 0 || opt->get_name() == "--help") continue;
        const auto& res = opt->results();
        flags[opt->get_name()] = res.size() == 1 ? nlohmann::ordered_json(res[0]) : nlohmann::ordered_json(res);
    }
    nlohmann::ordered_json m;
    m["subcommand"] = sub.get_name();
    m["flags"] = flags;
    m["model"] = nlohmann::ordered_json::parse(model.to_json());
    m["model_hash"] = hex(model.hash());
    m["tool_version"] = kVersion;
    m["wall_time_s"] = wall_seconds;
    m["output"] = path;
    std::ofstream man(path + ".manifest.json", std::ios::binary);
    if (!man) throw ConfigError("cannot write manifest '" + path + ".manifest.json'");
    man << m.dump(2) << '\n';
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dividends under a moment constraint on the discounted number of payments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", common.model_path, "model JSON file (default: built-in example)");
        sub->add_option("--out", common.out_path, "CSV/JSON output path; a .manifest.json is written next to it");
    };

    // value
    std::string v_policy;
    std::optional<double> v_x, v_c;
    std::string v_sweep;
    auto* value = app.add_subcommand("value", "evaluate J, R, U (and H with --c) for a barrier policy");
    add_common(value);
    value->add_option("--policy", v_policy, "x_lower,x_upper")->required();
    auto* v_x_opt = value->add_option("--x", v_x, "state");
    value->add_option("--sweep-x", v_sweep, "a:b:n")->excludes(v_x_opt);
    value->add_option("--c", v_c, "fixed cost for H");

    // fixed-cost
    std::optional<double> f_c;
    std::string f_sweep;
    double f_x0 = 0.025;
    bool f_threshold = false;
    auto* fixed = app.add_subcommand("fixed-cost", "solve the dividend problem with a fixed cost per payment");
    add_common(fixed);
    auto* f_c_opt = fixed->add_option("--c", f_c, "fixed cost");
    fixed->add_option("--sweep-c", f_sweep, "a:b:n")->excludes(f_c_opt);
    fixed->add_option("--x0", f_x0, "state at which H is reported")->capture_default_str();
    fixed->add_flag("--threshold", f_threshold, "also report the ruin cost threshold");

    // precommit
    std::optional<double> p_x0, p_k;
    std::string p_sweep_k, p_sweep_x0;
    auto* pre = app.add_subcommand("precommit", "precommitment solution for initial surplus x0");
    add_common(pre);
    auto* p_x0_opt = pre->add_option("--x0", p_x0, "initial surplus");
    auto* p_k_opt = pre->add_option("--k", p_k, "constraint parameter, R(x0) <= 1/k");
    pre->add_option("--sweep-k", p_sweep_k, "a:b:n")->excludes(p_k_opt);
    pre->add_option("--sweep-x0", p_sweep_x0, "a:b:n")->excludes(p_x0_opt);

    // equilibrium
    std::optional<double> e_k;
    std::string e_sweep;
    bool e_verify = false;
    double e_grid_max = 5.0;
    std::size_t e_grid_n = 400;
    auto* eq = app.add_subcommand("equilibrium", "time-consistent equilibrium barrier policy");
    add_common(eq);
    auto* e_k_opt = eq->add_option("--k", e_k, "constraint parameter");
    eq->add_option("--sweep-k", e_sweep, "a:b:n")->excludes(e_k_opt);
    eq->add_flag("--verify", e_verify, "check the equilibrium conditions and print the certificate");
    eq->add_option("--verify-max", e_grid_max, "certificate grid upper end")->capture_default_str();
    eq->add_option("--verify-points", e_grid_n, "certificate grid size")->capture_default_str();

    // simulate
    std::string s_policy;
    double s_x0 = 1.0;
    SimConfig s_cfg;
    bool s_no_bridge = false;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates of J and R for a barrier policy");
    add_common(sim);
    sim->add_option("--policy", s_policy, "x_lower,x_upper")->required();
    sim->add_option("--x0", s_x0, "initial surplus")->capture_default_str();
    sim->add_option("--dt", s_cfg.dt, "time step")->capture_default_str();
    sim->add_option("--paths", s_cfg.n_paths, "number of paths")->capture_default_str();
    sim->add_option("--seed", s_cfg.seed, "RNG seed")->capture_default_str();
    sim->add_option("--horizon", s_cfg.t_horizon, "truncation time (default 100/r)");
    sim->add_flag("--antithetic", s_cfg.antithetic, "antithetic normal pairs");
    sim->add_flag("--no-bridge", s_no_bridge, "detect crossings at grid times only");

    // figures
    std::string fig_dir = "figures";
    auto* figs = app.add_subcommand("figures", "write fig1.csv .. fig7.csv for the built-in example model");
    figs->add_option("--out-dir", fig_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, r;
        const int code = app.exit(e, o, r);
        out << o.str();
        err << r.str();
        if (code == 0) return kExitOk;
        if (!dynamic_cast<const CLI::CallForAllHelp*>(&e)) err << app.help();
        return kExitUsage;
    }

    const auto t0 = Clock::now();
    try {
        if (*figs) {
            const DiffusionModel m = example_model();
            const CanonicalSolution g = solve_canonical(m);
            int status = kExitOk;
            for (const FigureFile& f : reproduce_figures(g, fig_dir)) {
                if (!f.error.empty()) {
                    err << f.name << ": " << f.error << '\n';
                    status = kExitNumeric;
                    continue;
                }
                std::ifstream in(f.path, std::ios::binary);
                std::ostringstream content;
                content << in.rdbuf();
                write_output(f.path, content.str(), *figs, m, seconds_since(t0));
                out << f.path << " (" << f.rows << " rows)\n";
            }
            return status;
        }

        const DiffusionModel m = load_model(common);
        const CanonicalSolution g = solve_canonical(m);
        std::ostringstream csv;

        if (*value) {
            const BarrierPolicy p = parse_policy(v_policy);
            std::vector<double> xs;
            if (v_x) xs = {*v_x};
            else if (!v_sweep.empty()) xs = parse_sweep(v_sweep);
            else throw ConfigError("value needs --x or --sweep-x");
            if (v_c && !(*v_c > 0.0)) throw ConfigError("--c must be positive");
            csv << "x,J,R,H,U\n";
            for (double x : xs) {
                const double J = value_J(g, p, x), R = value_R(g, p, x), U = value_U(g, x);
                const double H = v_c ? value_H(g, *v_c, p, x) : std::nan("");
                csv << num(x) << ',' << num(J) << ',' << num(R) << ',' << (v_c ? num(H) : "") << ',' << num(U) << '\n';
                if (xs.size() == 1) {
                    out << "J " << num(J) << "\nR " << num(R) << '\n';
                    if (v_c) out << "H " << num(H) << '\n';
                    out << "U " << num(U) << '\n';
                }
            }
            if (xs.size() > 1 && common.out_path.empty()) out << csv.str();
        } else if (*fixed) {
            std::vector<double> cs;
            if (f_c) cs = {*f_c};
            else if (!f_sweep.empty()) cs = parse_sweep(f_sweep);
            else if (!f_threshold) throw ConfigError("fixed-cost needs --c, --sweep-c or --threshold");
            for (double c : cs) {
                if (!(c > 0.0)) throw ConfigError("fixed cost must be positive");
            }
            std::vector<std::optional<FixedCostSolution>> sols(cs.size());
            parallel_for(cs.size(), [&](std::size_t i) { sols[i] = solve_fixed_cost(g, cs[i]); });
            csv << "c,x_lower,x_upper,case,H_at_x0\n";
            for (const auto& s : sols) {
                csv << num(s->c) << ',' << num(s->policy.x_lower) << ',' << num(s->policy.x_upper) << ','
                    << to_string(s->kind) << ',' << num(s->value_at(f_x0)) << '\n';
                if (sols.size() == 1) {
                    out << "c " << num(s->c) << "\ncase " << to_string(s->kind) << "\npolicy "
                        << policy_text(s->policy) << "\nx_lower " << num(s->policy.x_lower) << "\nx_upper "
                        << num(s->policy.x_upper) << "\nresidual " << num(s->residual) << "\nH(" << num(f_x0)
                        << ") " << num(s->value_at(f_x0)) << '\n';
                }
            }
            if (sols.size() > 1 && common.out_path.empty()) out << csv.str();
            if (f_threshold) out << "ruin_cost_threshold " << num(ruin_cost_threshold(g)) << '\n';
        } else if (*pre) {
            std::vector<PrecommitmentRow> rows;
            if (!p_sweep_k.empty()) {
                if (!p_x0) throw ConfigError("--sweep-k needs --x0");
                rows = precommitment_sweep_k(g, *p_x0, parse_sweep(p_sweep_k));
            } else if (!p_sweep_x0.empty()) {
                if (!p_k) throw ConfigError("--sweep-x0 needs --k");
                rows = precommitment_sweep_x0(g, parse_sweep(p_sweep_x0), *p_k);
            } else {
                if (!p_x0 || !p_k) throw ConfigError("precommit needs --x0 and --k (or a sweep)");
                rows.push_back({*p_x0, *p_k, solve_precommitment(g, *p_x0, *p_k), {}});
            }
            csv << "x0,k,c_star,x_lower,x_upper,case,slack,V,constraint_residual,iterations,error\n";
            bool any_error = false;
            for (const auto& r : rows) {
                if (!r.solution) {
                    any_error = true;
                    csv << num(r.x0) << ',' << num(r.k) << ",,,,,,,,,\"" << r.error << "\"\n";
                    continue;
                }
                const auto& s = *r.solution;
                const BarrierPolicy p = s.policy.value_or(BarrierPolicy{});
                csv << num(s.x0) << ',' << num(s.k) << ',' << num(s.c_star) << ',' << num(p.x_lower) << ','
                    << num(p.x_upper) << ',' << (s.policy ? to_string(s.kind) : "none") << ','
                    << (s.slack ? "true" : "false") << ',' << num(s.V) << ',' << num(s.constraint_residual) << ','
                    << s.iterations << ",\n";
                if (rows.size() == 1) {
                    out << "x0 " << num(s.x0) << "\nk " << num(s.k) << "\nc_star " << num(s.c_star) << '\n';
                    if (s.policy) out << "policy " << policy_text(p) << '\n';
                    else out << "policy none (slack constraint, no dividends)\n";
                    out << "x_lower " << num(p.x_lower) << "\nx_upper " << num(p.x_upper) << "\nV " << num(s.V)
                        << "\nconstraint_residual " << num(s.constraint_residual) << '\n';
                }
            }
            if (rows.size() > 1 && common.out_path.empty()) out << csv.str();
            if (any_error) {
                if (!common.out_path.empty()) write_output(common.out_path, csv.str(), *pre, m, seconds_since(t0));
                err << "some rows failed; see the error column\n";
                return kExitNumeric;
            }
        } else if (*eq) {
            std::vector<double> ks;
            if (e_k) ks = {*e_k};
            else if (!e_sweep.empty()) ks = parse_sweep(e_sweep);
            else throw ConfigError("equilibrium needs --k or --sweep-k");
            for (double k : ks) {
                if (!(k > 0.0)) throw ConfigError("k must be positive");
            }
            std::vector<EquilibriumSolution> sols(ks.size());
            parallel_for(ks.size(), [&](std::size_t i) { sols[i] = solve_equilibrium(g, ks[i]); });
            csv << "k,x_lower,x_upper,residual_46,residual_42,smoothfit_residual,certificate\n";
            bool cert_failed = false;
            const auto grid = uniform_grid(e_grid_max, e_grid_n);
            for (const auto& s : sols) {
                std::string cert_state = "not-run";
                if (e_verify) {
                    const EquilibriumCertificate cert = verify_equilibrium(g, s, grid);
                    cert_state = cert.passed() ? "passed" : "failed";
                    cert_failed |= !cert.passed();
                    if (sols.size() == 1) out << cert.to_json() << '\n';
                }
                if (s.policy) {
                    csv << num(s.k) << ',' << num(s.policy->x_lower) << ',' << num(s.policy->x_upper) << ','
                        << num(s.residual_46) << ',' << num(s.residual_42) << ',' << num(s.smoothfit_residual) << ','
                        << cert_state << '\n';
                } else {
                    csv << num(s.k) << ",,,,,," << cert_state << '\n';
                }
                if (sols.size() == 1) {
                    if (s.policy) {
                        out << "k " << num(s.k) << "\npolicy " << policy_text(*s.policy) << "\nx_lower "
                            << num(s.policy->x_lower) << "\nx_upper " << num(s.policy->x_upper) << "\nresidual_46 "
                            << num(s.residual_46) << "\nresidual_42 " << num(s.residual_42)
                            << "\nsmoothfit_residual " << num(s.smoothfit_residual) << '\n';
                    } else {
                        out << "k " << num(s.k) << "\npolicy none (k > 1: no dividends)\n";
                    }
                }
            }
            if (sols.size() > 1 && common.out_path.empty()) out << csv.str();
            if (cert_failed) {
                if (!common.out_path.empty()) write_output(common.out_path, csv.str(), *eq, m, seconds_since(t0));
                err << "equilibrium certificate failed\n";
                return kExitNumeric;
            }
        } else if (*sim) {
            const BarrierPolicy p = parse_policy(s_policy);
            s_cfg.bridge_correction = !s_no_bridge;
            const SimResult res = simulate_policy(m, p, s_x0, s_cfg);
            auto est = [](const MCEstimate& e) {
                return nlohmann::ordered_json{
                    {"mean", e.mean}, {"stderr", e.std_error}, {"n_paths", e.n_paths}, {"seed", e.seed}};
            };
            nlohmann::ordered_json j;
            j["policy"] = {{"x_lower", p.x_lower}, {"x_upper", p.x_upper}};
            j["x0"] = s_x0;
            j["dt"] = s_cfg.dt;
            j["horizon"] = s_cfg.horizon(m.r);
            j["antithetic"] = s_cfg.antithetic;
            j["bridge_correction"] = s_cfg.bridge_correction;
            j["J"] = est(res.J);
            j["R"] = est(res.R);
            j["mean_steps"] = res.mean_steps;
            csv << j.dump(2) << '\n';
            out << csv.str();
        }

        if (!common.out_path.empty()) {
            CLI::App* sub = app.get_subcommands().front();
            write_output(common.out_path, csv.str(), *sub, m, seconds_since(t0));
        }
        return kExitOk;
    } catch (const ModelLoadError& e) {
        err << "model error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ModelValidationError& e) {
        err << e.report().summary();
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace momentdiv
