#include "momentdiv/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace momentdiv {

namespace {

// Finite-difference quotients above this are treated as a Lipschitz failure.
constexpr double kLipschitzCap = 1e6;

Expression coefficient_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("model document lacks key '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_number()) return Expression::constant(v.get<double>());
    if (v.is_string()) return Expression::parse(v.get<std::string>());
    throw ConfigError(std::string("model key '") + key + "' must be a number or an expression string");
}

void add_violation(ValidationReport& rep, int assumption, double x, double magnitude, std::string msg) {
    if (rep.violations.empty() || magnitude > rep.worst_magnitude) {
        rep.worst_x = x;
        rep.worst_magnitude = magnitude;
        rep.worst_assumption = assumption;
    }
    rep.violations.push_back({assumption, x, magnitude, std::move(msg)});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

DiffusionModel DiffusionModel::wiener_drift(double mu, double sigma2, double r) {
    DiffusionModel m;
    m.mu = Expression::constant(mu);
    m.sigma = Expression::constant(std::sqrt(sigma2));
    m.r = r;
    m.kind = ModelKind::wiener_drift;
    return m;
}

DiffusionModel DiffusionModel::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("model document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("model document must be a JSON object");

    DiffusionModel m;
    m.mu = coefficient_from_json(j, "mu");
    m.sigma = coefficient_from_json(j, "sigma");
    if (!j.contains("r") || !j.at("r").is_number()) throw ConfigError("model key 'r' must be a number");
    m.r = j.at("r").get<double>();

    const std::string kind = j.value("kind", std::string("general"));
    if (kind == "general") m.kind = ModelKind::general;
    else if (kind == "wiener-drift") m.kind = ModelKind::wiener_drift;
    else throw ConfigError("unknown model kind '" + kind + "'");
    return m;
}

DiffusionModel DiffusionModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string DiffusionModel::to_json() const {
    nlohmann::ordered_json j;
    j["mu"] = mu.source();
    j["sigma"] = sigma.source();
    j["r"] = r;
    j["kind"] = kind == ModelKind::wiener_drift ? "wiener-drift" : "general";
    return j.dump();
}

std::uint64_t DiffusionModel::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : to_json()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    auto flag = [](bool b) { return b ? "pass" : "FAIL"; };
    os << "model validation on [0, " << x_max << "] with " << n_grid << " points\n"
       << "  A.1 smoothness/Lipschitz: " << flag(a1) << "\n"
       << "  A.2 sigma^2 > 0:          " << flag(a2) << "\n"
       << "  A.3 mu' < r:              " << flag(a3) << "\n"
       << "  A.4 mu' <= r - eps:       " << flag(a4) << "\n"
       << "  A.5 mu(0) > 0:            " << flag(a5) << "\n";
    if (!kind_consistent) os << "  kind: wiener-drift model with non-constant coefficients\n";
    if (!r_positive) os << "  r must be positive\n";
    if (!violations.empty()) {
        os << "  worst violation: A." << worst_assumption << " at x = " << worst_x << " (magnitude "
           << worst_magnitude << ")\n";
        constexpr std::size_t kMaxListed = 20;
        for (std::size_t i = 0; i < violations.size() && i < kMaxListed; ++i) {
            os << "    A." << violations[i].assumption << " x=" << violations[i].x << ": " << violations[i].message
               << "\n";
        }
        if (violations.size() > kMaxListed) os << "    ... " << violations.size() - kMaxListed << " more\n";
    }
    return os.str();
}

ModelValidationError::ModelValidationError(ValidationReport report)
    : Error("model failed assumption checks:\n" + report.summary()), report_(std::move(report)) {}

ValidationReport validate_model(const DiffusionModel& m, double x_max, int n_grid) {
    if (!(x_max > 0.0) || n_grid < 2) throw ConfigError("validate_model needs x_max > 0 and n_grid >= 2");

    ValidationReport rep;
    rep.x_max = x_max;
    rep.n_grid = n_grid;

    if (!(m.r > 0.0) || !std::isfinite(m.r)) {
        rep.r_positive = false;
        add_violation(rep, 3, 0.0, std::abs(m.r), "discount rate r = " + fmt(m.r) + " is not positive");
    }
    if (m.kind == ModelKind::wiener_drift &&
        (m.mu.kind() != Expression::Kind::constant || m.sigma.kind() != Expression::Kind::constant)) {
        rep.kind_consistent = false;
        add_violation(rep, 1, 0.0, 0.0, "kind wiener-drift requires constant mu and sigma");
    }

    const double h = x_max / (10.0 * n_grid);
    const double eps0 = 1e-6 * m.r;
    const double spacing = x_max / (n_grid - 1);

    // Derivative by central differences, second-order one-sided at the left edge.
    auto derivative = [h](const Expression& f, double x) {
        if (x - h < 0.0) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
        return (f(x + h) - f(x - h)) / (2.0 * h);
    };

    double prev_dmu = 0.0, prev_dsigma = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n_grid; ++i) {
        const double x = i * spacing;
        double mu_x, sigma_x, dmu, dsigma;
        try {
            mu_x = m.mu(x);
            sigma_x = m.sigma(x);
            dmu = derivative(m.mu, x);
            dsigma = derivative(m.sigma, x);
        } catch (const EvalError& e) {
            rep.a1 = false;
            add_violation(rep, 1, x, 0.0, std::string("coefficient evaluation failed: ") + e.what());
            have_prev = false;
            continue;
        }

        if (std::abs(dmu) > kLipschitzCap || std::abs(dsigma) > kLipschitzCap) {
            rep.a1 = false;
            add_violation(rep, 1, x, std::max(std::abs(dmu), std::abs(dsigma)),
                          "difference quotient exceeds Lipschitz cap");
        }
        if (have_prev) {
            const double l2 = std::max(std::abs(dmu - prev_dmu), std::abs(dsigma - prev_dsigma)) / spacing;
            if (l2 > kLipschitzCap) {
                rep.a1 = false;
                add_violation(rep, 1, x, l2, "derivative difference quotient exceeds Lipschitz cap");
            }
        }
        prev_dmu = dmu;
        prev_dsigma = dsigma;
        have_prev = true;

        if (!(sigma_x * sigma_x > 0.0)) {
            rep.a2 = false;
            add_violation(rep, 2, x, 0.0, "sigma^2 = " + fmt(sigma_x * sigma_x) + " is not positive");
        }
        if (!(dmu < m.r)) {
            rep.a3 = false;
            add_violation(rep, 3, x, dmu - m.r, "mu' = " + fmt(dmu) + " >= r");
        }
        if (!(dmu <= m.r - eps0)) {
            rep.a4 = false;
            add_violation(rep, 4, x, dmu - (m.r - eps0), "mu' = " + fmt(dmu) + " > r - eps");
        }
        if (i == 0 && !(mu_x > 0.0)) {
            rep.a5 = false;
            add_violation(rep, 5, 0.0, -mu_x, "mu(0) = " + fmt(mu_x) + " is not positive");
        }
    }
    return rep;
}

void require_valid(const DiffusionModel& m) {
    ValidationReport rep = validate_model(m);
    if (!rep.ok()) throw ModelValidationError(std::move(rep));
}

}  // namespace momentdiv
