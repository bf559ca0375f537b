#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "momentdiv/error.hpp"
#include "momentdiv/expression.hpp"

namespace momentdiv {

enum class ModelKind { general, wiener_drift };

/// Uncontrolled surplus dynamics dX = mu(X) dt + sigma(X) dW, discounted at r.
struct DiffusionModel {
    Expression mu = Expression::constant(0.0);
    Expression sigma = Expression::constant(0.0);
    double r = 0.0;
    ModelKind kind = ModelKind::general;

    /// Brownian motion with constant drift and volatility.
    static DiffusionModel wiener_drift(double mu, double sigma2, double r);

    /// Parses a model document: {"mu": <expr|number>, "sigma": <expr|number>,
    /// "r": <number>, "kind": "general"|"wiener-drift"}. `kind` is optional and
    /// defaults to "general".
    static DiffusionModel from_json(std::string_view text);
    static DiffusionModel load(const std::string& path);

    std::string to_json() const;

    /// FNV-1a hash of to_json(); stable across platforms.
    std::uint64_t hash() const;
};

/// Assumption check on a uniform grid. Flags are indexed A.1 .. A.5.
struct ValidationReport {
    struct Violation {
        int assumption = 0;  // 1..5
        double x = 0.0;
        double magnitude = 0.0;
        std::string message;
    };

    bool a1 = true;  // evaluable, C^1 and Lipschitz on the grid (finite-difference proxy)
    bool a2 = true;  // sigma^2 > 0
    bool a3 = true;  // mu' < r
    bool a4 = true;  // mu' <= r - eps0 uniformly
    bool a5 = true;  // mu(0) > 0
    bool kind_consistent = true;  // wiener-drift models have constant coefficients
    bool r_positive = true;

    double worst_x = 0.0;
    double worst_magnitude = 0.0;
    int worst_assumption = 0;
    double x_max = 0.0;
    int n_grid = 0;
    std::vector<Violation> violations;

    bool ok() const noexcept { return a1 && a2 && a3 && a4 && a5 && kind_consistent && r_positive; }
    std::string summary() const;
};

/// Raised by every solver entry point when the model fails validation.
class ModelValidationError : public Error {
public:
    explicit ModelValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

inline constexpr double kDefaultGridMax = 10.0;
inline constexpr int kDefaultGridPoints = 4001;

ValidationReport validate_model(const DiffusionModel& m, double x_max = kDefaultGridMax,
                                int n_grid = kDefaultGridPoints);

/// Throws ModelValidationError when validate_model fails.
void require_valid(const DiffusionModel& m);

}  // namespace momentdiv
