#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "momentdiv/canonical.hpp"
#include "momentdiv/values.hpp"

namespace momentdiv {

struct SimConfig {
    double dt = 1e-3;
    /// Truncation time; 0 selects the default 100/r. Must be at least 100/r.
    double t_horizon = 0.0;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
    /// Pair path 2i with the sign-flipped normals of path 2i+1; needs an even path count.
    bool antithetic = false;
    /// Brownian-bridge crossing probabilities between grid times for the
    /// dividend barrier and for ruin. Off means grid-time detection only.
    bool bridge_correction = true;

    /// Throws ConfigError on invalid settings; r is the model discount rate.
    void validate(double r) const;
    double horizon(double r) const { return t_horizon > 0.0 ? t_horizon : 100.0 / r; }
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct SimResult {
    MCEstimate J;
    MCEstimate R;
    double mean_steps = 0.0;  // Euler steps per path before ruin or truncation
};

/// Euler-Maruyama simulation of the surplus under a barrier policy, absorbed
/// at 0 and truncated at the horizon. Each path draws from its own
/// xoshiro256++ stream keyed by (seed, path index), so results do not depend
/// on the thread count. Does not validate the model's diffusion assumptions,
/// so degenerate (sigma = 0) models can be simulated.
SimResult simulate_policy(const DiffusionModel& m, const BarrierPolicy& p, double x0, const SimConfig& cfg);

/// Events of one path, for inspection and testing.
struct PathTrace {
    std::vector<double> dividend_times;
    std::vector<double> dividend_sizes;
    double ruin_time = std::numeric_limits<double>::infinity();
    double J = 0.0;
    double R = 0.0;
};
PathTrace simulate_path(const DiffusionModel& m, const BarrierPolicy& p, double x0, const SimConfig& cfg,
                        std::uint64_t path_index);

struct ConvergenceRow {
    double dt = 0.0;
    SimResult estimate;
    double bias_J = 0.0;  // estimate minus closed form
    double bias_R = 0.0;
};

/// simulate_policy for each dt (strictly decreasing), compared with the closed forms.
std::vector<ConvergenceRow> convergence_sweep(const CanonicalSolution& g, const BarrierPolicy& p, double x0,
                                              const std::vector<double>& dt_list, const SimConfig& cfg);

}  // namespace momentdiv
