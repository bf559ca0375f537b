#pragma once

#include <string>
#include <vector>

#include "momentdiv/canonical.hpp"

namespace momentdiv {

/// Brownian motion with drift 0.06, variance 0.03 and discount rate 0.02.
DiffusionModel example_model();

/// k values of the precommitment sensitivity sweep (fig6.csv).
const std::vector<double>& fig6_k_values();

struct FigureFile {
    std::string name;  // "fig1" .. "fig7"
    std::string path;
    std::size_t rows = 0;
    std::string error;  // empty on success
};

/// Writes fig1.csv .. fig7.csv into out_dir (created if missing). A failure
/// in one figure is recorded in its FigureFile and does not stop the others.
///
///   fig1  x,g,dg,d2g                          g on [0, 5]
///   fig2  c,x_lower,x_upper,x,H               fixed-cost values, c in {0.1, 0.6, 2.0}
///   fig3  k,x0,c_star,x_lower,x_upper,V       precommitment value, k in {0.4, 0.8}
///   fig4  k,x_lower,x_upper,x,J               equilibrium values, k in {0.01, 0.5, 0.99}
///   fig5  c,x,value,x_lower,x_upper,U,x_star  fixed-cost sensitivity at x = 0.025
///   fig6  k,x0,value,x_lower,x_upper,U,x_star precommitment sensitivity at x0 = 0.025
///   fig7  k,x,value,x_lower,x_upper,U,x_star  equilibrium sensitivity at x = 0.025
std::vector<FigureFile> reproduce_figures(const CanonicalSolution& g, const std::string& out_dir);
std::vector<FigureFile> reproduce_figures(const std::string& out_dir);

}  // namespace momentdiv
