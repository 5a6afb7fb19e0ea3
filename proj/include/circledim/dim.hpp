#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circledim/walk.hpp"

namespace circledim::dim {

struct DimEstimate {
    double value = 0.0;
    int level_lo = 0;
    int level_hi = 0;
    double fit_residual = 0.0;
    std::string method;
};

// Least-squares slope of log2 N(2^-n) vs n over dyadic levels
// [level_lo, level_hi], N = number of occupied dyadic cells.
DimEstimate box_dim(std::span<const double> points, int level_lo, int level_hi);

// Same with the dyadic entropy H(nu, D_n) in place of log2 N.
DimEstimate entropy_dim(const walk::EmpiricalMeasure& nu, int level_lo, int level_hi);

// Raw (level, value) table behind the fits: occupied-cell counts for "box",
// dyadic entropies for "entropy".
std::vector<std::pair<int, double>> dyadic_profile(const walk::EmpiricalMeasure& nu, int level_lo,
                                                   int level_hi, const std::string& method);

// Unique s with sum r_i^s = 1, bisected to 1e-12.
double moran_dim(std::span<const double> ratios);

// Branch interface for the transfer-operator oracle; kept separate from
// CircleMap so exactly affine test branches can drive the same solver.
struct PressureBranch {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
};

// allowed[i][j]: branch i may be applied to points of arc j. Empty matrix
// means the full shift. Root of spectral-radius(L_s) = 1 bisected to 1e-6;
// the weighted operator uses |g_i'|^s on a grid over the arcs.
double pressure_root(const std::vector<PressureBranch>& branches, const std::vector<Arc>& arcs,
                     const std::vector<std::vector<int>>& allowed, int grid_per_arc);

DimEstimate pressure_dim(const std::vector<maps::CircleMap>& contractions, const std::vector<Arc>& arcs,
                         const std::vector<std::vector<int>>& allowed = {}, int grid_per_arc = 64);

struct DimFormulaRecord {
    double h_rw = 0.0;
    double lyap = 0.0;
    double predicted_dim = 0.0; // h_rw / |lyap|
    double measured_dim = 0.0;
    double gap = 0.0;
};

struct DimFormulaParams {
    double x0 = 0.1;
    int lyap_n = 400;
    int lyap_trials = 64;
    int burn = 600;
    int sample_count = 60000;
    int chains = 16;
    int level_lo = 4;
    int level_hi = 12;
    int entropy_n = 6;
    int entropy_resolution = 16;
    long long entropy_cap = 1 << 22;
    std::uint64_t seed = 1;
};

DimFormulaRecord dim_formula_check(const walk::WalkMeasure& mu, const DimFormulaParams& p);

} // namespace circledim::dim
