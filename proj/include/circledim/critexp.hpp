#pragma once

#include <optional>
#include <span>
#include <vector>

#include "circledim/words.hpp"

namespace circledim::critexp {

// counts[n] = number of words g in the enumerated ball whose certified
// derivative lower bound satisfies  inf log2 g' >= -n  on B(x, eps) for
// some base point x. Lower bounds come from maps::log2_deriv_range, so
// counts are certified undercounts.
struct CountTable {
    std::vector<double> base_points;
    double eps = 0.0;
    int max_len = 0;
    std::optional<double> distortion_cap; // certified kappa-tilde cap when set
    std::vector<long long> counts;        // cumulative, index n = 0..n_max
    long long total_words = 0;

    long long at(int n) const {
        if (n < 0) return 0;
        if (counts.empty()) return 0;
        return counts[static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(n), counts.size() - 1))];
    }
};

struct CountOptions {
    long long cap = 4'000'000;
    int n_max = 512;
    int letter_grid = 96; // grid for widened per-letter ranges (blend letters)
};

CountTable count_by_conorm(const words::Alphabet& alpha, std::span<const double> base_points,
                           double eps, int L, const CountOptions& opt,
                           std::optional<double> distortion_cap = std::nullopt);

struct DeltaFit {
    double delta = 0.0;
    int n_lo = 0;
    int n_hi = 0;
    double slope_first_half = 0.0;
    double slope_second_half = 0.0;
    double fit_residual = 0.0;
    bool subexponential = false;
};

DeltaFit delta_fit(const CountTable& table, int n_lo, int n_hi);
DeltaFit delta_fit_counts(const std::vector<long long>& counts, int n_lo, int n_hi);

// Partial Poincare sums  S_l(s) = sum_{|g| <= l} g'(x)^s, l = 0..L.
struct SeriesTable {
    double x = 0.0;
    std::vector<double> s_values;
    std::vector<std::vector<double>> partial_sums; // [s][l], l = 0..max_len
    std::vector<std::vector<double>> sphere_sums;  // per-sphere terms, same shape
    int max_len = 0;
};

SeriesTable poincare_partial(const words::Alphabet& alpha, double x, std::span<const double> s_values,
                             int L, long long cap);

struct ExponentBracket {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;
};

// Classifies each s as diverging/converging from the tail of the sphere
// sums over the last quarter of the table (fitted term-decay exponent vs 1)
// and returns the bracket between the regimes.
ExponentBracket convergence_exponent(const SeriesTable& series);

// Tail-decay exponent p of the sphere sums a_l ~ l^-p for one s column.
double tail_decay_exponent(const SeriesTable& series, std::size_t s_index);

} // namespace circledim::critexp
