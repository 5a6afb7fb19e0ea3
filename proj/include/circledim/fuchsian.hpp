#pragma once

#include <span>
#include <vector>

#include "circledim/critexp.hpp"
#include "circledim/hyperbolic.hpp"

namespace circledim::fuchsian {

enum class Cover { projective, linear };

struct FuchsianSystem {
    std::vector<Mat2> matrices; // det = 1, hyperbolic for Schottky builders
    Cover cover = Cover::projective;
    words::Alphabet alphabet;      // group-mode alphabet of the induced maps
    std::vector<double> attractors; // circle points, one per generator
    std::vector<double> repellers;
};

// Generator i = R(pi * axis_i) diag(chi_i, 1/chi_i) R(-pi * axis_i); the
// plane rotation is half the circle angle because of the RP^1 double cover,
// so the attracting fixed point of generator i sits at circle point axis_i.
// For two generators the standard cones must certify; ConesOverlap otherwise.
FuchsianSystem schottky(std::span<const double> multipliers, std::span<const double> axis_angles,
                        Cover cover);

// Cones of the standard Schottky pingpong pair (2 generators).
hyperbolic::ConeSet standard_cones(const FuchsianSystem& sys);

// Counting table for the classical critical exponent:
// counts[n] = #{ g in the L-ball : ||g|| <= 2^(n/2) }.
critexp::CountTable classical_count(const FuchsianSystem& sys, int L, long long cap, int n_max);

// Images of the generator fixed points under all reduced words of length
// `depth`.
std::vector<double> limit_set_sample(const FuchsianSystem& sys, int depth, long long cap);

} // namespace circledim::fuchsian
