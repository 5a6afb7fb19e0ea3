#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circledim/fuchsian.hpp"
#include "circledim/hyperbolic.hpp"
#include "circledim/walk.hpp"

namespace circledim::fixtures {

// A named constructed system plus the auxiliary data experiments need.
struct Fixture {
    std::string name;
    words::Alphabet counting_alphabet; // group/semigroup view for word balls
    walk::WalkMeasure walk;            // step distribution for Monte Carlo ops
    std::vector<Arc> ifs_arcs;         // invariant arcs, when meaningful
    std::vector<double> base_points;   // sample of the minimal set
    std::optional<hyperbolic::ConeSet> cones;
    std::optional<fuchsian::FuchsianSystem> fuch;
    double lambda_hint = 0.0;                     // per-letter log2 rate on the arcs
    std::vector<std::vector<int>> pressure_allowed; // Markov adjacency for pressure_dim
    std::vector<maps::CircleMap> pressure_maps;
    std::vector<Arc> pressure_arcs;
    double wandering_point = 0.0; // base point for Poincare series experiments
    nlohmann::json meta;
};

std::vector<std::string> fixture_names();

// Throws UnknownFixture for names outside the registry. `params` may carry
// fixture-specific knobs (e.g. {"k": 2} for solvable-2k).
Fixture make_fixture(const std::string& name, const nlohmann::json& params);

// Conjugate every generator (and derived data) by `by`.
Fixture conjugate_fixture(const Fixture& f, const maps::CircleMap& by);

} // namespace circledim::fixtures
