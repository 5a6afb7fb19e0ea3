#include "circledim/fixtures.hpp"

#include <cmath>

namespace circledim::fixtures {

using maps::CircleMap;

namespace {

// Uniform step distribution on the forward letters of an alphabet.
walk::WalkMeasure uniform_walk(const words::Alphabet& alpha) {
    walk::WalkMeasure mu;
    mu.alphabet = alpha;
    mu.weights.assign(alpha.generators.size(), 1.0 / static_cast<double>(alpha.generators.size()));
    return mu;
}

// Semigroup alphabet listing every group letter (generators and inverses)
// as its own generator, so sampled words keep unreduced composition order.
words::Alphabet group_letters_alphabet(const words::Alphabet& group_alpha) {
    words::Alphabet a;
    a.group_mode = false;
    a.declared_free = false;
    for (const auto& g : group_alpha.generators) a.generators.push_back(g);
    for (const auto& g : group_alpha.generators)
        a.generators.push_back({g.name + "^-1", g.map.inverse()});
    return a;
}

// Projective Mobius contraction with attractor at circle point `a` and
// attracting multiplier chi^-2.
CircleMap mobius_contraction(double chi, double a) {
    Mat2 r = Mat2::rotation(std::numbers::pi * a);
    return CircleMap::mobius_projective(r * Mat2::diag(chi, 1.0 / chi) *
                                        Mat2::rotation(-std::numbers::pi * a));
}

Fixture schottky2_fixture(fuchsian::Cover cover) {
    Fixture f;
    f.name = cover == fuchsian::Cover::projective ? "schottky2" : "schottky2-linear";
    const double axes[2] = {0.0, 0.25};
    const double chis[2] = {50.0, 50.0};
    f.fuch = fuchsian::schottky(chis, axes, cover);
    f.counting_alphabet = f.fuch->alphabet;
    f.walk = uniform_walk(group_letters_alphabet(f.counting_alphabet));
    f.cones = fuchsian::standard_cones(*f.fuch);

    if (cover == fuchsian::Cover::projective) {
        f.base_points = {0.0, 0.25, 0.5, 0.75};
        double rho = 1.0 / 16.0;
        f.pressure_arcs = {Arc::ball(0.0, rho), Arc::ball(0.5, rho), Arc::ball(0.25, rho),
                           Arc::ball(0.75, rho)};
        const auto& g1 = f.counting_alphabet.generators[0].map;
        const auto& g2 = f.counting_alphabet.generators[1].map;
        f.pressure_maps = {g1, g1.inverse(), g2, g2.inverse()};
        // branch b may not be applied on the arc holding its repeller
        f.pressure_allowed = {{1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}, {1, 1, 0, 1}};
    } else {
        f.base_points = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
    }
    f.wandering_point = 0.125; // between the cones, outside the limit set
    f.lambda_hint = -2.0 * std::log2(50.0);
    return f;
}

Fixture two_arc_fixture() {
    // Two flows of the field sin(4 pi x), one conjugated by a small rotation.
    // Both maps preserve each of the arcs around x = 1/4 and x = 3/4 and
    // contract into them, so the semigroup has two minimal sets.
    Fixture f;
    f.name = "two-arc-d2";
    CircleMap f1 = CircleMap::trig_flow(2, 0.5);
    CircleMap f2 = CircleMap::conjugate(CircleMap::trig_flow(2, 0.5), CircleMap::rotation(0.05));
    f.counting_alphabet.generators = {{"a", f1}, {"b", f2}};
    f.counting_alphabet.group_mode = false;
    f.counting_alphabet.declared_free = false;
    f.walk = uniform_walk(f.counting_alphabet);
    f.ifs_arcs = {Arc{0.15, 0.25}, Arc{0.65, 0.25}};
    f.base_points = {0.25, 0.75};
    return f;
}

Fixture linear_r2_fixture() {
    // Linear-cover pair whose second generator carries the -1 lift, so words
    // with an odd count of it swap the antipodal sheets: one minimal set,
    // two-point conditionals.
    Fixture f;
    f.name = "linear-r2";
    const double chi = 8.0;
    Mat2 r1 = Mat2::rotation(std::numbers::pi * 0.05);
    Mat2 r2 = Mat2::rotation(std::numbers::pi * 0.30);
    Mat2 g1 = r1 * Mat2::diag(chi, 1.0 / chi) * Mat2::rotation(-std::numbers::pi * 0.05);
    Mat2 g2 = -(r2 * Mat2::diag(chi, 1.0 / chi) * Mat2::rotation(-std::numbers::pi * 0.30));
    f.counting_alphabet.generators = {{"a", CircleMap::mobius_linear(g1)},
                                      {"b", CircleMap::mobius_linear(g2)}};
    f.counting_alphabet.group_mode = true;
    f.counting_alphabet.declared_free = false;
    f.walk = uniform_walk(group_letters_alphabet(f.counting_alphabet));
    f.base_points = {0.05, 0.55};
    return f;
}

Fixture parabolic_fixture(int k) {
    Fixture f;
    f.name = k == 1 ? "parabolic-k1" : "parabolic-k2";
    CircleMap g;
    if (k == 1) {
        g = CircleMap::parabolic_blend(1, 0.05);
        f.wandering_point = 0.9; // in the basin of the parabolic point at 0
    } else if (k == 2) {
        // multiplicity-3 tangency at 0: the blend composed with its
        // opposite-sign twin cancels the quadratic term
        double eps = 0.16;
        g = CircleMap::compose({CircleMap::parabolic_blend(1, eps), CircleMap::parabolic_blend(1, -eps)});
        f.wandering_point = 0.1;
    } else {
        throw UnknownFixture("parabolic fixture: k must be 1 or 2");
    }
    f.counting_alphabet.generators = {{"g", g}};
    f.counting_alphabet.group_mode = true;
    f.counting_alphabet.declared_free = false;
    f.walk = uniform_walk(f.counting_alphabet);
    f.meta["k"] = k;
    return f;
}

Fixture solvable_fixture(int k) {
    Fixture f;
    f.name = "solvable-2k";
    f.counting_alphabet.generators = {{"f", CircleMap::trig_flow(k, 1.0)},
                                      {"g", CircleMap::rotation(1.0 / (2.0 * k))}};
    f.counting_alphabet.group_mode = true;
    f.counting_alphabet.declared_free = false;
    f.walk = uniform_walk(group_letters_alphabet(f.counting_alphabet));
    f.meta["k"] = k;
    return f;
}

Fixture twoscale_fixture() {
    // Projective North-South map composed with a linear-cover map. The
    // composite fixes 0 and 1/2 with very different contraction rates
    // (chi_p^-2 chi_l^-2 vs chi_p^2 chi_l^-2), giving a 2-perfect pingpong
    // pair with a weak pair of attractors inside [1/2, 1/2 + beta].
    Fixture f;
    f.name = "twoscale-pingpong";
    // weak attracting rate 2^-2.5 at 1/2, strong rate 2^-16 at 0; the gap
    // between the per-point and whole-circle counting exponents scales with
    // the ratio of the two rates
    const double chi_l = std::exp2(4.625), chi_p = std::exp2(3.375), beta = 0.04;
    CircleMap L = CircleMap::mobius_linear(Mat2::diag(chi_l, 1.0 / chi_l));
    CircleMap P = CircleMap::mobius_projective(Mat2::diag(chi_p, 1.0 / chi_p));
    CircleMap h1 = CircleMap::compose({P, L});
    CircleMap h2 = CircleMap::conjugate(h1, CircleMap::rotation(beta));
    f.counting_alphabet.generators = {{"a", h1}, {"b", h2}};
    f.counting_alphabet.group_mode = true;
    f.counting_alphabet.declared_free = false; // counting dedupes elements
    f.walk = uniform_walk(group_letters_alphabet(f.counting_alphabet));
    f.base_points = {0.0, beta, 0.5, 0.5 + beta};
    f.meta["beta"] = beta;
    f.meta["weak_rate_log2"] = -2.0 * std::log2(chi_l / chi_p);
    f.meta["strong_rate_log2"] = -2.0 * std::log2(chi_l * chi_p);
    return f;
}

Fixture contracting_fixture(int m) {
    // m free Mobius contractions with derivative ~ 1/3 (m=2) or ~ 1/4 (m=3)
    // on a common invariant arc; images pairwise disjoint.
    Fixture f;
    std::vector<double> attractors;
    double chi;
    if (m == 2) {
        f.name = "contracting2";
        chi = std::sqrt(3.0);
        attractors = {0.465, 0.535};
        f.ifs_arcs = {Arc{0.45, 0.10}};
    } else if (m == 3) {
        f.name = "contracting3";
        chi = 2.0;
        attractors = {0.45, 0.5, 0.55};
        f.ifs_arcs = {Arc{0.445, 0.11}};
    } else {
        throw UnknownFixture("contracting fixture: m must be 2 or 3");
    }
    for (std::size_t i = 0; i < attractors.size(); ++i) {
        words::Alphabet::Generator g;
        g.name = std::string(1, static_cast<char>('a' + i));
        g.map = mobius_contraction(chi, attractors[i]);
        f.counting_alphabet.generators.push_back(g);
    }
    f.counting_alphabet.group_mode = false;
    f.counting_alphabet.declared_free = true; // disjoint images: free semigroup
    f.walk = uniform_walk(f.counting_alphabet);
    f.base_points = attractors;
    f.lambda_hint = -2.0 * std::log2(chi);
    f.pressure_maps.reserve(attractors.size());
    for (const auto& g : f.counting_alphabet.generators) f.pressure_maps.push_back(g.map);
    f.pressure_arcs = f.ifs_arcs;
    // full shift on a single arc: every branch applies everywhere
    f.pressure_allowed.assign(f.pressure_maps.size(), std::vector<int>(f.pressure_arcs.size(), 1));
    f.meta["ratio"] = 1.0 / (chi * chi);
    return f;
}

} // namespace

std::vector<std::string> fixture_names() {
    return {"schottky2",  "schottky2-linear", "two-arc-d2",        "linear-r2",
            "parabolic-k1", "parabolic-k2",   "solvable-2k",       "twoscale-pingpong",
            "contracting2", "contracting3"};
}

Fixture make_fixture(const std::string& name, const nlohmann::json& params) {
    if (name == "schottky2") return schottky2_fixture(fuchsian::Cover::projective);
    if (name == "schottky2-linear") return schottky2_fixture(fuchsian::Cover::linear);
    if (name == "two-arc-d2") return two_arc_fixture();
    if (name == "linear-r2") return linear_r2_fixture();
    if (name == "parabolic-k1") return parabolic_fixture(1);
    if (name == "parabolic-k2") return parabolic_fixture(2);
    if (name == "solvable-2k") return solvable_fixture(params.value("k", 1));
    if (name == "twoscale-pingpong") return twoscale_fixture();
    if (name == "contracting2") return contracting_fixture(2);
    if (name == "contracting3") return contracting_fixture(3);
    throw UnknownFixture("unknown fixture: " + name);
}

Fixture conjugate_fixture(const Fixture& f, const maps::CircleMap& by) {
    Fixture out = f;
    out.name = f.name + "+conjugated";
    auto conj = [&](const maps::CircleMap& m) { return maps::CircleMap::conjugate(m, by); };
    for (auto& g : out.counting_alphabet.generators) g.map = conj(g.map);
    out.counting_alphabet.inverse_cache_.clear();
    for (auto& g : out.walk.alphabet.generators) g.map = conj(g.map);
    out.walk.alphabet.inverse_cache_.clear();
    for (auto& x : out.base_points) x = by.eval(x);
    out.wandering_point = by.eval(out.wandering_point);
    for (auto& a : out.ifs_arcs) a = by.image(a);
    out.cones.reset();
    out.fuch.reset();
    out.pressure_maps.clear();
    out.pressure_arcs.clear();
    out.pressure_allowed.clear();
    return out;
}

} // namespace circledim::fixtures
