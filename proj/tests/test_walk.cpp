#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "circledim/fixtures.hpp"
#include "circledim/walk.hpp"

using namespace circledim;
using maps::CircleMap;

namespace {

walk::WalkMeasure uniform_on(std::vector<words::Alphabet::Generator> gens) {
    walk::WalkMeasure mu;
    mu.alphabet.generators = std::move(gens);
    mu.weights.assign(mu.alphabet.generators.size(), 1.0 / mu.alphabet.generators.size());
    return mu;
}

CircleMap contraction_at(double chi, double a) {
    Mat2 r = Mat2::rotation(std::numbers::pi * a);
    return CircleMap::mobius_projective(r * Mat2::diag(chi, 1.0 / chi) *
                                        Mat2::rotation(-std::numbers::pi * a));
}

} // namespace

TEST_CASE("sample_word basics") {
    auto mu = uniform_on({{"a", CircleMap::rotation(0.1)}, {"b", CircleMap::rotation(0.2)}});
    CHECK(walk::sample_word(mu, 0, 5).empty());
    auto w1 = walk::sample_word(mu, 1000, 42);
    auto w2 = walk::sample_word(mu, 1000, 42);
    CHECK(w1 == w2);

    auto big = walk::sample_word(mu, 10000, 7);
    int count_a = 0;
    for (int l : big.letters) count_a += l == 1;
    // frequency within 3 sigma of 1/2
    double sigma = std::sqrt(10000 * 0.25);
    CHECK(std::abs(count_a - 5000.0) < 3.0 * sigma);
}

TEST_CASE("lyapunov exponent of a point mass equals the multiplier rate") {
    // single contracting Mobius with attracting multiplier 1/4: lambda -> -2
    auto mu = uniform_on({{"g", contraction_at(2.0, 0.3)}});
    auto est = walk::lyapunov(mu, 0.9, 400, 32, 11);
    CHECK(std::abs(est.lambda + 2.0) < 0.05);

    // two rotations: identically zero
    auto rot = uniform_on({{"a", CircleMap::rotation(0.37)}, {"b", CircleMap::rotation(0.11)}});
    auto zero = walk::lyapunov(rot, 0.2, 200, 8, 3);
    CHECK(zero.lambda == 0.0);
    CHECK(zero.stderr_ == 0.0);
}

TEST_CASE("lyapunov agrees with an independent single-long-run oracle") {
    auto fx = fixtures::make_fixture("contracting2", {});
    auto est = walk::lyapunov(fx.walk, 0.5, 300, 64, 17);
    double oracle = walk::lyapunov_single_run(fx.walk, 0.5, 300LL * 64, 23);
    CHECK(std::abs(est.lambda - oracle) < 2.0 * est.stderr_ + 0.02);
    CHECK(est.lambda < 0.0);

    // the repelling exponent: forward derivatives averaged over the
    // stationary measure of the inverse walk are expanding
    walk::WalkMeasure inv;
    inv.alphabet.generators = {{"A", fx.walk.alphabet.generators[0].map.inverse()},
                               {"B", fx.walk.alphabet.generators[1].map.inverse()}};
    inv.weights = fx.walk.weights;
    auto back = walk::stationary_sample(inv, 400, 4000, 8, 19);
    double lam_minus = 0.0;
    for (std::size_t i = 0; i < back.nu.points.size(); ++i)
        for (std::size_t g = 0; g < fx.walk.weights.size(); ++g)
            lam_minus += back.nu.weights[i] * fx.walk.weights[g] *
                         fx.walk.alphabet.letter_map(static_cast<int>(g) + 1).log2_deriv(back.nu.points[i]);
    CHECK(lam_minus > 0.0);
    // no symmetry between the contracting and repelling magnitudes is assumed
    CHECK(std::abs(lam_minus) > 0.1);
}

TEST_CASE("lyapunov is conjugation invariant within error bars") {
    auto fx = fixtures::make_fixture("contracting2", {});
    auto base = walk::lyapunov(fx.walk, 0.5, 400, 64, 29);
    auto conj = fixtures::conjugate_fixture(fx, CircleMap::parabolic_blend(1, 0.03));
    auto cest = walk::lyapunov(conj.walk, 0.5, 400, 64, 29);
    CHECK(std::abs(base.lambda - cest.lambda) < 2.0 * (base.stderr_ + cest.stderr_) + 0.02);
}

TEST_CASE("stationary sample of a single North-South map concentrates") {
    auto mu = uniform_on({{"g", contraction_at(4.0, 0.3)}});
    auto s = walk::stationary_sample(mu, 200, 4000, 8, 5);
    double lo = s.nu.points.front(), hi = s.nu.points.back();
    CHECK(wrap_unit(hi - lo) < 1e-6);
    CHECK(circ_dist(s.nu.points.front(), 0.3) < 1e-6);
}

TEST_CASE("stationarity consistency: residual below replica scatter") {
    auto fx = fixtures::make_fixture("contracting2", {});
    auto s = walk::stationary_sample(fx.walk, 600, 20000, 16, 9);
    CHECK(!s.nonconvergence);
    CHECK(s.invariance_residual <= 2.0 * s.replica_distance + 1e-6);
}

TEST_CASE("schottky semigroup stationary support lies in the image arcs") {
    auto fx = fixtures::make_fixture("contracting2", {});
    const Arc J = fx.ifs_arcs[0];
    Arc i1 = fx.counting_alphabet.generators[0].map.image(J);
    Arc i2 = fx.counting_alphabet.generators[1].map.image(J);
    auto s = walk::stationary_sample(fx.walk, 600, 8000, 8, 13);
    for (double x : s.nu.points) CHECK((i1.contains(x) || i2.contains(x)));
}

TEST_CASE("wasserstein distance on the circle") {
    walk::EmpiricalMeasure a = walk::EmpiricalMeasure::from_points({0.1, 0.5});
    walk::EmpiricalMeasure b = walk::EmpiricalMeasure::from_points({0.2, 0.6});
    CHECK(walk::wasserstein1(a, b) == doctest::Approx(0.1).epsilon(1e-12));
    // wrap-around optimal transport
    walk::EmpiricalMeasure c = walk::EmpiricalMeasure::from_points({0.95});
    walk::EmpiricalMeasure d = walk::EmpiricalMeasure::from_points({0.05});
    CHECK(walk::wasserstein1(c, d) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("structure constants on the three reference systems") {
    // (1,1): projective Schottky pair
    auto s2 = fixtures::make_fixture("schottky2", {});
    auto rep = walk::detect_structure(s2.walk, 40, 256, 1e-3, 8, 101);
    CHECK(rep.dr == 1);
    CHECK(rep.d == 1);
    CHECK(rep.r == 1);

    // (1,2): the linear cover of the same pair
    auto lin = fixtures::make_fixture("schottky2-linear", {});
    auto rep2 = walk::detect_structure(lin.walk, 40, 256, 1e-3, 8, 103);
    CHECK(rep2.dr == 2);
    CHECK(rep2.d == 1);
    CHECK(rep2.r == 2);

    // (2,1): two flows preserving two disjoint arcs
    auto two = fixtures::make_fixture("two-arc-d2", {});
    auto rep3 = walk::detect_structure(two.walk, 40, 256, 1e-3, 8, 107);
    CHECK(rep3.dr == 2);
    CHECK(rep3.d == 2);
    CHECK(rep3.r == 1);
    for (double lam : rep3.lyapunov_per_component) CHECK(lam < 0.0);
}

TEST_CASE("structure constants survive conjugation by a blend diffeomorphism") {
    auto two = fixtures::make_fixture("two-arc-d2", {});
    auto conj = fixtures::conjugate_fixture(two, CircleMap::parabolic_blend(1, 0.03));
    auto rep = walk::detect_structure(conj.walk, 40, 256, 1e-3, 8, 311);
    CHECK(rep.d == 2);
    CHECK(rep.r == 1);
    auto lin = fixtures::make_fixture("schottky2-linear", {});
    auto conj2 = fixtures::conjugate_fixture(lin, CircleMap::parabolic_blend(1, 0.03));
    auto rep2 = walk::detect_structure(conj2.walk, 40, 256, 1e-3, 8, 313);
    CHECK(rep2.d == 1);
    CHECK(rep2.r == 2);
}

TEST_CASE("inverse system has the same number of minimal sets") {
    auto two = fixtures::make_fixture("two-arc-d2", {});
    walk::WalkMeasure inv;
    for (const auto& g : two.walk.alphabet.generators)
        inv.alphabet.generators.push_back({g.name + "'", g.map.inverse()});
    inv.weights = two.walk.weights;
    auto rep = walk::detect_structure(inv, 40, 256, 1e-3, 8, 211);
    CHECK(rep.d == 2);
}

TEST_CASE("boundary map: single contraction and decay rate") {
    auto mu = uniform_on({{"g", contraction_at(3.0, 0.62)}});
    auto b = walk::boundary_map(mu, 31, 30, 256, 1e-3);
    REQUIRE(b.pi.size() == 1);
    CHECK(circ_dist(b.pi[0], 0.62) < 1e-6);
    // decay slope tracks the Lyapunov exponent (= -2 log2 3)
    auto est = walk::lyapunov(mu, 0.1, 200, 16, 37);
    CHECK(std::abs(b.decay - est.lambda) < 0.2);

    // linear cover: two antipodal boundary points
    auto lin = uniform_on({{"g", CircleMap::mobius_linear(Mat2::diag(3.0, 1.0 / 3.0))},
                           {"h", CircleMap::mobius_linear(Mat2::rotation(0.4) * Mat2::diag(4.0, 0.25) *
                                                          Mat2::rotation(-0.4))}});
    auto b2 = walk::boundary_map(lin, 33, 40, 512, 1e-3);
    REQUIRE(b2.pi.size() == 2);
    CHECK(circ_dist(b2.pi[0] + 0.5, b2.pi[1]) < 1e-6);
}

TEST_CASE("random walk entropy") {
    auto fx = fixtures::make_fixture("contracting2", {});
    auto h = walk::rw_entropy(fx.walk, 5, 8, 1 << 20);
    CHECK(h.exact);
    CHECK(h.h == doctest::Approx(1.0).epsilon(1e-12));

    walk::WalkMeasure skew = fx.walk;
    skew.alphabet.generators.push_back({"c", fx.walk.alphabet.generators[0].map});
    skew.alphabet.declared_free = true;
    skew.weights = {0.5, 0.25, 0.25};
    auto h2 = walk::rw_entropy(skew, 5, 8, 1 << 20);
    CHECK(h2.h == doctest::Approx(1.5).epsilon(1e-12));

    // duplicate map: all words of the same length collide
    walk::WalkMeasure dup;
    dup.alphabet.generators = {{"g", CircleMap::rotation(0.2)}, {"g2", CircleMap::rotation(0.2)}};
    dup.weights = {0.5, 0.5};
    auto h3 = walk::rw_entropy(dup, 6, 8, 1 << 20);
    CHECK(!h3.exact);
    CHECK(h3.h == doctest::Approx(0.0).epsilon(1e-12));
}
