#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "circledim/maps.hpp"
#include "circledim/rng.hpp"

using namespace circledim;
using maps::CircleMap;

namespace {

constexpr double PI = std::numbers::pi;

Mat2 random_sl2(CounterRng& rng) {
    double t1 = rng.next_double() * 2.0 * PI;
    double t2 = rng.next_double() * 2.0 * PI;
    double tau = 2.0 * rng.next_double() - 1.0;
    return Mat2::rotation(t1) * Mat2::diag(std::exp(tau), std::exp(-tau)) * Mat2::rotation(t2);
}

// independent finite-difference oracle for first/second derivatives
double fd_deriv(const CircleMap& m, double x) {
    const double h = 1e-6;
    return wrap_signed(m.eval(x + h) - m.eval(x - h)) / (2.0 * h);
}
double fd_deriv2(const CircleMap& m, double x) {
    const double h = 1e-5;
    return (m.deriv(x + h) - m.deriv(x - h)) / (2.0 * h);
}

// independent RK4 oracle for the sin(2 k pi x) flow
double rk4_trig_flow(int k, double t, double x0, int steps = 20000) {
    auto field = [&](double x) { return std::sin(2.0 * k * PI * x); };
    double x = x0, h = t / steps;
    for (int i = 0; i < steps; ++i) {
        double k1 = field(x);
        double k2 = field(x + 0.5 * h * k1);
        double k3 = field(x + 0.5 * h * k2);
        double k4 = field(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return wrap_unit(x);
}

} // namespace

TEST_CASE("rotation basics") {
    CircleMap r = CircleMap::rotation(0.25);
    CHECK(r.eval(0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.deriv(0.123) == 1.0);
    CHECK(r.deriv2(0.9) == 0.0);
    Interval iv = r.log2_deriv_range(Arc{0.1, 0.3});
    CHECK(iv.lo == 0.0);
    CHECK(iv.hi == 0.0);
}

TEST_CASE("mobius fixed points and derivative formula") {
    CircleMap g = CircleMap::mobius_projective(Mat2::diag(2.0, 0.5));
    CHECK(g.eval(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    // attracting angle theta = 0: derivative = chi^-2 = 1/4
    CHECK(g.deriv(0.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(g.deriv(0.5) == doctest::Approx(4.0).epsilon(1e-12));

    CircleMap blended = CircleMap::parabolic_blend(1, 0.05);
    CHECK(blended.eval(0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("derivatives match finite differences") {
    CounterRng rng(7);
    std::vector<CircleMap> ms = {
        CircleMap::mobius_projective(random_sl2(rng)),
        CircleMap::mobius_linear(random_sl2(rng)),
        CircleMap::trig_flow(2, 0.3),
        CircleMap::parabolic_blend(1, 0.05),
        CircleMap::parabolic_blend(2, 0.03),
        CircleMap::compose({CircleMap::parabolic_blend(1, 0.05), CircleMap::rotation(0.3)}),
        CircleMap::parabolic_blend(1, 0.05).inverse(),
    };
    for (const auto& m : ms) {
        for (int i = 0; i < 25; ++i) {
            double x = rng.next_double();
            CHECK(m.deriv(x) == doctest::Approx(fd_deriv(m, x)).epsilon(1e-5));
            CHECK(m.deriv2(x) == doctest::Approx(fd_deriv2(m, x)).epsilon(2e-4).scale(1.0 + std::abs(m.deriv2(x))));
        }
    }
}

TEST_CASE("projective action is a homomorphism") {
    CounterRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        Mat2 a = random_sl2(rng), b = random_sl2(rng);
        double x = rng.next_double();
        CircleMap ga = CircleMap::mobius_projective(a);
        CircleMap gb = CircleMap::mobius_projective(b);
        CircleMap gab = CircleMap::mobius_projective(a * b);
        CHECK(circ_dist(gab.eval(x), ga.eval(gb.eval(x))) < 1e-9);
    }
}

TEST_CASE("chain rule along compositions") {
    CounterRng rng(13);
    CircleMap g = CircleMap::mobius_projective(random_sl2(rng));
    CircleMap f = CircleMap::parabolic_blend(1, 0.04);
    CircleMap c = CircleMap::compose({f, g}); // f(g(x))
    for (int i = 0; i < 50; ++i) {
        double x = rng.next_double();
        CHECK(c.deriv(x) == doctest::Approx(f.deriv(g.eval(x)) * g.deriv(x)).epsilon(1e-12));
        CHECK(std::abs(c.log2_deriv(x) - (f.log2_deriv(g.eval(x)) + g.log2_deriv(x))) < 1e-9);
    }
}

TEST_CASE("inverse evaluates back to the input") {
    CounterRng rng(17);
    std::vector<CircleMap> ms = {
        CircleMap::rotation(0.37),
        CircleMap::mobius_projective(random_sl2(rng)),
        CircleMap::mobius_linear(random_sl2(rng)),
        CircleMap::trig_flow(1, 0.8),
        CircleMap::parabolic_blend(1, 0.05),
        CircleMap::compose({CircleMap::parabolic_blend(1, 0.05),
                            CircleMap::mobius_projective(Mat2::diag(2.0, 0.5))}),
    };
    for (const auto& m : ms) {
        CircleMap mi = m.inverse();
        for (int i = 0; i < 40; ++i) {
            double x = rng.next_double();
            CHECK(circ_dist(mi.eval(m.eval(x)), x) < 1e-9);
            CHECK(circ_dist(m.inverse_eval(m.eval(x)), x) < 1e-9);
        }
    }
}

TEST_CASE("trig flow matches the Runge-Kutta oracle") {
    for (int k : {1, 2}) {
        CircleMap f = CircleMap::trig_flow(k, 0.7);
        for (double x : {0.03, 0.11, 0.26, 0.49, 0.62, 0.77, 0.91}) {
            CHECK(circ_dist(f.eval(x), rk4_trig_flow(k, 0.7, x)) < 1e-7);
        }
    }
}

TEST_CASE("trig flow closed form: tan identity") {
    int k = 2;
    double t = 0.4;
    CircleMap f = CircleMap::trig_flow(k, t);
    for (double x : {0.02, 0.1, 0.25 - 1e-3, 0.3, 0.45}) {
        double y = f.eval(x);
        CHECK(std::tan(k * PI * y) ==
              doctest::Approx(std::exp(2.0 * k * PI * t) * std::tan(k * PI * x)).epsilon(1e-7));
    }
}

TEST_CASE("linear cover descends to the projective action") {
    CounterRng rng(23);
    for (int i = 0; i < 50; ++i) {
        Mat2 a = random_sl2(rng);
        CircleMap lin = CircleMap::mobius_linear(a);
        CircleMap proj = CircleMap::mobius_projective(a);
        double x = rng.next_double();
        CHECK(circ_dist(wrap_unit(2.0 * lin.eval(x)), proj.eval(wrap_unit(2.0 * x))) < 1e-9);
    }
}

TEST_CASE("log-derivative bounds enclose a dense-grid oracle") {
    // diag(2, 1/2) projective on an arc around 0 of length 0.01
    CircleMap g = CircleMap::mobius_projective(Mat2::diag(2.0, 0.5));
    Arc a{wrap_unit(-0.005), 0.01};
    Interval iv = g.log2_deriv_range(a);
    CHECK(iv.lo >= -2.1);
    CHECK(iv.hi <= -1.9);
    // dense oracle: one million samples must stay inside the enclosure
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 1000000; ++i) {
        double v = g.log2_deriv(a.point_at(i / 1000000.0));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(iv.lo <= lo + 1e-12);
    CHECK(iv.hi >= hi - 1e-12);

    // same property on the widened (grid) path
    CircleMap pb = CircleMap::parabolic_blend(1, 0.05);
    Arc full = Arc::full();
    Interval ivb = pb.log2_deriv_range(full, 256);
    CHECK(ivb.lo < 0.0);
    CHECK(ivb.hi > 0.0);
    lo = 1e300;
    hi = -1e300;
    for (int i = 0; i <= 1000000; ++i) {
        double v = pb.log2_deriv(i / 1000000.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(ivb.lo <= lo + 1e-12);
    CHECK(ivb.hi >= hi - 1e-12);
}

TEST_CASE("bounds of composed words chain through exact arc images") {
    CounterRng rng(29);
    CircleMap g1 = CircleMap::mobius_projective(random_sl2(rng));
    CircleMap g2 = CircleMap::mobius_projective(random_sl2(rng));
    CircleMap w = CircleMap::compose({g1, g2, g1});
    Arc a{0.3, 0.05};
    Interval iv = w.log2_deriv_range(a);
    for (int i = 0; i <= 20000; ++i) {
        double v = w.log2_deriv(a.point_at(i / 20000.0));
        CHECK(v >= iv.lo - 1e-9);
        CHECK(v <= iv.hi + 1e-9);
    }
}

TEST_CASE("distortion estimates") {
    CircleMap r = CircleMap::rotation(0.2);
    auto d0 = maps::distortion(r, Arc{0.1, 0.4}, 64);
    CHECK(d0.kappa == 0.0);
    CHECK(d0.kappa_tilde == 0.0);

    CounterRng rng(31);
    // kappa <= kappa_tilde * |arc| within the widening tolerance
    for (int i = 0; i < 20; ++i) {
        CircleMap g = CircleMap::mobius_projective(random_sl2(rng));
        Arc a{rng.next_double(), 0.02 + 0.1 * rng.next_double()};
        auto d = maps::distortion(g, a, 512);
        double widen = 2.0 * g.log2_deriv_lipschitz(a) * (a.length / 511);
        CHECK(d.kappa <= d.kappa_tilde * a.length + 3.0 * widen + 1e-12);
    }
    // subadditivity under composition on random cases
    for (int i = 0; i < 100; ++i) {
        CircleMap f = CircleMap::mobius_projective(random_sl2(rng));
        CircleMap g = CircleMap::mobius_projective(random_sl2(rng));
        Arc a{rng.next_double(), 0.02 + 0.05 * rng.next_double()};
        CircleMap fg = CircleMap::compose({f, g});
        auto dfg = maps::distortion(fg, a, 256);
        auto dg = maps::distortion(g, a, 256);
        auto df = maps::distortion(f, g.image(a), 256);
        double tol = 0.05 * (1.0 + dfg.kappa);
        CHECK(dfg.kappa <= dg.kappa + df.kappa + tol);
    }
}

TEST_CASE("fixed points of catalog maps") {
    // irrational rotation: no fixed points
    CHECK_THROWS_AS((void)maps::find_fixed_points(CircleMap::rotation(1e-12), 512), std::invalid_argument);
    CHECK(maps::find_fixed_points(CircleMap::rotation(std::numbers::sqrt2 / 4.0)).empty());

    // linear cover of diag(2, 1/2): four fixed points at quarters
    auto fps = maps::find_fixed_points(CircleMap::mobius_linear(Mat2::diag(2.0, 0.5)));
    REQUIRE(fps.size() == 4);
    const double want[4] = {0.0, 0.25, 0.5, 0.75};
    for (int i = 0; i < 4; ++i) {
        CHECK(circ_dist(fps[static_cast<std::size_t>(i)].location, want[i]) < 1e-10);
        bool attracting = i % 2 == 0;
        CHECK((fps[static_cast<std::size_t>(i)].kind == maps::FixedPointRecord::Kind::attracting) == attracting);
    }

    // parabolic blend: parabolic of multiplicity 2 at 0, attracting 1/4, repelling 3/4
    auto pb = maps::find_fixed_points(CircleMap::parabolic_blend(1, 0.05));
    REQUIRE(pb.size() == 3);
    CHECK(circ_dist(pb[0].location, 0.0) < 1e-9);
    CHECK(pb[0].kind == maps::FixedPointRecord::Kind::parabolic);
    CHECK(pb[0].multiplicity == 2);
    CHECK(circ_dist(pb[1].location, 0.25) < 1e-9);
    CHECK(pb[1].kind == maps::FixedPointRecord::Kind::attracting);
    CHECK(circ_dist(pb[2].location, 0.75) < 1e-9);
    CHECK(pb[2].kind == maps::FixedPointRecord::Kind::repelling);

    // blend of blends: multiplicity-3 tangency at 0
    CircleMap comp = CircleMap::compose({CircleMap::parabolic_blend(1, 0.16),
                                         CircleMap::parabolic_blend(1, -0.16)});
    auto cfps = maps::find_fixed_points(comp);
    bool found = false;
    for (const auto& r : cfps)
        if (circ_dist(r.location, 0.0) < 1e-9) {
            found = true;
            CHECK(r.kind == maps::FixedPointRecord::Kind::parabolic);
            CHECK(r.multiplicity == 3);
        }
    CHECK(found);
    CHECK(cfps.size() == 6);
}

TEST_CASE("parabolic orbit asymptotics (Milnor rates)") {
    // multiplicity 2k at 0; on the contracting side n^(1/K) u_n -> (K a)^(-1/K)
    // with K = 2k-1 and a the leading coefficient of x - g(x).
    for (int k : {1, 2}) {
        double eps = 0.05;
        CircleMap g = CircleMap::parabolic_blend(k, eps);
        int K = 2 * k - 1;
        double a = eps * std::pow(PI, 2 * k);
        double u = 0.08; // distance to 0 from the left, i.e. x = 1 - u
        long long N = k == 1 ? 200000 : 4000000;
        for (long long n = 1; n <= N; ++n) u = 1.0 - g.eval(1.0 - u);
        double fitted = std::pow(static_cast<double>(N), 1.0 / K) * u;
        double expect = std::pow(K * a, -1.0 / K);
        CHECK(std::abs(fitted - expect) / expect < 0.05);
    }
}

TEST_CASE("error paths: rejected blends, coarse grids, wide arcs") {
    // derivative must stay positive on the construction grid
    CHECK_THROWS_AS((void)CircleMap::parabolic_blend(1, 0.25), std::invalid_argument);
    // a grid too coarse for the fixed-point count is refused
    CHECK_THROWS_AS((void)maps::find_fixed_points(CircleMap::trig_flow(2, 0.5), 16),
                    TooManyFixedPoints);
    // the Lipschitz widening must certify a positive derivative floor
    CHECK_THROWS_AS((void)CircleMap::parabolic_blend(1, 0.17).log2_deriv_range(Arc::full(), 2),
                    UnboundedDistortion);
}

TEST_CASE("serialization round trip") {
    CounterRng rng(41);
    std::vector<CircleMap> ms = {
        CircleMap::rotation(0.123456789),
        CircleMap::mobius_projective(random_sl2(rng)),
        CircleMap::mobius_linear(random_sl2(rng)),
        CircleMap::trig_flow(2, -0.31),
        CircleMap::parabolic_blend(1, 0.05),
        CircleMap::compose({CircleMap::rotation(0.3), CircleMap::parabolic_blend(1, 0.02)}),
        CircleMap::parabolic_blend(1, 0.05).inverse(),
    };
    for (const auto& m : ms) {
        CircleMap back = CircleMap::from_json(m.to_json());
        for (int i = 0; i < 50; ++i) {
            double x = rng.next_double();
            CHECK(circ_dist(back.eval(x), m.eval(x)) < 1e-14);
        }
    }
}

TEST_CASE("relation g f g^-1 = f^-1 for the sine flow") {
    for (int k : {1, 2}) {
        CircleMap f = CircleMap::trig_flow(k, 1.0);
        CircleMap g = CircleMap::rotation(1.0 / (2.0 * k));
        CircleMap lhs = CircleMap::conjugate(f, g);
        CircleMap rhs = f.inverse();
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double x = i / 1000.0;
            worst = std::max(worst, circ_dist(lhs.eval(x), rhs.eval(x)));
        }
        CHECK(worst < 1e-9);
    }
}
