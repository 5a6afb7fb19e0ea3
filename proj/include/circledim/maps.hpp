#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "circledim/circle.hpp"
#include "circledim/common.hpp"
#include "circledim/mat2.hpp"

#include <json.hpp>

namespace circledim::maps {

// Closed-form orientation-preserving circle diffeomorphisms with exact
// first and second derivatives. Values are immutable after construction
// and cheap to copy (shared nodes).
//
// Catalog:
//   Rotation(alpha)            x -> x + alpha
//   MobiusProjective(A)        det A = 1, action on RP^1 = R/Z (line angle pi*x)
//   MobiusLinear(A)            det A = 1, action on unit vectors (angle 2*pi*x)
//   TrigFlow(k, t)             time-t flow of  x' = sin(2*k*pi*x)
//   ParabolicBlend(k, eps)     x -> x + eps * sin^(2k)(pi x) * cos(2 pi x)
//   Compose([m1, m2, ...])     applied right to left: m1(m2(...(x)))
//   Inverse(m), Conjugate(inner, by) = by o inner o by^-1

class CircleMap;
struct Node;
using NodePtr = std::shared_ptr<const Node>;

class CircleMap {
public:
    CircleMap(); // identity (Rotation(0))

    static CircleMap rotation(double alpha);
    static CircleMap mobius_projective(const Mat2& m);
    static CircleMap mobius_linear(const Mat2& m);
    static CircleMap trig_flow(int k, double t);
    static CircleMap parabolic_blend(int k, double eps);
    static CircleMap compose(std::vector<CircleMap> members); // right-to-left
    static CircleMap conjugate(const CircleMap& inner, const CircleMap& by);
    CircleMap inverse() const;

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }
    double deriv(double x) const;
    double deriv2(double x) const;
    double log2_deriv(double x) const;
    double inverse_eval(double y) const;

    // Arcs map to arcs exactly (endpoint images); no enclosure inflation.
    Arc image(const Arc& a) const;
    Arc preimage(const Arc& a) const;

    // Certified enclosure of the range of log2 m' over the arc. Exact for
    // Rotation/Mobius/TrigFlow (closed-form extrema of the sinusoidal
    // derivative); grid extremes widened by a closed-form Lipschitz bound
    // otherwise. `grid` only matters on the widened path.
    Interval log2_deriv_range(const Arc& a, int grid = 128) const;

    // Certified upper bound for the Lipschitz constant of log2 m' on the
    // arc (the distortion norm, base-2 units).
    double log2_deriv_lipschitz(const Arc& a, int grid = 128) const;

    nlohmann::json to_json() const;
    static CircleMap from_json(const nlohmann::json& j);

    const Node& node() const { return *node_; }
    bool is_identity() const;

private:
    explicit CircleMap(NodePtr n) : node_(std::move(n)) {}
    NodePtr node_;
};

// Spec-facing aliases.
inline double eval(const CircleMap& m, double x) { return m.eval(x); }
inline double deriv(const CircleMap& m, double x) { return m.deriv(x); }
inline double deriv2(const CircleMap& m, double x) { return m.deriv2(x); }
inline Interval log_deriv_bounds(const CircleMap& m, const Arc& a, int grid = 128) {
    return m.log2_deriv_range(a, grid);
}

struct DistortionEstimate {
    double kappa = 0.0;       // range width of log2 m' over the arc (widened)
    double kappa_tilde = 0.0; // max divided difference of log2 m'
};
DistortionEstimate distortion(const CircleMap& m, const Arc& a, int grid);

struct FixedPointRecord {
    enum class Kind { attracting, repelling, parabolic };
    double location = 0.0;
    Kind kind = Kind::attracting;
    int multiplicity = 1;
    double multiplier = 1.0;
};

// Sign changes of phi(x) = m(x) - x on the grid, refined by bisection to
// 1e-12; tangential zeros located through sign changes of m' - 1.
// Multiplicity of near-tangent zeros from the local scaling exponent of
// phi. Throws TooManyFixedPoints when the count exceeds grid/10.
std::vector<FixedPointRecord> find_fixed_points(const CircleMap& m, int grid = 4096);

const char* kind_name(FixedPointRecord::Kind k);

} // namespace circledim::maps
