#include "circledim/maps.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace circledim::maps {

namespace {
constexpr double PI = std::numbers::pi;
constexpr double LN2 = std::numbers::ln2;
} // namespace

// ---------------------------------------------------------------------------
// Node hierarchy

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x) const = 0;
    virtual double deriv(double x) const = 0;
    virtual double deriv2(double x) const = 0;
    virtual double inverse_eval(double y) const = 0;
    virtual NodePtr inverse() const = 0;
    virtual Interval log2_range(const Arc& a, int grid) const = 0;
    virtual double log2_lipschitz(const Arc& a, int grid) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

namespace {

Arc image_of(const Node& n, const Arc& a) {
    if (a.is_full()) return Arc::full();
    double s = n.eval(a.start);
    double e = n.eval(a.end());
    double len = wrap_unit(e - s);
    if (len == 0.0) len = 1e-15;
    if (len > 0.999) {
        // Guard against a wrap artifact on very short images: check that the
        // midpoint lands inside; if not, the subtraction wrapped.
        double mid = n.eval(a.midpoint());
        if (wrap_unit(mid - s) > len) len = 1e-15;
    }
    return Arc{s, len};
}

// Range of cos(theta - theta0) over [ta, ta+len].
Interval cos_range(double theta0, double ta, double len) {
    if (len >= 2.0 * PI) return {-1.0, 1.0};
    double a = ta - theta0; // interval [a, a+len] for plain cos
    double ca = std::cos(a), cb = std::cos(a + len);
    double lo = std::min(ca, cb), hi = std::max(ca, cb);
    // does the interval contain a multiple of 2pi (max) / odd multiple of pi (min)?
    double k_max = std::ceil(a / (2.0 * PI));
    if (2.0 * PI * k_max <= a + len) hi = 1.0;
    double k_min = std::ceil((a - PI) / (2.0 * PI));
    if (2.0 * PI * k_min + PI <= a + len) lo = -1.0;
    return {lo, hi};
}

// u(theta) = p + q*cos(theta - theta0), p > q >= 0, over [ta, ta+len].
Interval u_range(double p, double q, double theta0, double ta, double len) {
    Interval c = cos_range(theta0, ta, len);
    return {p + q * c.lo, p + q * c.hi};
}

// Max of q|sin(theta-theta0)| / (p + q cos(theta-theta0)) over the interval.
// With p^2 - q^2 = 1 the interior critical value is exactly q.
double u_logslope_max(double p, double q, double theta0, double ta, double len) {
    if (q <= 0.0) return 0.0;
    auto val = [&](double th) {
        double d = th - theta0;
        return q * std::abs(std::sin(d)) / (p + q * std::cos(d));
    };
    double m = std::max(val(ta), val(ta + len));
    if (len >= 2.0 * PI) return q / std::sqrt(std::max(p * p - q * q, 1e-300));
    // critical points: cos(d) = -q/p at d = +-dc mod 2pi
    double dc = std::acos(std::clamp(-q / p, -1.0, 1.0));
    for (double cand : {dc, -dc}) {
        double base = theta0 + cand;
        double k = std::ceil((ta - base) / (2.0 * PI));
        if (base + 2.0 * PI * k <= ta + len)
            m = std::max(m, q / std::sqrt(std::max(p * p - q * q, 1e-300)));
    }
    return m;
}

} // namespace

// --- Rotation ---------------------------------------------------------------

struct RotationNode final : Node {
    double alpha;
    explicit RotationNode(double a) : alpha(wrap_unit(a)) {}
    double eval(double x) const override { return wrap_unit(x + alpha); }
    double deriv(double) const override { return 1.0; }
    double deriv2(double) const override { return 0.0; }
    double inverse_eval(double y) const override { return wrap_unit(y - alpha); }
    NodePtr inverse() const override { return std::make_shared<RotationNode>(-alpha); }
    Interval log2_range(const Arc&, int) const override { return {0.0, 0.0}; }
    double log2_lipschitz(const Arc&, int) const override { return 0.0; }
    nlohmann::json to_json() const override {
        return {{"type", "rotation"}, {"alpha", alpha}};
    }
};

// --- Mobius (shared by both covers) ------------------------------------------
//
// With v(phi) = (cos phi, sin phi),  |A v|^2 = p + q cos(theta - theta0)
// where theta = 2 phi.  Projective cover: phi = pi x (theta = 2 pi x);
// linear cover: phi = 2 pi x (theta = 4 pi x).  In both covers
//   f'(x) = det A / |A v|^2,
//   f''(x) = -2 * rate_phi * det A * (Av . Av') / |A v|^4,
// with rate_phi = d phi / dx.

struct MobiusNode final : Node {
    Mat2 m;
    bool linear; // cover selector
    double p, q, theta0;

    MobiusNode(const Mat2& mm, bool lin) : m(mm), linear(lin) {
        double alpha = m.a * m.a + m.c * m.c;
        double beta = m.b * m.b + m.d * m.d;
        double gamma = m.a * m.b + m.c * m.d;
        p = 0.5 * (alpha + beta);
        double qc = 0.5 * (alpha - beta), qs = gamma;
        q = std::hypot(qc, qs);
        theta0 = (q > 0.0) ? std::atan2(qs, qc) : 0.0;
        if (std::abs(m.det() - 1.0) > 1e-9)
            throw std::invalid_argument("Mobius map requires det = 1");
    }

    double phi_rate() const { return linear ? 2.0 * PI : PI; }
    double theta_rate() const { return linear ? 4.0 * PI : 2.0 * PI; }

    double eval(double x) const override {
        double phi = phi_rate() * x;
        double vx = std::cos(phi), vy = std::sin(phi);
        double wx = m.a * vx + m.b * vy, wy = m.c * vx + m.d * vy;
        double out = std::atan2(wy, wx) / phi_rate();
        return wrap_unit(out);
    }

    double usq(double x) const {
        return p + q * std::cos(theta_rate() * x - theta0);
    }

    double deriv(double x) const override { return 1.0 / usq(x); }

    double deriv2(double x) const override {
        double phi = phi_rate() * x;
        double vx = std::cos(phi), vy = std::sin(phi);
        double wx = m.a * vx + m.b * vy, wy = m.c * vx + m.d * vy;
        double wpx = -m.a * vy + m.b * vx, wpy = -m.c * vy + m.d * vx;
        double u = wx * wx + wy * wy;
        return -2.0 * phi_rate() * (wx * wpx + wy * wpy) / (u * u);
    }

    double inverse_eval(double y) const override {
        MobiusNode inv(m.inverse(), linear);
        return inv.eval(y);
    }

    NodePtr inverse() const override { return std::make_shared<MobiusNode>(m.inverse(), linear); }

    Interval log2_range(const Arc& a, int) const override {
        Interval u = u_range(p, q, theta0, theta_rate() * a.start, theta_rate() * a.length);
        return {-std::log2(u.hi), -std::log2(u.lo)};
    }

    double log2_lipschitz(const Arc& a, int) const override {
        double s = u_logslope_max(p, q, theta0, theta_rate() * a.start, theta_rate() * a.length);
        return theta_rate() * s / LN2;
    }

    nlohmann::json to_json() const override {
        return {{"type", linear ? "mobius_linear" : "mobius_projective"},
                {"matrix", {{m.a, m.b}, {m.c, m.d}}}};
    }
};

// --- TrigFlow ----------------------------------------------------------------
//
// Time-t flow of x' = sin(2 k pi x). Branchwise closed form:
//   tan(k pi y) = E tan(k pi x),  E = exp(2 k pi t),
// on each branch between consecutive fixed points l/(2k). Derivative
//   f'(x) = E / (c^2 + E^2 s^2),  c = cos r, s = sin r,  r = k pi x mod pi,
// and c^2 + E^2 s^2 = P - Q cos(2r), P = (1+E^2)/2, Q = (E^2-1)/2.

struct TrigFlowNode final : Node {
    int k;
    double t, E;
    TrigFlowNode(int kk, double tt) : k(kk), t(tt), E(std::exp(2.0 * kk * PI * tt)) {
        if (kk < 1) throw std::invalid_argument("TrigFlow requires k >= 1");
    }

    double eval(double x) const override {
        double u = k * PI * x;
        double mh = std::round(u / PI);
        double r = u - mh * PI; // in [-pi/2, pi/2]
        double rp = std::atan(E * std::tan(r));
        return wrap_unit((mh * PI + rp) / (k * PI));
    }

    double deriv(double x) const override {
        double u = k * PI * x;
        double r = u - std::round(u / PI) * PI;
        double c = std::cos(r), s = std::sin(r);
        return E / (c * c + E * E * s * s);
    }

    double deriv2(double x) const override {
        double u = k * PI * x;
        double r = u - std::round(u / PI) * PI;
        double c = std::cos(r), s = std::sin(r);
        double D = c * c + E * E * s * s;
        return -E * 2.0 * s * c * (E * E - 1.0) * k * PI / (D * D);
    }

    double inverse_eval(double y) const override {
        TrigFlowNode inv(k, -t);
        return inv.eval(y);
    }

    NodePtr inverse() const override { return std::make_shared<TrigFlowNode>(k, -t); }

    Interval log2_range(const Arc& a, int) const override {
        // denominator D(r) = P - Q cos(2r); as a function of x it is
        // P - Q cos(2 k pi x - 0) with theta-rate 2 k pi.
        double P = 0.5 * (1.0 + E * E), Q = 0.5 * (E * E - 1.0);
        // P - Q cos(theta) = P + |Q| cos(theta - pi) for Q >= 0
        double th0 = (Q >= 0.0) ? PI : 0.0;
        Interval D = u_range(P, std::abs(Q), th0, 2.0 * k * PI * a.start, 2.0 * k * PI * a.length);
        return {std::log2(E) - std::log2(D.hi), std::log2(E) - std::log2(D.lo)};
    }

    double log2_lipschitz(const Arc& a, int) const override {
        double P = 0.5 * (1.0 + E * E), Q = 0.5 * (E * E - 1.0);
        double th0 = (Q >= 0.0) ? PI : 0.0;
        double s = u_logslope_max(P, std::abs(Q), th0, 2.0 * k * PI * a.start, 2.0 * k * PI * a.length);
        return 2.0 * k * PI * s / LN2;
    }

    nlohmann::json to_json() const override {
        return {{"type", "trig_flow"}, {"k", k}, {"t", t}};
    }
};

// --- ParabolicBlend ----------------------------------------------------------
//
// g(x) = x + eps * h(x),  h(x) = sin^(2k)(pi x) cos(2 pi x).
// Closed-form global bounds  |h'| <= pi (2k+2)  and  |h''| <= 4 pi^2 (k+1)^2
// feed the Lipschitz widening.

struct ParabolicBlendNode final : Node {
    int k;
    double eps;

    ParabolicBlendNode(int kk, double e) : k(kk), eps(e) {
        if (kk < 1) throw std::invalid_argument("ParabolicBlend requires k >= 1");
        for (int i = 0; i < 10000; ++i) {
            double x = i / 10000.0;
            if (deriv(x) <= 0.0)
                throw std::invalid_argument("ParabolicBlend: derivative not positive on the test grid");
        }
    }

    double h(double x) const {
        double s = std::sin(PI * x);
        return std::pow(s, 2 * k) * std::cos(2.0 * PI * x);
    }
    double hp(double x) const {
        double S = std::sin(PI * x), C = std::cos(PI * x);
        double S2 = std::sin(2.0 * PI * x), C2 = std::cos(2.0 * PI * x);
        return PI * (2.0 * k * std::pow(S, 2 * k - 1) * C * C2 - 2.0 * std::pow(S, 2 * k) * S2);
    }
    double hpp(double x) const {
        double S = std::sin(PI * x), C = std::cos(PI * x);
        double S2 = std::sin(2.0 * PI * x), C2 = std::cos(2.0 * PI * x);
        double s2km2 = (2 * k - 2 == 0) ? 1.0 : std::pow(S, 2 * k - 2);
        return PI * PI *
               (2.0 * k * (2.0 * k - 1.0) * s2km2 * C * C * C2 -
                (2.0 * k + 4.0) * std::pow(S, 2 * k) * C2 -
                8.0 * k * std::pow(S, 2 * k - 1) * C * S2);
    }

    double eval(double x) const override { return wrap_unit(x + eps * h(x)); }
    double deriv(double x) const override { return 1.0 + eps * hp(x); }
    double deriv2(double x) const override { return eps * hpp(x); }

    double inverse_eval(double y) const override {
        // monotone solve of x + eps h(x) = y in the lift around y
        double bound = std::abs(eps) + 1e-12;
        double lo = y - bound, hi = y + bound;
        auto f = [&](double x) { return x + eps * h(x) - y; };
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0)
                hi = mid;
            else
                lo = mid;
            if (hi - lo < 1e-16) break;
        }
        double x = 0.5 * (lo + hi);
        for (int i = 0; i < 4; ++i) x -= f(x) / deriv(x); // polish
        return wrap_unit(x);
    }

    NodePtr inverse() const override; // wrapped below

    double hpp_bound() const { return 4.0 * PI * PI * (k + 1.0) * (k + 1.0); }

    Interval log2_range(const Arc& a, int grid) const override {
        grid = std::max(grid, 2);
        double hstep = a.length / (grid - 1);
        double lo = 1e300, hi = -1e300, dmin = 1e300;
        for (int i = 0; i < grid; ++i) {
            double d = deriv(a.point_at(static_cast<double>(i) / (grid - 1)));
            dmin = std::min(dmin, d);
            double ld = std::log2(d);
            lo = std::min(lo, ld);
            hi = std::max(hi, ld);
        }
        double dmin_cert = dmin - std::abs(eps) * hpp_bound() * hstep;
        if (dmin_cert <= 0.0)
            throw UnboundedDistortion("ParabolicBlend: cannot certify a positive derivative floor on the arc");
        double L = std::abs(eps) * hpp_bound() / (dmin_cert * LN2);
        return Interval{lo, hi}.widened(L * hstep);
    }

    double log2_lipschitz(const Arc& a, int grid) const override {
        grid = std::max(grid, 2);
        double hstep = a.length / (grid - 1);
        double dmin = 1e300;
        for (int i = 0; i < grid; ++i)
            dmin = std::min(dmin, deriv(a.point_at(static_cast<double>(i) / (grid - 1))));
        double dmin_cert = dmin - std::abs(eps) * hpp_bound() * hstep;
        if (dmin_cert <= 0.0)
            throw UnboundedDistortion("ParabolicBlend: cannot certify a positive derivative floor on the arc");
        return std::abs(eps) * hpp_bound() / (dmin_cert * LN2);
    }

    nlohmann::json to_json() const override {
        return {{"type", "parabolic_blend"}, {"k", k}, {"eps", eps}};
    }
};

// --- Inverse wrapper (for nodes without a closed-form inverse) ---------------

struct InverseNode final : Node {
    NodePtr inner;
    explicit InverseNode(NodePtr n) : inner(std::move(n)) {}

    double eval(double x) const override { return inner->inverse_eval(x); }
    double deriv(double x) const override { return 1.0 / inner->deriv(inner->inverse_eval(x)); }
    double deriv2(double x) const override {
        double z = inner->inverse_eval(x);
        double d1 = inner->deriv(z);
        return -inner->deriv2(z) / (d1 * d1 * d1);
    }
    double inverse_eval(double y) const override { return inner->eval(y); }
    NodePtr inverse() const override { return inner; }

    Interval log2_range(const Arc& a, int grid) const override {
        Arc pre = image_of(*this, a); // = inner^{-1}(a)
        Interval r = inner->log2_range(pre, grid);
        return {-r.hi, -r.lo};
    }

    double log2_lipschitz(const Arc& a, int grid) const override {
        // |d/dy log f^-1'(y)| = |(log f')'(x)| / f'(x) at x = f^-1(y)
        Arc pre = image_of(*this, a);
        Interval r = inner->log2_range(pre, grid);
        double inv_min_deriv = std::pow(2.0, -r.lo);
        return inner->log2_lipschitz(pre, grid) * inv_min_deriv;
    }

    nlohmann::json to_json() const override {
        return {{"type", "inverse"}, {"of", inner->to_json()}};
    }
};

NodePtr ParabolicBlendNode::inverse() const {
    return std::make_shared<InverseNode>(std::make_shared<ParabolicBlendNode>(*this));
}

// --- Compose ------------------------------------------------------------------

struct ComposeNode final : Node {
    std::vector<NodePtr> members; // applied right to left: members.front() outermost
    explicit ComposeNode(std::vector<NodePtr> ms) : members(std::move(ms)) {}

    double eval(double x) const override {
        double y = x;
        for (auto it = members.rbegin(); it != members.rend(); ++it) y = (*it)->eval(y);
        return y;
    }

    double deriv(double x) const override {
        double y = x, d = 1.0;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            d *= (*it)->deriv(y);
            y = (*it)->eval(y);
        }
        return d;
    }

    double deriv2(double x) const override {
        double y = x, d1 = 1.0, d2 = 0.0;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            const Node& m = **it;
            double md1 = m.deriv(y), md2 = m.deriv2(y);
            d2 = md2 * d1 * d1 + md1 * d2;
            d1 = md1 * d1;
            y = m.eval(y);
        }
        return d2;
    }

    double inverse_eval(double y) const override {
        double x = y;
        for (const auto& m : members) x = m->inverse_eval(x);
        return x;
    }

    NodePtr inverse() const override {
        std::vector<NodePtr> inv;
        inv.reserve(members.size());
        for (auto it = members.rbegin(); it != members.rend(); ++it) inv.push_back((*it)->inverse());
        return std::make_shared<ComposeNode>(std::move(inv));
    }

    Interval log2_range(const Arc& a, int grid) const override {
        Arc cur = a;
        Interval total{0.0, 0.0};
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            total += (*it)->log2_range(cur, grid);
            cur = image_of(**it, cur);
        }
        return total;
    }

    double log2_lipschitz(const Arc& a, int grid) const override {
        // Lip(log (f o g)') <= Lip(log g') + sup g' * Lip(log f') on g(arc)
        Arc cur = a;
        double lip = 0.0, sup_log2 = 0.0;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            lip += std::pow(2.0, sup_log2) * (*it)->log2_lipschitz(cur, grid);
            sup_log2 += (*it)->log2_range(cur, grid).hi;
            cur = image_of(**it, cur);
        }
        return lip;
    }

    nlohmann::json to_json() const override {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& m : members) arr.push_back(m->to_json());
        return arr;
    }
};

// ---------------------------------------------------------------------------
// CircleMap facade

CircleMap::CircleMap() : node_(std::make_shared<RotationNode>(0.0)) {}

CircleMap CircleMap::rotation(double alpha) { return CircleMap(std::make_shared<RotationNode>(alpha)); }
CircleMap CircleMap::mobius_projective(const Mat2& m) { return CircleMap(std::make_shared<MobiusNode>(m, false)); }
CircleMap CircleMap::mobius_linear(const Mat2& m) { return CircleMap(std::make_shared<MobiusNode>(m, true)); }
CircleMap CircleMap::trig_flow(int k, double t) { return CircleMap(std::make_shared<TrigFlowNode>(k, t)); }
CircleMap CircleMap::parabolic_blend(int k, double eps) { return CircleMap(std::make_shared<ParabolicBlendNode>(k, eps)); }

CircleMap CircleMap::compose(std::vector<CircleMap> members) {
    std::vector<NodePtr> ns;
    ns.reserve(members.size());
    for (auto& m : members) {
        // flatten nested compositions
        if (auto c = dynamic_cast<const ComposeNode*>(m.node_.get())) {
            for (const auto& sub : c->members) ns.push_back(sub);
        } else {
            ns.push_back(m.node_);
        }
    }
    if (ns.empty()) return CircleMap();
    if (ns.size() == 1) return CircleMap(ns.front());
    return CircleMap(std::make_shared<ComposeNode>(std::move(ns)));
}

CircleMap CircleMap::conjugate(const CircleMap& inner, const CircleMap& by) {
    return compose({by, inner, by.inverse()});
}

CircleMap CircleMap::inverse() const { return CircleMap(node_->inverse()); }

double CircleMap::eval(double x) const { return node_->eval(wrap_unit(x)); }

double CircleMap::deriv(double x) const {
    double d = node_->deriv(wrap_unit(x));
    if (!(d > 0.0)) throw std::domain_error("CircleMap: non-positive derivative");
    return d;
}

double CircleMap::deriv2(double x) const { return node_->deriv2(wrap_unit(x)); }
double CircleMap::log2_deriv(double x) const { return std::log2(deriv(x)); }
double CircleMap::inverse_eval(double y) const { return node_->inverse_eval(wrap_unit(y)); }

Arc CircleMap::image(const Arc& a) const { return image_of(*node_, a); }
Arc CircleMap::preimage(const Arc& a) const { return inverse().image(a); }

Interval CircleMap::log2_deriv_range(const Arc& a, int grid) const { return node_->log2_range(a, grid); }
double CircleMap::log2_deriv_lipschitz(const Arc& a, int grid) const { return node_->log2_lipschitz(a, grid); }

nlohmann::json CircleMap::to_json() const { return node_->to_json(); }

bool CircleMap::is_identity() const {
    for (int i = 0; i < 64; ++i) {
        double x = i / 64.0;
        if (circ_dist(eval(x), x) > 1e-12) return false;
    }
    return true;
}

CircleMap CircleMap::from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        std::vector<CircleMap> ms;
        for (const auto& e : j) ms.push_back(from_json(e));
        return compose(std::move(ms));
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "rotation") return rotation(j.at("alpha").get<double>());
    if (type == "mobius_projective" || type == "mobius_linear") {
        auto mj = j.at("matrix");
        Mat2 m{mj[0][0].get<double>(), mj[0][1].get<double>(), mj[1][0].get<double>(), mj[1][1].get<double>()};
        return type == "mobius_linear" ? mobius_linear(m) : mobius_projective(m);
    }
    if (type == "trig_flow") return trig_flow(j.at("k").get<int>(), j.at("t").get<double>());
    if (type == "parabolic_blend") return parabolic_blend(j.at("k").get<int>(), j.at("eps").get<double>());
    if (type == "inverse") return from_json(j.at("of")).inverse();
    if (type == "conjugate") return conjugate(from_json(j.at("inner")), from_json(j.at("by")));
    throw ValidationError("unknown map type: " + type);
}

// ---------------------------------------------------------------------------
// Distortion

DistortionEstimate distortion(const CircleMap& m, const Arc& a, int grid) {
    grid = std::max(grid, 2);
    double hstep = a.length / (grid - 1);
    std::vector<double> ld(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i)
        ld[static_cast<std::size_t>(i)] = m.log2_deriv(a.point_at(static_cast<double>(i) / (grid - 1)));
    double lo = ld[0], hi = ld[0], dd = 0.0;
    for (int i = 1; i < grid; ++i) {
        lo = std::min(lo, ld[static_cast<std::size_t>(i)]);
        hi = std::max(hi, ld[static_cast<std::size_t>(i)]);
        dd = std::max(dd, std::abs(ld[static_cast<std::size_t>(i)] - ld[static_cast<std::size_t>(i) - 1]) / hstep);
    }
    double L = m.log2_deriv_lipschitz(a, grid);
    DistortionEstimate out;
    out.kappa = (hi - lo) + 2.0 * std::min(L, dd + L * hstep) * hstep;
    out.kappa_tilde = dd;
    if (out.kappa_tilde == 0.0 && hi == lo) out.kappa = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Fixed points

namespace {

double displacement(const CircleMap& m, double x) { return wrap_signed(m.eval(x) - x); }

// Scaling exponent of |phi| near a root: slope of log2|phi(x0 + u)| in log2 u.
int multiplicity_from_scaling(const CircleMap& m, double x0) {
    std::vector<double> xs, ys;
    for (int side = -1; side <= 1; side += 2) {
        for (int j = 3; j <= 9; ++j) {
            double u = side * std::pow(2.0, -j - 3); // 2^-6 .. 2^-12
            double v = std::abs(displacement(m, x0 + u));
            if (v > 1e-13) {
                xs.push_back(std::log2(std::abs(u)));
                ys.push_back(std::log2(v));
            }
        }
    }
    if (xs.size() < 3) return 2;
    SlopeFit f = fit_slope(xs, ys);
    int mult = static_cast<int>(std::lround(f.slope));
    return std::max(1, mult);
}

} // namespace

const char* kind_name(FixedPointRecord::Kind k) {
    switch (k) {
        case FixedPointRecord::Kind::attracting: return "attracting";
        case FixedPointRecord::Kind::repelling: return "repelling";
        default: return "parabolic";
    }
}

namespace {

// Roots of phi(x) = m(x) - x that the forward scan can resolve: attracting
// and moderately repelling fixed points. Very strong repellers make phi
// wrap within an ulp of the root and are invisible here; the caller finds
// them as attractors of the inverse map.
void scan_fixed_points(const CircleMap& m, int grid, std::vector<double>& roots) {
    auto push_root = [&](double x) {
        x = wrap_unit(x);
        for (double r : roots)
            if (circ_dist(r, x) < 1e-9) return;
        roots.push_back(x);
    };

    auto bisect_phi = [&](double a, double b) {
        double fa = displacement(m, a);
        for (int it = 0; it < 64; ++it) {
            double mid = 0.5 * (a + b);
            double fm = displacement(m, mid);
            if ((fa <= 0.0) == (fm <= 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
            if (b - a < 1e-14) break;
        }
        return 0.5 * (a + b);
    };

    double prev = displacement(m, 0.0);
    for (int i = 0; i < grid; ++i) {
        double a = static_cast<double>(i) / grid, b = static_cast<double>(i + 1) / grid;
        double fa = prev;
        double fb = displacement(m, b < 1.0 ? b : 0.0);
        prev = fb;
        if (fa == 0.0) push_root(a);
        if (std::abs(fa) + std::abs(fb) > 0.9) continue; // wrap jump, not a crossing
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) push_root(bisect_phi(a, b));
    }

    // tangential zeros: extrema of phi (sign changes of m' - 1) touching zero
    double prev_psi = m.deriv(0.0) - 1.0;
    for (int i = 1; i <= grid; ++i) {
        double x = static_cast<double>(i % grid) / grid;
        double psi = m.deriv(x) - 1.0;
        if ((prev_psi < 0.0 && psi > 0.0) || (prev_psi > 0.0 && psi < 0.0)) {
            double a = static_cast<double>(i - 1) / grid, b = static_cast<double>(i) / grid;
            double fa = m.deriv(a) - 1.0;
            for (int it = 0; it < 64; ++it) {
                double mid = 0.5 * (a + b);
                double fm = m.deriv(mid) - 1.0;
                if ((fa <= 0.0) == (fm <= 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            double xs = 0.5 * (a + b);
            if (std::abs(displacement(m, xs)) < 1e-10) push_root(xs);
        }
        prev_psi = psi;
    }
}

} // namespace

std::vector<FixedPointRecord> find_fixed_points(const CircleMap& m, int grid) {
    grid = std::max(grid, 16);
    double max_abs = 0.0;
    for (int i = 0; i < grid; ++i)
        max_abs = std::max(max_abs, std::abs(displacement(m, static_cast<double>(i) / grid)));
    if (max_abs < 1e-9) throw std::invalid_argument("find_fixed_points: map is the identity within tolerance");

    CircleMap mi = m.inverse();
    std::vector<double> fwd_roots, bwd_roots;
    scan_fixed_points(m, grid, fwd_roots);
    scan_fixed_points(mi, grid, bwd_roots);

    std::vector<std::pair<double, bool>> tagged; // (location, from_inverse)
    for (double r : fwd_roots) tagged.emplace_back(r, false);
    for (double r : bwd_roots) {
        bool dup = false;
        for (double f : fwd_roots) dup = dup || circ_dist(f, r) < 1e-9;
        if (!dup) tagged.emplace_back(r, true);
    }

    if (static_cast<int>(tagged.size()) > grid / 10)
        throw TooManyFixedPoints("find_fixed_points: grid too coarse for the number of fixed points");

    std::sort(tagged.begin(), tagged.end());
    std::vector<FixedPointRecord> out;
    for (auto [r, from_inverse] : tagged) {
        FixedPointRecord rec;
        rec.location = r;
        // the derivative at a root located through the inverse map is only
        // trustworthy through the inverse chain
        rec.multiplier = from_inverse ? 1.0 / mi.deriv(r) : m.deriv(r);
        if (std::abs(rec.multiplier - 1.0) <= 1e-6) {
            rec.kind = FixedPointRecord::Kind::parabolic;
            rec.multiplicity = std::max(2, multiplicity_from_scaling(m, r));
        } else {
            rec.multiplicity = 1;
            rec.kind = rec.multiplier < 1.0 ? FixedPointRecord::Kind::attracting
                                            : FixedPointRecord::Kind::repelling;
        }
        out.push_back(rec);
    }
    return out;
}

} // namespace circledim::maps

// ---------------------------------------------------------------------------
// small shared utilities declared in circle.hpp

namespace circledim {

std::vector<Arc> complement_arcs(std::vector<Arc> arcs) {
    if (arcs.empty()) return {Arc::full()};
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
    std::vector<Arc> out;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        double e = arcs[i].end();
        double next = arcs[(i + 1) % arcs.size()].start;
        double len = wrap_unit(next - e);
        if (len > 1e-12) out.push_back(Arc{e, len});
    }
    return out;
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    SlopeFit f;
    if (std::abs(denom) < 1e-30) return f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < n; ++i)
        f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.slope * x[i] - f.intercept));
    return f;
}

} // namespace circledim
