#include "circledim/dim.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace circledim::dim {

namespace {

long long cell_of(double x, int level) {
    double scaled = wrap_unit(x) * std::pow(2.0, level);
    long long c = static_cast<long long>(scaled);
    long long max = 1LL << std::min(level, 62);
    if (c >= max) c = max - 1;
    return c;
}

DimEstimate fit_levels(const std::vector<double>& ns, const std::vector<double>& ys, int lo, int hi,
                       const std::string& method) {
    bool constant = true;
    for (double y : ys)
        if (std::abs(y - ys.front()) > 1e-12) constant = false;
    // a constant occupied count carries slope 0 (finitely many isolated
    // points); it is only uninformative when a single cell is ever occupied
    if (constant && method == "box" && ys.front() < 0.5)
        throw DegenerateFit("box_dim: a single occupied cell across the window");
    SlopeFit f = fit_slope(ns, ys);
    DimEstimate est;
    est.value = std::clamp(f.slope, 0.0, 1.0);
    est.level_lo = lo;
    est.level_hi = hi;
    est.fit_residual = f.max_residual;
    est.method = method;
    return est;
}

} // namespace

DimEstimate box_dim(std::span<const double> points, int level_lo, int level_hi) {
    if (level_lo >= level_hi) throw ValidationError("box_dim: level_lo < level_hi required");
    std::vector<double> ns, ys;
    for (int n = level_lo; n <= level_hi; ++n) {
        std::unordered_set<long long> cells;
        for (double x : points) cells.insert(cell_of(x, n));
        ns.push_back(static_cast<double>(n));
        ys.push_back(std::log2(static_cast<double>(cells.size())));
    }
    return fit_levels(ns, ys, level_lo, level_hi, "box");
}

DimEstimate entropy_dim(const walk::EmpiricalMeasure& nu, int level_lo, int level_hi) {
    if (level_lo >= level_hi) throw ValidationError("entropy_dim: level_lo < level_hi required");
    std::vector<double> ns, ys;
    for (int n = level_lo; n <= level_hi; ++n) {
        // points are sorted, cells are visited in order
        double H = 0.0;
        std::size_t i = 0;
        while (i < nu.points.size()) {
            long long cell = cell_of(nu.points[i], n);
            double mass = 0.0;
            while (i < nu.points.size() && cell_of(nu.points[i], n) == cell) {
                mass += nu.weights[i];
                ++i;
            }
            if (mass > 0.0) H -= mass * std::log2(mass);
        }
        ns.push_back(static_cast<double>(n));
        ys.push_back(H);
    }
    return fit_levels(ns, ys, level_lo, level_hi, "entropy");
}

std::vector<std::pair<int, double>> dyadic_profile(const walk::EmpiricalMeasure& nu, int level_lo,
                                                   int level_hi, const std::string& method) {
    std::vector<std::pair<int, double>> out;
    for (int n = level_lo; n <= level_hi; ++n) {
        if (method == "box") {
            std::unordered_set<long long> cells;
            for (double x : nu.points) cells.insert(cell_of(x, n));
            out.emplace_back(n, static_cast<double>(cells.size()));
        } else {
            double H = 0.0;
            std::size_t i = 0;
            while (i < nu.points.size()) {
                long long cell = cell_of(nu.points[i], n);
                double mass = 0.0;
                while (i < nu.points.size() && cell_of(nu.points[i], n) == cell) {
                    mass += nu.weights[i];
                    ++i;
                }
                if (mass > 0.0) H -= mass * std::log2(mass);
            }
            out.emplace_back(n, H);
        }
    }
    return out;
}

double moran_dim(std::span<const double> ratios) {
    if (ratios.empty()) throw ValidationError("moran_dim: empty ratio list");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw ValidationError("moran_dim: ratios must lie in (0,1)");
    auto f = [&](double s) {
        double total = 0.0;
        for (double r : ratios) total += std::pow(r, s);
        return total - 1.0;
    };
    if (f(0.0) <= 0.0) return 0.0; // single branch
    double lo = 0.0, hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Transfer-operator pressure

double pressure_root(const std::vector<PressureBranch>& branches, const std::vector<Arc>& arcs,
                     const std::vector<std::vector<int>>& allowed, int grid_per_arc) {
    const int nb = static_cast<int>(branches.size());
    const int na = static_cast<int>(arcs.size());
    const int G = std::max(grid_per_arc, 4);

    auto may_apply = [&](int branch, int arc) {
        if (allowed.empty()) return true;
        return allowed[static_cast<std::size_t>(branch)][static_cast<std::size_t>(arc)] != 0;
    };

    // Precompute, for each (branch, source node): weight slot position of the
    // image inside the branch's target arc. The target arc of branch i is the
    // arc containing its images (they all land in one arc by precondition).
    struct Jump {
        int target_arc;
        double t; // position in [0, 1] along the target arc
        double deriv;
    };
    std::vector<std::vector<std::vector<Jump>>> jumps(
        static_cast<std::size_t>(nb),
        std::vector<std::vector<Jump>>(static_cast<std::size_t>(na)));

    auto locate = [&](double x) -> std::pair<int, double> {
        for (int a = 0; a < na; ++a) {
            const Arc& arc = arcs[static_cast<std::size_t>(a)];
            double off = wrap_unit(x - arc.start);
            if (off <= arc.length + 1e-12) return {a, std::clamp(off / arc.length, 0.0, 1.0)};
        }
        return {-1, 0.0};
    };

    for (int b = 0; b < nb; ++b) {
        for (int a = 0; a < na; ++a) {
            if (!may_apply(b, a)) continue;
            auto& col = jumps[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
            col.resize(static_cast<std::size_t>(G));
            for (int g = 0; g < G; ++g) {
                double x = arcs[static_cast<std::size_t>(a)].point_at(static_cast<double>(g) / (G - 1));
                double y = branches[static_cast<std::size_t>(b)].eval(x);
                auto [ta, t] = locate(y);
                if (ta < 0) throw NotContracting("pressure: branch image escapes the arc system");
                col[static_cast<std::size_t>(g)] = {ta, t, branches[static_cast<std::size_t>(b)].deriv(x)};
            }
        }
    }

    auto radius_at = [&](double s) {
        std::vector<std::vector<double>> phi(static_cast<std::size_t>(na),
                                             std::vector<double>(static_cast<std::size_t>(G), 1.0));
        double lambda = 1.0;
        double prev = -1.0;
        for (int iter = 0; iter < 500; ++iter) {
            std::vector<std::vector<double>> next(static_cast<std::size_t>(na),
                                                  std::vector<double>(static_cast<std::size_t>(G), 0.0));
            for (int a = 0; a < na; ++a) {
                for (int g = 0; g < G; ++g) {
                    double acc = 0.0;
                    for (int b = 0; b < nb; ++b) {
                        if (!may_apply(b, a)) continue;
                        const Jump& J = jumps[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)][static_cast<std::size_t>(g)];
                        // linear interpolation of phi on the target arc
                        double pos = J.t * (G - 1);
                        int i0 = std::min(static_cast<int>(pos), G - 2);
                        double fr = pos - i0;
                        double val = (1.0 - fr) * phi[static_cast<std::size_t>(J.target_arc)][static_cast<std::size_t>(i0)] +
                                     fr * phi[static_cast<std::size_t>(J.target_arc)][static_cast<std::size_t>(i0 + 1)];
                        acc += std::pow(J.deriv, s) * val;
                    }
                    next[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)] = acc;
                }
            }
            double norm = 0.0;
            for (const auto& row : next)
                for (double v : row) norm = std::max(norm, v);
            if (norm <= 0.0) return 0.0;
            for (auto& row : next)
                for (auto& v : row) v /= norm;
            phi = std::move(next);
            lambda = norm;
            if (prev > 0.0 && std::abs(lambda - prev) < 1e-10 * lambda && iter > 20) break;
            prev = lambda;
        }
        return lambda;
    };

    double lo = 0.0, hi = 1.0;
    if (radius_at(0.0) <= 1.0) return 0.0;
    while (radius_at(hi) > 1.0 && hi < 4.0) hi += 0.5;
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        if (radius_at(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-6) break;
    }
    return 0.5 * (lo + hi);
}

DimEstimate pressure_dim(const std::vector<maps::CircleMap>& contractions, const std::vector<Arc>& arcs,
                         const std::vector<std::vector<int>>& allowed, int grid_per_arc) {
    const int nb = static_cast<int>(contractions.size());
    const int na = static_cast<int>(arcs.size());
    if (nb == 0 || na == 0) throw ValidationError("pressure_dim: empty system");
    for (int i = 0; i < na; ++i)
        for (int j = i + 1; j < na; ++j)
            if (!arcs_disjoint(arcs[static_cast<std::size_t>(i)], arcs[static_cast<std::size_t>(j)]))
                throw OverlapDetected("pressure_dim: arcs overlap");

    auto may_apply = [&](int branch, int arc) {
        if (allowed.empty()) return true;
        return allowed[static_cast<std::size_t>(branch)][static_cast<std::size_t>(arc)] != 0;
    };

    // each map must send its allowed source arcs strictly into a single arc
    for (int b = 0; b < nb; ++b) {
        int target = -1;
        for (int a = 0; a < na; ++a) {
            if (!may_apply(b, a)) continue;
            Arc img = contractions[static_cast<std::size_t>(b)].image(arcs[static_cast<std::size_t>(a)]);
            int found = -1;
            for (int t = 0; t < na; ++t)
                if (arc_containment_margin(arcs[static_cast<std::size_t>(t)], img) > 0.0) found = t;
            if (found < 0) throw NotContracting("pressure_dim: a branch does not map strictly into an arc");
            if (target >= 0 && found != target)
                throw NotContracting("pressure_dim: a branch maps into two different arcs");
            target = found;
        }
    }

    std::vector<PressureBranch> branches;
    for (const auto& m : contractions)
        branches.push_back({[m](double x) { return m.eval(x); }, [m](double x) { return m.deriv(x); }});

    DimEstimate est;
    est.value = pressure_root(branches, arcs, allowed, grid_per_arc);
    est.method = "pressure";
    est.level_lo = est.level_hi = 0;
    est.fit_residual = 0.0;
    return est;
}

DimFormulaRecord dim_formula_check(const walk::WalkMeasure& mu, const DimFormulaParams& p) {
    DimFormulaRecord rec;
    auto h = walk::rw_entropy(mu, p.entropy_n, p.entropy_resolution, p.entropy_cap);
    rec.h_rw = h.h;
    auto lam = walk::lyapunov(mu, p.x0, p.lyap_n, p.lyap_trials, p.seed);
    rec.lyap = lam.lambda;
    auto samp = walk::stationary_sample(mu, p.burn, p.sample_count, p.chains, p.seed ^ 0x5177u);
    rec.measured_dim = entropy_dim(samp.nu, p.level_lo, p.level_hi).value;
    rec.predicted_dim = std::abs(rec.lyap) > 1e-12 ? rec.h_rw / std::abs(rec.lyap) : 0.0;
    rec.gap = std::abs(rec.predicted_dim - rec.measured_dim);
    return rec;
}

} // namespace circledim::dim
