#include "circledim/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace circledim::hyperbolic {

using maps::CircleMap;
using maps::FixedPointRecord;

namespace {

constexpr double kConeMargin = 1e-6; // required slack for certified inclusions

std::vector<Arc> all_cones(const ConeSet& c) {
    std::vector<Arc> out;
    for (const auto* v : {&c.u1_plus, &c.u2_plus, &c.u1_minus, &c.u2_minus})
        out.insert(out.end(), v->begin(), v->end());
    return out;
}

// Certified upper bound of log2 h' over the complement of the cone union.
double sup_log2_outside(const CircleMap& h, const std::vector<Arc>& cones, int grid) {
    double sup = -1e300;
    for (const Arc& a : complement_arcs(cones))
        sup = std::max(sup, h.log2_deriv_range(a, grid).hi);
    return sup;
}

struct InclusionCheck {
    bool ok = true;
    double margin = 1e300;
    double witness = 0.0;
};

// h(complement of source cones) must land inside the target cones,
// component by component.
InclusionCheck check_mapping(const CircleMap& h, const std::vector<Arc>& source,
                             const std::vector<Arc>& target) {
    InclusionCheck out;
    for (const Arc& piece : complement_arcs(source)) {
        Arc img = h.image(piece);
        double best = -1e300;
        for (const Arc& t : target) best = std::max(best, arc_containment_margin(t, img));
        if (best < out.margin) {
            out.margin = best;
            out.witness = piece.midpoint();
        }
        if (best < kConeMargin) out.ok = false;
    }
    return out;
}

} // namespace

std::optional<ConeSet> cones_from_fixed_points(const std::vector<FixedPointRecord>& f1,
                                               const std::vector<FixedPointRecord>& f2) {
    std::vector<double> pts;
    for (const auto& r : f1) pts.push_back(r.location);
    for (const auto& r : f2) pts.push_back(r.location);
    if (pts.size() < 4) return std::nullopt;
    std::sort(pts.begin(), pts.end());
    double min_gap = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        min_gap = std::min(min_gap, wrap_unit(pts[(i + 1) % pts.size()] - pts[i]));
    if (min_gap < 1e-9) return std::nullopt;
    double rho = min_gap / 4.0;
    ConeSet cones;
    for (const auto& r : f1)
        (r.kind == FixedPointRecord::Kind::attracting ? cones.u1_plus : cones.u1_minus)
            .push_back(Arc::ball(r.location, rho));
    for (const auto& r : f2)
        (r.kind == FixedPointRecord::Kind::attracting ? cones.u2_plus : cones.u2_minus)
            .push_back(Arc::ball(r.location, rho));
    return cones;
}

CertifyResult certify_pingpong(const CircleMap& h1, const CircleMap& h2, const ConeSet& cones,
                               int grid) {
    PingpongCertificate cert;
    cert.cones = cones;
    const std::size_t q = cones.u1_plus.size();
    if (q == 0 || cones.u2_plus.size() != q || cones.u1_minus.size() != q || cones.u2_minus.size() != q)
        return PingpongRefusal{3, 0.0, "cone sets must have q components each"};
    cert.q = static_cast<int>(q);

    // (1) each map has exactly 2q hyperbolic fixed points
    std::vector<FixedPointRecord> f1, f2;
    try {
        f1 = maps::find_fixed_points(h1, grid);
        f2 = maps::find_fixed_points(h2, grid);
    } catch (const std::exception& e) {
        return PingpongRefusal{1, 0.0, e.what()};
    }
    for (const auto* f : {&f1, &f2}) {
        if (f->size() != 2 * q)
            return PingpongRefusal{1, f->empty() ? 0.0 : f->front().location, "fixed point count != 2q"};
        for (const auto& r : *f)
            if (r.kind == FixedPointRecord::Kind::parabolic)
                return PingpongRefusal{1, r.location, "parabolic fixed point"};
    }
    cert.fixed_points_h1 = f1;
    cert.fixed_points_h2 = f2;
    double m1 = 1e300;
    for (const auto* f : {&f1, &f2})
        for (const auto& r : *f) m1 = std::min(m1, std::abs(r.multiplier - 1.0));
    cert.margins[0] = m1;

    // (2) cyclic arrangement: attractor, attractor, repellor, repellor, ...
    struct Tagged {
        double x;
        int owner; // 1 or 2
        bool attracting;
    };
    std::vector<Tagged> tags;
    for (const auto& r : f1) tags.push_back({r.location, 1, r.kind == FixedPointRecord::Kind::attracting});
    for (const auto& r : f2) tags.push_back({r.location, 2, r.kind == FixedPointRecord::Kind::attracting});
    std::sort(tags.begin(), tags.end(), [](const Tagged& a, const Tagged& b) { return a.x < b.x; });
    double min_fp_gap = 1.0;
    for (std::size_t i = 0; i < tags.size(); ++i)
        min_fp_gap = std::min(min_fp_gap, wrap_unit(tags[(i + 1) % tags.size()].x - tags[i].x));
    if (min_fp_gap < 1e-9)
        return PingpongRefusal{2, tags.front().x, "coincident fixed points"};
    // rotate so that a block starts at an attractor preceded by a repellor
    std::size_t start = 0;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i].attracting && !tags[(i + tags.size() - 1) % tags.size()].attracting) {
            start = i;
            break;
        }
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const Tagged& t = tags[(start + i) % tags.size()];
        bool want_attracting = (i % 4) < 2;
        if (t.attracting != want_attracting)
            return PingpongRefusal{2, t.x, "fixed points not in the attractor/attractor/repellor/repellor pattern"};
        // within each block the two owners must differ
        if (i % 2 == 1) {
            const Tagged& prev = tags[(start + i - 1) % tags.size()];
            if (prev.owner == t.owner)
                return PingpongRefusal{2, t.x, "adjacent same-map fixed points inside a block"};
        }
    }
    cert.margins[1] = min_fp_gap;

    // (3) each cone component contains exactly one fixed point of the right kind
    double m3 = 1e300;
    auto check_cones = [&](const std::vector<Arc>& cs, const std::vector<FixedPointRecord>& f,
                           bool attracting) -> std::optional<PingpongRefusal> {
        for (const Arc& c : cs) {
            int inside = 0;
            double margin = -1.0;
            for (const auto& r : f) {
                bool right_kind = (r.kind == FixedPointRecord::Kind::attracting) == attracting;
                if (c.contains(r.location) && right_kind) {
                    ++inside;
                    margin = std::min(wrap_unit(r.location - c.start), wrap_unit(c.end() - r.location));
                }
            }
            if (inside != 1)
                return PingpongRefusal{3, c.midpoint(), "cone component without exactly one matching fixed point"};
            m3 = std::min(m3, margin);
        }
        return std::nullopt;
    };
    if (auto r = check_cones(cones.u1_plus, f1, true)) return *r;
    if (auto r = check_cones(cones.u1_minus, f1, false)) return *r;
    if (auto r = check_cones(cones.u2_plus, f2, true)) return *r;
    if (auto r = check_cones(cones.u2_minus, f2, false)) return *r;
    cert.margins[2] = m3;

    // (4) closures pairwise disjoint
    auto cs = all_cones(cones);
    double min_cone_gap = 1.0;
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
            min_cone_gap = std::min(min_cone_gap, arc_gap(cs[i], cs[j]));
    if (min_cone_gap < kConeMargin)
        return PingpongRefusal{4, cs.front().midpoint(), "cone closures intersect"};
    cert.margins[3] = min_cone_gap;

    // (5) mapping inclusions
    double m5 = 1e300;
    struct Case {
        const CircleMap* map;
        const std::vector<Arc>* source;
        const std::vector<Arc>* target;
    };
    CircleMap h1i = h1.inverse(), h2i = h2.inverse();
    std::vector<Case> cases = {{&h1, &cones.u1_minus, &cones.u1_plus},
                               {&h2, &cones.u2_minus, &cones.u2_plus},
                               {&h1i, &cones.u1_plus, &cones.u1_minus},
                               {&h2i, &cones.u2_plus, &cones.u2_minus}};
    for (const auto& c : cases) {
        InclusionCheck chk = check_mapping(*c.map, *c.source, *c.target);
        if (!chk.ok) return PingpongRefusal{5, chk.witness, "mapping inclusion fails"};
        m5 = std::min(m5, chk.margin);
    }
    cert.margins[4] = m5;

    // (6) contraction outside the respective cones
    double m6 = 1e300;
    struct DCase {
        const CircleMap* map;
        const std::vector<Arc>* cones;
    };
    std::vector<DCase> dcases = {{&h1, &cones.u1_minus},
                                 {&h2, &cones.u2_minus},
                                 {&h1i, &cones.u1_plus},
                                 {&h2i, &cones.u2_plus}};
    for (const auto& c : dcases) {
        double sup = sup_log2_outside(*c.map, *c.cones, 512);
        if (sup >= 0.0) {
            PingpongRefusal r;
            r.condition = 6;
            r.witness = complement_arcs(*c.cones).front().midpoint();
            r.detail = "derivative not below 1 outside the cone";
            return r;
        }
        m6 = std::min(m6, -sup);
    }
    cert.margins[5] = m6;
    return cert;
}

std::optional<PingpongSearchResult> search_pingpong(const walk::WalkMeasure& mu, const Arc& target_arc,
                                                    int max_power, int seeds, std::uint64_t seed) {
    mu.validate();
    struct Candidate {
        words::Word w;
        CircleMap map;
        std::vector<FixedPointRecord> fps;
        bool in_target = false;
    };
    std::vector<Candidate> pool;

    for (int s = 0; s < seeds; ++s) {
        int len = 2 + s % 5;
        words::Word w = walk::sample_word(mu, len, seed ^ static_cast<std::uint64_t>(0x9e37 + s));
        // highest power first: weak candidates cannot satisfy the one-step
        // cone inclusions even when their fixed points are hyperbolic
        for (int p = max_power; p >= 1; --p) {
            words::Word wp = words::power(w, p);
            CircleMap h = words::word_map(mu.alphabet, wp);
            std::vector<FixedPointRecord> fps;
            try {
                fps = maps::find_fixed_points(h, 4096);
            } catch (const std::exception&) {
                continue;
            }
            if (fps.empty()) continue;
            bool all_hyp = true;
            bool has_attr = false, has_rep = false, attr_in_target = false;
            for (const auto& r : fps) {
                if (r.kind == FixedPointRecord::Kind::parabolic) all_hyp = false;
                if (r.kind == FixedPointRecord::Kind::attracting) {
                    has_attr = true;
                    if (target_arc.contains(r.location)) attr_in_target = true;
                }
                if (r.kind == FixedPointRecord::Kind::repelling) has_rep = true;
            }
            if (!all_hyp || !has_attr || !has_rep || fps.size() % 2 != 0) continue;
            pool.push_back({wp, h, fps, attr_in_target});
            break;
        }
        // try to certify pairs as the pool grows
        for (std::size_t i = 0; i + 1 <= pool.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                const Candidate &a = pool[i], &b = pool[j];
                if (a.fps.size() != b.fps.size()) continue;
                if (!(a.in_target || b.in_target)) continue;
                auto cones = cones_from_fixed_points(a.fps, b.fps);
                if (!cones) continue;
                auto res = certify_pingpong(a.map, b.map, *cones, 4096);
                if (auto* cert = std::get_if<PingpongCertificate>(&res)) {
                    PingpongSearchResult out{a.w, b.w, a.map, b.map, *cert};
                    return out;
                }
            }
        }
    }
    return std::nullopt;
}

Subsystem extract_subsystem(const words::Alphabet& alpha, int N, double lambda_target, double eps,
                            const std::vector<Arc>& arcs, long long cap, bool separating) {
    if (arcs.empty()) throw ValidationError("extract_subsystem: arcs required");
    Subsystem sub;
    sub.N = N;
    sub.arcs = arcs;
    sub.log2_window = {N * (lambda_target - eps), N * (lambda_target + eps)};
    sub.separating = separating;

    struct ArcState {
        Arc arc;
        double lo = 0.0, hi = 0.0;
    };
    std::vector<std::vector<ArcState>> stack;
    std::vector<ArcState> root;
    for (const Arc& a : arcs) root.push_back({a, 0.0, 0.0});
    stack.push_back(root);
    std::vector<int> letters;

    std::vector<std::pair<words::Word, Arc>> kept; // word + image of arcs[0]

    words::walk_reduced_tree(
        alpha, N, cap,
        [&]() {
            if (static_cast<int>(letters.size()) != N) return;
            const auto& st = stack.back();
            for (const auto& s : st) {
                if (!(sub.log2_window.lo <= s.lo && s.hi <= sub.log2_window.hi)) return;
            }
            for (std::size_t i = 0; i < arcs.size(); ++i)
                if (arc_containment_margin(arcs[i], stack.back()[i].arc) <= 0.0) return;
            kept.emplace_back(words::Word{letters}, stack.back()[0].arc);
        },
        [&](int letter, int) {
            const auto& m = alpha.letter_map(letter);
            std::vector<ArcState> next(arcs.size());
            const auto& cur = stack.back();
            for (std::size_t i = 0; i < arcs.size(); ++i) {
                Interval r = m.log2_deriv_range(cur[i].arc, 96);
                next[i] = {m.image(cur[i].arc), cur[i].lo + r.lo, cur[i].hi + r.hi};
            }
            stack.push_back(std::move(next));
            letters.push_back(letter);
            return true;
        },
        [&]() {
            stack.pop_back();
            letters.pop_back();
        });

    if (kept.empty()) throw EmptySelection("extract_subsystem: no word satisfies the window");

    if (separating) {
        // sweep over image intervals inside arcs[0], keeping non-overlapping ones
        std::sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
            return wrap_unit(a.second.start - arcs[0].start) < wrap_unit(b.second.start - arcs[0].start);
        });
        double cursor = -1.0;
        for (auto& [w, img] : kept) {
            double s = wrap_unit(img.start - arcs[0].start);
            if (s > cursor) {
                sub.words.push_back(w);
                cursor = s + img.length;
            }
        }
    } else {
        for (auto& [w, img] : kept) sub.words.push_back(w);
    }
    return sub;
}

AtomicMeasure patterson_sullivan(const words::Alphabet& alpha, double x, double s, int L,
                                 long long cap) {
    if (s <= 0.0) throw ValidationError("patterson_sullivan: s > 0 required");
    AtomicMeasure out;
    out.s = s;
    out.base_point = wrap_unit(x);
    out.truncation = L;

    struct State {
        double y, logd;
    };
    std::vector<State> stack{{out.base_point, 0.0}};
    std::vector<std::pair<double, double>> atoms;

    words::walk_reduced_tree(
        alpha, L, cap,
        [&]() { atoms.emplace_back(stack.back().y, std::exp2(s * stack.back().logd)); },
        [&](int letter, int) {
            const auto& m = alpha.letter_map(letter);
            State st = stack.back();
            st.logd += m.log2_deriv(st.y);
            st.y = m.eval(st.y);
            stack.push_back(st);
            return true;
        },
        [&]() { stack.pop_back(); });

    std::sort(atoms.begin(), atoms.end());
    double total = 0.0;
    for (auto& [p, w] : atoms) total += w;
    // collapse duplicates within 1e-12
    for (auto& [p, w] : atoms) {
        if (!out.atoms.empty() && p - out.atoms.back().first < 1e-12)
            out.atoms.back().second += w / total;
        else
            out.atoms.emplace_back(p, w / total);
    }
    return out;
}

double conformality_residual(const AtomicMeasure& nu, const CircleMap& f, double delta) {
    walk::EmpiricalMeasure pushed, reweighted;
    pushed.points.reserve(nu.atoms.size());
    pushed.weights.reserve(nu.atoms.size());
    reweighted.points.reserve(nu.atoms.size());
    reweighted.weights.reserve(nu.atoms.size());
    for (const auto& [p, w] : nu.atoms) {
        pushed.points.push_back(f.inverse_eval(p));
        pushed.weights.push_back(w);
        reweighted.points.push_back(p);
        reweighted.weights.push_back(w * std::pow(f.deriv(p), delta));
    }
    pushed.normalize_sorted();
    reweighted.normalize_sorted();
    return walk::wasserstein1(pushed, reweighted);
}

} // namespace circledim::hyperbolic
