#include "circledim/critexp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace circledim::critexp {

CountTable count_by_conorm(const words::Alphabet& alpha, std::span<const double> base_points,
                           double eps, int L, const CountOptions& opt,
                           std::optional<double> distortion_cap) {
    if (eps <= 0.0) throw ValidationError("count_by_conorm: eps > 0 required");
    if (L < 1) throw ValidationError("count_by_conorm: L >= 1 required");
    if (base_points.empty()) throw ValidationError("count_by_conorm: base points required");

    CountTable table;
    table.base_points.assign(base_points.begin(), base_points.end());
    table.eps = eps;
    table.max_len = L;
    table.distortion_cap = distortion_cap;
    table.counts.assign(static_cast<std::size_t>(opt.n_max) + 1, 0);

    // Per base-point chain state along the DFS word tree. The word grows by
    // outer letters, so arcs are pushed through each new letter and the
    // certified per-letter ranges accumulate additively.
    struct ArcState {
        Arc arc;
        double lo = 0.0, hi = 0.0;
        double ktilde = 0.0; // certified upper bound for the distortion norm
    };
    const std::size_t nb = base_points.size();
    std::vector<std::vector<ArcState>> stack;
    std::vector<ArcState> root(nb);
    for (std::size_t i = 0; i < nb; ++i) root[i].arc = Arc::ball(base_points[i], eps);
    stack.push_back(root);

    // counts are over group elements; words of non-free alphabets may
    // repeat elements, so collapse by an evaluation fingerprint there
    const bool dedupe = !alpha.declared_free;
    struct EvalState {
        std::array<double, 8> pts;
        std::array<double, 8> logd;
    };
    std::vector<EvalState> eval_stack;
    std::set<std::array<long long, 16>> seen;
    if (dedupe) {
        EvalState e{};
        for (int i = 0; i < 8; ++i) e.pts[static_cast<std::size_t>(i)] = (i + 0.5) / 8.0;
        eval_stack.push_back(e);
    }

    auto record = [&](const std::vector<ArcState>& st) {
        ++table.total_words;
        if (dedupe) {
            // identify group elements by image points and log-derivatives
            std::array<long long, 16> fp{};
            for (int i = 0; i < 8; ++i) {
                fp[static_cast<std::size_t>(i)] =
                    std::llround(eval_stack.back().pts[static_cast<std::size_t>(i)] * 1e9);
                fp[static_cast<std::size_t>(8 + i)] = std::llround(
                    std::clamp(eval_stack.back().logd[static_cast<std::size_t>(i)], -1e8, 1e8) * 1e6);
            }
            if (!seen.insert(fp).second) return;
        }
        double best_lo = -1e300;
        for (const auto& s : st) {
            if (distortion_cap && s.ktilde > *distortion_cap) continue;
            best_lo = std::max(best_lo, s.lo);
        }
        if (best_lo == -1e300) return; // capped out at every base point
        int n0 = best_lo >= 0.0 ? 0 : static_cast<int>(std::ceil(-best_lo));
        if (n0 > opt.n_max) return;
        for (std::size_t n = static_cast<std::size_t>(n0); n < table.counts.size(); ++n)
            ++table.counts[n];
    };

    words::walk_reduced_tree(
        alpha, L, opt.cap,
        [&]() { record(stack.back()); },
        [&](int letter, int) {
            const auto& m = alpha.letter_map(letter);
            std::vector<ArcState> next(nb);
            const auto& cur = stack.back();
            for (std::size_t i = 0; i < nb; ++i) {
                Interval r = m.log2_deriv_range(cur[i].arc, opt.letter_grid);
                next[i].lo = cur[i].lo + r.lo;
                next[i].hi = cur[i].hi + r.hi;
                if (distortion_cap) {
                    double lip = m.log2_deriv_lipschitz(cur[i].arc, opt.letter_grid);
                    next[i].ktilde = cur[i].ktilde + std::pow(2.0, cur[i].hi) * lip;
                }
                next[i].arc = m.image(cur[i].arc);
            }
            stack.push_back(std::move(next));
            if (dedupe) {
                EvalState e = eval_stack.back();
                for (int i = 0; i < 8; ++i) {
                    e.logd[static_cast<std::size_t>(i)] += m.log2_deriv(e.pts[static_cast<std::size_t>(i)]);
                    e.pts[static_cast<std::size_t>(i)] = m.eval(e.pts[static_cast<std::size_t>(i)]);
                }
                eval_stack.push_back(e);
            }
            return true;
        },
        [&]() {
            stack.pop_back();
            if (dedupe) eval_stack.pop_back();
        });

    return table;
}

DeltaFit delta_fit_counts(const std::vector<long long>& counts, int n_lo, int n_hi) {
    n_lo = std::max(n_lo, 0);
    n_hi = std::min<int>(n_hi, static_cast<int>(counts.size()) - 1);
    std::vector<double> xs, ys;
    for (int n = n_lo; n <= n_hi; ++n) {
        long long c = counts[static_cast<std::size_t>(n)];
        if (c < 1) continue;
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log2(static_cast<double>(c)));
    }
    if (xs.size() < 3) throw DegenerateFit("delta_fit: too few populated count levels in the window");
    bool constant = true;
    for (double y : ys)
        if (std::abs(y - ys.front()) > 1e-12) constant = false;
    if (constant) throw DegenerateFit("delta_fit: counts constant on the window");

    DeltaFit out;
    SlopeFit f = fit_slope(xs, ys);
    out.delta = f.slope;
    out.fit_residual = f.max_residual;
    out.n_lo = n_lo;
    out.n_hi = n_hi;
    auto half = static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::vector<double> x1(xs.begin(), xs.begin() + half), y1(ys.begin(), ys.begin() + half);
    std::vector<double> x2(xs.begin() + half, xs.end()), y2(ys.begin() + half, ys.end());
    if (x1.size() >= 2) out.slope_first_half = fit_slope(x1, y1).slope;
    if (x2.size() >= 2) out.slope_second_half = fit_slope(x2, y2).slope;
    out.subexponential = out.delta <= 0.05;
    return out;
}

DeltaFit delta_fit(const CountTable& table, int n_lo, int n_hi) {
    return delta_fit_counts(table.counts, n_lo, n_hi);
}

SeriesTable poincare_partial(const words::Alphabet& alpha, double x, std::span<const double> s_values,
                             int L, long long cap) {
    for (double s : s_values)
        if (s < 0.0 || s > 1.2) throw ValidationError("poincare_partial: s values must lie in [0, 1.2]");
    SeriesTable table;
    table.x = x;
    table.s_values.assign(s_values.begin(), s_values.end());
    table.max_len = L;
    const std::size_t ns = s_values.size();
    // sphere_sums[s][l]: sum over |g| = l of g'(x)^s
    std::vector<std::vector<double>> sphere(ns, std::vector<double>(static_cast<std::size_t>(L) + 1, 0.0));

    struct State {
        double y;
        double logd; // log2 of the word derivative at x
    };
    std::vector<State> stack{{wrap_unit(x), 0.0}};

    words::walk_reduced_tree(
        alpha, L, cap,
        [&]() {
            const State& st = stack.back();
            std::size_t l = stack.size() - 1;
            for (std::size_t i = 0; i < ns; ++i)
                sphere[i][l] += std::exp2(table.s_values[i] * st.logd);
        },
        [&](int letter, int) {
            const auto& m = alpha.letter_map(letter);
            State st = stack.back();
            st.logd += m.log2_deriv(st.y);
            st.y = m.eval(st.y);
            stack.push_back(st);
            return true;
        },
        [&]() { stack.pop_back(); });

    table.partial_sums.assign(ns, std::vector<double>(static_cast<std::size_t>(L) + 1, 0.0));
    for (std::size_t i = 0; i < ns; ++i) {
        double acc = 0.0;
        for (int l = 0; l <= L; ++l) {
            acc += sphere[i][static_cast<std::size_t>(l)];
            table.partial_sums[i][static_cast<std::size_t>(l)] = acc;
        }
    }
    table.sphere_sums = std::move(sphere);
    return table;
}

double tail_decay_exponent(const SeriesTable& series, std::size_t s_index) {
    const auto& A = series.sphere_sums[s_index];
    const int L = series.max_len;
    const int l0 = std::max(2, (3 * L) / 4);
    std::vector<double> xs, ys;
    for (int l = l0; l <= L; ++l) {
        double a = A[static_cast<std::size_t>(l)];
        if (a <= 1e-250) continue; // underflowed: the series converged long ago
        xs.push_back(std::log2(static_cast<double>(l)));
        ys.push_back(std::log2(a));
    }
    if (xs.size() < 2) return 1e6; // every tail term vanished
    return -fit_slope(xs, ys).slope;
}

ExponentBracket convergence_exponent(const SeriesTable& series) {
    const std::size_t ns = series.s_values.size();
    if (ns < 4) throw ValidationError("convergence_exponent: at least 4 s values required");
    std::vector<std::pair<double, bool>> cls; // (s, diverging)
    for (std::size_t i = 0; i < ns; ++i)
        cls.emplace_back(series.s_values[i], tail_decay_exponent(series, i) <= 1.0);
    std::sort(cls.begin(), cls.end());
    // expect D...DC...C
    int last_div = -1, first_con = -1;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i].second) last_div = static_cast<int>(i);
        if (!cls[i].second && first_con < 0) first_con = static_cast<int>(i);
    }
    if (last_div < 0 || first_con < 0)
        throw NoBracket("convergence_exponent: all s values behave alike");
    if (first_con < last_div)
        throw NoBracket("convergence_exponent: inconsistent divergence pattern");
    ExponentBracket out;
    out.lo = cls[static_cast<std::size_t>(last_div)].first;
    out.hi = cls[static_cast<std::size_t>(first_con)].first;
    out.estimate = 0.5 * (out.lo + out.hi);
    out.width = out.hi - out.lo;
    return out;
}

} // namespace circledim::critexp
