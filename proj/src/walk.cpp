#include "circledim/walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace circledim::walk {

void WalkMeasure::validate() const {
    if (weights.size() != alphabet.generators.size())
        throw ValidationError("WalkMeasure: one weight per generator required");
    double s = 0.0;
    for (double w : weights) {
        if (w <= 0.0) throw ValidationError("WalkMeasure: weights must be positive");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ValidationError("WalkMeasure: weights must sum to 1");
}

std::vector<double> WalkMeasure::cumulative() const {
    std::vector<double> c(weights.size());
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        s += weights[i];
        c[i] = s;
    }
    c.back() = 1.0;
    return c;
}

double WalkMeasure::shannon_entropy() const {
    double h = 0.0;
    for (double w : weights) h -= w * std::log2(w);
    return h;
}

words::Word sample_word(const WalkMeasure& mu, int n, std::uint64_t seed) {
    mu.validate();
    auto cum = mu.cumulative();
    CounterRng rng(seed);
    words::Word w;
    w.letters.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w.letters.push_back(rng.pick(cum) + 1);
    return w;
}

namespace {

double burned_start(const WalkMeasure& mu, double x0, int burn, CounterRng& rng,
                    const std::vector<double>& cum) {
    double x = wrap_unit(x0);
    for (int i = 0; i < burn; ++i) x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
    return x;
}

} // namespace

LyapunovEstimate lyapunov(const WalkMeasure& mu, double x0, int n, int trials, std::uint64_t seed) {
    mu.validate();
    auto cum = mu.cumulative();
    std::vector<double> vals(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(seed ^ static_cast<std::uint64_t>(t));
        double x = burned_start(mu, x0, n / 2, rng, cum);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& f = mu.alphabet.letter_map(rng.pick(cum) + 1);
            total += f.log2_deriv(x);
            x = f.eval(x);
        }
        vals[static_cast<std::size_t>(t)] = total / n;
    }
    LyapunovEstimate est;
    est.n = n;
    est.trials = trials;
    double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / trials;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = trials > 1 ? var / (trials - 1) : 0.0;
    est.lambda = mean;
    est.stderr_ = std::sqrt(var / std::max(trials, 1));
    return est;
}

double lyapunov_single_run(const WalkMeasure& mu, double x0, long long steps, std::uint64_t seed) {
    mu.validate();
    auto cum = mu.cumulative();
    CounterRng rng(seed);
    double x = burned_start(mu, x0, static_cast<int>(std::min<long long>(steps / 2, 100000)), rng, cum);
    double total = 0.0;
    for (long long i = 0; i < steps; ++i) {
        const auto& f = mu.alphabet.letter_map(rng.pick(cum) + 1);
        total += f.log2_deriv(x);
        x = f.eval(x);
    }
    return total / static_cast<double>(steps);
}

// ---------------------------------------------------------------------------
// Empirical measures

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<double> pts) {
    EmpiricalMeasure m;
    m.points = std::move(pts);
    std::sort(m.points.begin(), m.points.end());
    m.weights.assign(m.points.size(), 1.0 / static_cast<double>(m.points.size()));
    return m;
}

void EmpiricalMeasure::normalize_sorted() {
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    std::vector<double> p(points.size()), w(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        p[i] = points[idx[i]];
        w[i] = weights[idx[i]];
        total += w[i];
    }
    for (auto& wi : w) wi /= total;
    points = std::move(p);
    weights = std::move(w);
}

// Circular W1: min over c of the L1 norm of (F_a - F_b - c); the optimal c
// is the length-weighted median of the CDF difference.
double wasserstein1(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    struct Ev {
        double x;
        double da, db;
    };
    std::vector<Ev> evs;
    evs.reserve(a.points.size() + b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) evs.push_back({a.points[i], a.weights[i], 0.0});
    for (std::size_t i = 0; i < b.points.size(); ++i) evs.push_back({b.points[i], 0.0, b.weights[i]});
    std::sort(evs.begin(), evs.end(), [](const Ev& u, const Ev& v) { return u.x < v.x; });

    // piecewise-constant difference of CDFs on segments between events
    std::vector<std::pair<double, double>> seg; // (value, length)
    double diff = 0.0;
    for (std::size_t i = 0; i < evs.size(); ++i) {
        diff += evs[i].da - evs[i].db;
        double next = (i + 1 < evs.size()) ? evs[i + 1].x : evs[0].x + 1.0;
        double len = next - evs[i].x;
        if (len > 0.0) seg.emplace_back(diff, len);
    }
    std::sort(seg.begin(), seg.end());
    double half = 0.0;
    for (const auto& s : seg) half += s.second;
    half *= 0.5;
    double acc = 0.0, c = seg.empty() ? 0.0 : seg.back().first;
    for (const auto& s : seg) {
        acc += s.second;
        if (acc >= half) {
            c = s.first;
            break;
        }
    }
    double w1 = 0.0;
    for (const auto& s : seg) w1 += std::abs(s.first - c) * s.second;
    return w1;
}

EmpiricalMeasure push_forward(const EmpiricalMeasure& nu, const maps::CircleMap& f) {
    EmpiricalMeasure out;
    out.points.reserve(nu.points.size());
    for (double x : nu.points) out.points.push_back(f.eval(x));
    out.weights = nu.weights;
    out.normalize_sorted();
    return out;
}

EmpiricalMeasure convolve_step(const WalkMeasure& mu, const EmpiricalMeasure& nu) {
    EmpiricalMeasure out;
    out.points.reserve(nu.points.size() * mu.weights.size());
    out.weights.reserve(nu.points.size() * mu.weights.size());
    for (std::size_t g = 0; g < mu.weights.size(); ++g) {
        const auto& f = mu.alphabet.letter_map(static_cast<int>(g) + 1);
        for (std::size_t i = 0; i < nu.points.size(); ++i) {
            out.points.push_back(f.eval(nu.points[i]));
            out.weights.push_back(mu.weights[g] * nu.weights[i]);
        }
    }
    out.normalize_sorted();
    return out;
}

StationarySample stationary_sample(const WalkMeasure& mu, int burn, int count, int chains,
                                   std::uint64_t seed) {
    mu.validate();
    if (burn < 1) throw ValidationError("stationary_sample: burn >= 1 required");
    chains = std::max(chains, 2);
    auto cum = mu.cumulative();
    const int per_chain = std::max(1, count / chains);

    std::vector<double> pool_a, pool_b;
    for (int c = 0; c < chains; ++c) {
        CounterRng rng = CounterRng::split(seed, static_cast<std::uint64_t>(c));
        double x = (c + 0.5) / chains;
        for (int i = 0; i < burn; ++i) x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
        auto& pool = (c % 2 == 0) ? pool_a : pool_b;
        for (int i = 0; i < per_chain; ++i) {
            x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
            pool.push_back(x);
        }
    }
    EmpiricalMeasure half_a = EmpiricalMeasure::from_points(pool_a);
    EmpiricalMeasure half_b = EmpiricalMeasure::from_points(pool_b);
    std::vector<double> all = pool_a;
    all.insert(all.end(), pool_b.begin(), pool_b.end());

    StationarySample out;
    out.nu = EmpiricalMeasure::from_points(std::move(all));
    out.replica_distance = wasserstein1(half_a, half_b);
    out.invariance_residual = wasserstein1(out.nu, convolve_step(mu, out.nu));
    out.nonconvergence = out.invariance_residual > 2.0 * out.replica_distance + 1e-6;
    return out;
}

// ---------------------------------------------------------------------------
// Clustering and structure detection

Clusters cluster_circle_points(std::vector<double> pts, double eps) {
    Clusters cl;
    if (pts.empty()) return cl;
    std::sort(pts.begin(), pts.end());
    const std::size_t n = pts.size();
    // find the largest circular gap to start the sweep
    std::size_t start = 0;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double next = pts[(i + 1) % n] + (i + 1 == n ? 1.0 : 0.0);
        double gap = next - pts[i];
        if (gap > best_gap) {
            best_gap = gap;
            start = (i + 1) % n;
        }
    }
    std::vector<std::vector<double>> groups;
    groups.emplace_back();
    for (std::size_t j = 0; j < n; ++j) {
        double x = pts[(start + j) % n];
        if (!groups.back().empty()) {
            double prev = groups.back().back();
            double gap = wrap_unit(x - prev);
            if (gap > eps) groups.emplace_back();
        }
        groups.back().push_back(x);
    }
    if (groups.size() > 1) {
        // the sweep began after the largest gap, so no wrap merge is needed
    }
    for (const auto& g : groups) {
        double lo = g.front(), hi = g.back();
        double diam = wrap_unit(hi - lo);
        cl.centers.push_back(wrap_unit(lo + 0.5 * diam));
        cl.diameters.push_back(diam);
        cl.counts.push_back(static_cast<int>(g.size()));
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double hi = groups[i].back();
        double next_lo = groups[(i + 1) % groups.size()].front();
        cl.gaps.push_back(i + 1 == groups.size() && groups.size() == 1 ? 1.0 : wrap_unit(next_lo - hi));
    }
    return cl;
}

Clusters cluster_filtered(std::vector<double> pts, double eps, int min_count) {
    Clusters raw = cluster_circle_points(std::move(pts), eps);
    std::vector<std::size_t> kept;
    Clusters out;
    for (std::size_t i = 0; i < raw.centers.size(); ++i) {
        if (raw.counts[i] < min_count)
            out.stragglers += raw.counts[i];
        else
            kept.push_back(i);
    }
    for (std::size_t a = 0; a < kept.size(); ++a) {
        std::size_t i = kept[a];
        out.centers.push_back(raw.centers[i]);
        out.diameters.push_back(raw.diameters[i]);
        out.counts.push_back(raw.counts[i]);
        // gap to the next kept cluster: everything dropped in between widens it
        double gap = raw.gaps[i];
        std::size_t j = (i + 1) % raw.centers.size();
        while (!kept.empty() && j != kept[(a + 1) % kept.size()]) {
            gap += raw.diameters[j] + raw.gaps[j];
            j = (j + 1) % raw.centers.size();
            if (j == i) break;
        }
        out.gaps.push_back(kept.size() == 1 ? 1.0 - raw.diameters[i] : gap);
    }
    return out;
}

namespace {

std::vector<double> forward_support_sample(const WalkMeasure& mu, double start, int burn, int count,
                                           CounterRng rng) {
    auto cum = mu.cumulative();
    double x = start;
    for (int i = 0; i < burn; ++i) x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
        pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

double min_circular_distance(const std::vector<double>& a, const std::vector<double>& b) {
    // both sorted; merge walk
    double best = 1.0;
    std::size_t j = 0;
    for (double x : a) {
        while (j + 1 < b.size() && b[j + 1] < x) ++j;
        for (std::size_t k = (j > 0 ? j - 1 : 0); k < std::min(b.size(), j + 2); ++k)
            best = std::min(best, circ_dist(x, b[k]));
    }
    // also compare wrap ends
    if (!a.empty() && !b.empty()) {
        best = std::min(best, circ_dist(a.front(), b.back()));
        best = std::min(best, circ_dist(a.back(), b.front()));
    }
    return best;
}

} // namespace

StructureReport detect_structure(const WalkMeasure& mu, int n, int grid_size, double cluster_eps,
                                 int seeds, std::uint64_t seed) {
    mu.validate();
    StructureReport rep;
    rep.seeds_total = seeds;

    std::vector<int> counts;
    std::vector<Clusters> all;
    int ok = 0;
    for (int s = 0; s < seeds; ++s) {
        CounterRng rng = CounterRng::split(seed, static_cast<std::uint64_t>(s));
        auto cum = mu.cumulative();
        std::vector<double> pts(static_cast<std::size_t>(grid_size));
        for (int i = 0; i < grid_size; ++i) pts[static_cast<std::size_t>(i)] = (i + 0.5) / grid_size;
        // iterate until the clusters stabilize at sub-resolution diameters;
        // past that point further steps only accumulate rounding drift
        int stable = 0;
        int last_count = -1;
        for (int step = 0; step < n && stable < 5; ++step) {
            const auto& f = mu.alphabet.letter_map(rng.pick(cum) + 1);
            for (auto& x : pts) x = f.eval(x);
            if (step >= 4) {
                Clusters probe = cluster_filtered(pts, cluster_eps, std::max(2, grid_size / 50));
                if (probe.centers.empty()) {
                    stable = 0;
                    last_count = 0;
                    continue;
                }
                double md = *std::max_element(probe.diameters.begin(), probe.diameters.end());
                if (static_cast<int>(probe.centers.size()) == last_count && md <= 1e-9)
                    ++stable;
                else
                    stable = 0;
                last_count = static_cast<int>(probe.centers.size());
            }
        }
        Clusters cl = cluster_filtered(pts, cluster_eps, std::max(2, grid_size / 50));
        bool good = false;
        if (!cl.centers.empty()) {
            double max_diam = *std::max_element(cl.diameters.begin(), cl.diameters.end());
            double min_gap = cl.centers.size() > 1 ? *std::min_element(cl.gaps.begin(), cl.gaps.end()) : 1.0;
            good = min_gap >= 10.0 * std::max(max_diam, 1e-300) || max_diam == 0.0;
        }
        if (good) ++ok;
        counts.push_back(static_cast<int>(cl.centers.size()));
        all.push_back(std::move(cl));
    }
    rep.seeds_ok = ok;
    if (ok < seeds - seeds / 5)
        throw UnreliableDiagnostics("detect_structure: cluster diagnostics failed for more than 20% of seeds");

    // majority vote on dr
    std::map<int, int> votes;
    for (int c : counts) ++votes[c];
    int dr = 0, best = -1;
    for (auto [c, v] : votes)
        if (v > best) {
            best = v;
            dr = c;
        }
    rep.dr = dr;
    rep.seeds_modal = best;
    rep.reliable = true;

    // representative seed with the modal count
    std::size_t repidx = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (static_cast<int>(all[i].centers.size()) == dr) {
            repidx = i;
            break;
        }
    const Clusters& cl = all[repidx];
    rep.cluster_centers = cl.centers;
    rep.max_cluster_diameter = *std::max_element(cl.diameters.begin(), cl.diameters.end());
    rep.min_cluster_gap = cl.centers.size() > 1 ? *std::min_element(cl.gaps.begin(), cl.gaps.end()) : 1.0;

    // merge clusters whose forward-orbit supports come within cluster_eps
    const int m = static_cast<int>(cl.centers.size());
    std::vector<std::vector<double>> supports;
    for (int i = 0; i < m; ++i)
        supports.push_back(forward_support_sample(mu, cl.centers[static_cast<std::size_t>(i)], n, 4 * n,
                                                  CounterRng::split(seed, 1000 + static_cast<std::uint64_t>(i))));
    std::vector<int> comp(static_cast<std::size_t>(m));
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int i) { return comp[static_cast<std::size_t>(i)] == i ? i : comp[static_cast<std::size_t>(i)] = find(comp[static_cast<std::size_t>(i)]); };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (min_circular_distance(supports[static_cast<std::size_t>(i)], supports[static_cast<std::size_t>(j)]) <= cluster_eps)
                comp[static_cast<std::size_t>(find(i))] = find(j);
    std::map<int, int> roots;
    for (int i = 0; i < m; ++i) {
        int r0 = find(i);
        if (!roots.count(r0)) {
            int id = static_cast<int>(roots.size());
            roots[r0] = id;
        }
    }
    rep.component_of.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) rep.component_of[static_cast<std::size_t>(i)] = roots[find(i)];
    rep.d = static_cast<int>(roots.size());
    rep.r = rep.d > 0 ? rep.dr / rep.d : 0;

    // per-component Lyapunov exponents from a chain started inside each
    rep.lyapunov_per_component.assign(static_cast<std::size_t>(rep.d), 0.0);
    std::vector<int> first_cluster(static_cast<std::size_t>(rep.d), -1);
    for (int i = 0; i < m; ++i) {
        int c = rep.component_of[static_cast<std::size_t>(i)];
        if (first_cluster[static_cast<std::size_t>(c)] < 0) first_cluster[static_cast<std::size_t>(c)] = i;
    }
    auto cum = mu.cumulative();
    for (int c = 0; c < rep.d; ++c) {
        CounterRng rng = CounterRng::split(seed, 2000 + static_cast<std::uint64_t>(c));
        double x = cl.centers[static_cast<std::size_t>(first_cluster[static_cast<std::size_t>(c)])];
        for (int i = 0; i < n; ++i) x = mu.alphabet.letter_map(rng.pick(cum) + 1).eval(x);
        double total = 0.0;
        const int steps = 4 * n;
        for (int i = 0; i < steps; ++i) {
            const auto& f = mu.alphabet.letter_map(rng.pick(cum) + 1);
            total += f.log2_deriv(x);
            x = f.eval(x);
        }
        rep.lyapunov_per_component[static_cast<std::size_t>(c)] = total / steps;
    }
    return rep;
}

BoundaryEstimate boundary_map(const WalkMeasure& mu, std::uint64_t seed, int n, int grid_size,
                              double cluster_eps) {
    mu.validate();
    CounterRng rng(seed);
    auto cum = mu.cumulative();
    std::vector<double> pts(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) pts[static_cast<std::size_t>(i)] = (i + 0.5) / grid_size;

    std::vector<double> all_steps, all_logdiams;
    Clusters cl;
    for (int step = 1; step <= n; ++step) {
        const auto& f = mu.alphabet.letter_map(rng.pick(cum) + 1);
        for (auto& x : pts) x = f.eval(x);
        cl = cluster_filtered(pts, cluster_eps, std::max(2, grid_size / 50));
        double md = *std::max_element(cl.diameters.begin(), cl.diameters.end());
        all_steps.push_back(static_cast<double>(step));
        all_logdiams.push_back(std::log2(std::max(md, 1e-300)));
    }
    BoundaryEstimate out;
    out.pi = cl.centers;
    double max_diam = *std::max_element(cl.diameters.begin(), cl.diameters.end());
    double min_gap = cl.centers.size() > 1 ? *std::min_element(cl.gaps.begin(), cl.gaps.end()) : 1.0;
    out.reliable = min_gap >= 10.0 * std::max(max_diam, 1e-300) || max_diam == 0.0;

    // fit log-diameter over the second half, skipping both the straggler
    // transient and the floating-point floor near machine epsilon
    const double floor_log2 = std::log2(1e-13);
    std::vector<double> ns, logdiams;
    for (std::size_t i = all_steps.size() / 2; i < all_steps.size(); ++i)
        if (all_logdiams[i] > floor_log2) {
            ns.push_back(all_steps[i]);
            logdiams.push_back(all_logdiams[i]);
        }
    if (ns.size() < 4) {
        ns.clear();
        logdiams.clear();
        for (std::size_t i = 1; i < all_steps.size(); ++i) {
            if (all_logdiams[i] > floor_log2) {
                ns.push_back(all_steps[i]);
                logdiams.push_back(all_logdiams[i]);
            }
        }
        if (ns.size() > 8) {
            ns.erase(ns.begin(), ns.end() - 8);
            logdiams.erase(logdiams.begin(), logdiams.end() - 8);
        }
    }
    SlopeFit fit = fit_slope(ns, logdiams);
    out.decay = fit.slope;
    return out;
}

RwEntropyEstimate rw_entropy(const WalkMeasure& mu, int n, int resolution, long long cap) {
    mu.validate();
    RwEntropyEstimate out;
    if (mu.alphabet.declared_free) {
        out.exact = true;
        out.h = mu.shannon_entropy();
        return out;
    }
    const int k = mu.alphabet.rank();
    double total_words = std::pow(static_cast<double>(k), n);
    if (total_words > static_cast<double>(cap))
        throw BudgetExceeded("rw_entropy: k^n exceeds cap");

    std::map<std::vector<long long>, double> classes;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        // probability and fingerprint of this letter sequence
        double p = 1.0;
        for (int i = 0; i < n; ++i) p *= mu.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        std::vector<long long> fp(static_cast<std::size_t>(resolution));
        for (int g = 0; g < resolution; ++g) {
            double x = (g + 0.5) / resolution;
            for (int i = 0; i < n; ++i)
                x = mu.alphabet.letter_map(idx[static_cast<std::size_t>(i)] + 1).eval(x);
            fp[static_cast<std::size_t>(g)] = static_cast<long long>(std::llround(x * 1e9));
        }
        classes[fp] += p;
        // odometer
        int pos = n - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == k - 1) {
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
    }
    double H = 0.0;
    for (const auto& [fp, p] : classes)
        if (p > 0.0) H -= p * std::log2(p);
    out.h = H / n;
    out.exact = false;
    return out;
}

} // namespace circledim::walk
