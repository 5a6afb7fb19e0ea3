#include "circledim/runner.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "circledim/dim.hpp"

namespace circledim::runner {

using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {"lyapunov",  "stationary", "structure", "dim",
                                            "critexp",   "poincare",   "pingpong",  "subsystem",
                                            "conformal", "fuchsian-calibrate"};

json parameter_schema(const std::string& exp) {
    // key -> default (null means required / context dependent)
    if (exp == "lyapunov")
        return {{"x0", 0.1}, {"n", 400}, {"trials", 64}};
    if (exp == "stationary")
        return {{"burn", 600}, {"count", 20000}, {"chains", 16}, {"orbit_n", 0}, {"emit_json", false}};
    if (exp == "structure")
        return {{"n", 60}, {"grid_size", 256}, {"cluster_eps", 1e-3}, {"seeds", 20},
                {"conjugate_by", nullptr}};
    if (exp == "dim")
        return {{"method", "formula"}, {"ratios", json::array()}, {"level_lo", 5}, {"level_hi", 13},
                {"burn", 600}, {"count", 60000}, {"chains", 16}, {"entropy_n", 6},
                {"entropy_resolution", 16}, {"cap", 4194304}, {"pressure_grid", 64},
                {"lyap_n", 400}, {"lyap_trials", 64}, {"x0", 0.5}};
    if (exp == "critexp")
        return {{"mode", "local"}, {"eps_ladder", json::array({0.05, 0.02, 0.01})}, {"L", 10},
                {"cap", 8000000}, {"n_max", 512}, {"window", nullptr}, {"distortion_cap", nullptr},
                {"base_points", nullptr}};
    if (exp == "poincare")
        return {{"x", nullptr}, {"s_values", json::array({0.0, 0.25, 0.5, 0.75, 1.0})}, {"L", 3000},
                {"cap", 8000000}, {"refine", true}, {"target_width", 0.08}};
    if (exp == "pingpong")
        return {{"mode", "certify"}, {"grid", 4096}, {"max_power", 6}, {"seeds", 40},
                {"target_lo", 0.0}, {"target_len", 1.0}};
    if (exp == "subsystem")
        return {{"N", 6}, {"lambda_target", nullptr}, {"eps", 0.2}, {"cap", 8000000},
                {"separating", true}, {"cantor_levels", json::array({5, 17})}};
    if (exp == "conformal")
        return {{"s", nullptr}, {"s_offset", 0.05}, {"delta_L", 9}, {"delta_eps", 0.02},
                {"delta_window", json::array({22, 90})}, {"L_ladder", json::array({8, 10, 12, 14})},
                {"generator", "a"}, {"mismatch_offsets", json::array({-0.3, 0.3})}, {"cap", 12000000}};
    if (exp == "fuchsian-calibrate")
        return {{"L", 12}, {"depth", 12}, {"eps", 0.01}, {"cap", 16000000}, {"n_max", 200},
                {"window_matrix", json::array({24, 130})}, {"window_counting", json::array({24, 130})},
                {"window_box", json::array({6, 40})}, {"pressure_grid", 64}};
    throw ValidationError("unknown experiment: " + exp);
}

json resolve_parameters(const std::string& exp, const json& given) {
    json schema = parameter_schema(exp);
    json out = schema;
    for (auto it = given.begin(); it != given.end(); ++it) {
        if (!schema.contains(it.key()))
            throw ValidationError("unknown parameter '" + it.key() + "' for experiment " + exp);
        out[it.key()] = it.value();
    }
    return out;
}

std::string csv_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json interval_json(const Interval& iv) { return {{"lo", iv.lo}, {"hi", iv.hi}}; }
json arc_json(const Arc& a) { return {{"start", a.start}, {"length", a.length}}; }

json fit_json(const critexp::DeltaFit& f) {
    return {{"delta", f.delta},         {"n_lo", f.n_lo},
            {"n_hi", f.n_hi},           {"slope_first_half", f.slope_first_half},
            {"slope_second_half", f.slope_second_half}, {"fit_residual", f.fit_residual},
            {"subexponential", f.subexponential}};
}

std::string counts_csv(const critexp::CountTable& t) {
    std::ostringstream os;
    os << "n,count\n";
    for (std::size_t n = 0; n < t.counts.size(); ++n) os << n << "," << t.counts[n] << "\n";
    return os.str();
}

json dim_json(const dim::DimEstimate& e) {
    return {{"value", e.value}, {"level_lo", e.level_lo}, {"level_hi", e.level_hi},
            {"fit_residual", e.fit_residual}, {"method", e.method}};
}

// --------------------------------------------------------------------------
// experiments

json do_lyapunov(const fixtures::Fixture& fx, const json& P, std::uint64_t seed) {
    auto est = walk::lyapunov(fx.walk, P.at("x0").get<double>(), P.at("n").get<int>(),
                              P.at("trials").get<int>(), seed);
    return {{"lambda", est.lambda}, {"stderr", est.stderr_}, {"n", est.n}, {"trials", est.trials}};
}

json do_stationary(const fixtures::Fixture& fx, const json& P, std::uint64_t seed,
                   std::map<std::string, std::string>& csv, int& exit_code) {
    auto s = walk::stationary_sample(fx.walk, P.at("burn").get<int>(), P.at("count").get<int>(),
                                     P.at("chains").get<int>(), seed);
    std::ostringstream os;
    os << "point,weight\n";
    for (std::size_t i = 0; i < s.nu.points.size(); ++i)
        os << csv_double(s.nu.points[i]) << "," << csv_double(s.nu.weights[i]) << "\n";
    csv["points.csv"] = os.str();
    int orbit_n = P.at("orbit_n").get<int>();
    if (orbit_n > 0) {
        // single-chain orbit stream: (n, point, logderiv)
        CounterRng rng(seed ^ 0xd15c0ULL);
        auto cum = fx.walk.cumulative();
        double x = 0.5;
        std::ostringstream oo;
        oo << "n,point,logderiv\n";
        for (int n = 1; n <= orbit_n; ++n) {
            const auto& f = fx.walk.alphabet.letter_map(rng.pick(cum) + 1);
            double ld = f.log2_deriv(x);
            x = f.eval(x);
            oo << n << "," << csv_double(x) << "," << csv_double(ld) << "\n";
        }
        csv["orbit.csv"] = oo.str();
    }
    if (s.nonconvergence) exit_code = 4;
    json out = {{"size", s.nu.points.size()},
                {"invariance_residual", s.invariance_residual},
                {"replica_distance", s.replica_distance},
                {"nonconvergence", s.nonconvergence}};
    if (P.at("emit_json").get<bool>()) {
        out["measure"] = {{"points", s.nu.points}, {"weights", s.nu.weights}};
    }
    return out;
}

json structure_json(const walk::StructureReport& rep) {
    return {{"d", rep.d},
            {"r", rep.r},
            {"dr", rep.dr},
            {"cluster_centers", rep.cluster_centers},
            {"component_of", rep.component_of},
            {"lyapunov_per_component", rep.lyapunov_per_component},
            {"max_cluster_diameter", rep.max_cluster_diameter},
            {"min_cluster_gap", rep.min_cluster_gap},
            {"reliable", rep.reliable},
            {"seeds_total", rep.seeds_total},
            {"seeds_ok", rep.seeds_ok},
            {"seeds_modal", rep.seeds_modal}};
}

json do_structure(fixtures::Fixture fx, const json& P, std::uint64_t seed) {
    if (!P.at("conjugate_by").is_null())
        fx = fixtures::conjugate_fixture(fx, maps::CircleMap::from_json(P.at("conjugate_by")));
    auto rep = walk::detect_structure(fx.walk, P.at("n").get<int>(), P.at("grid_size").get<int>(),
                                      P.at("cluster_eps").get<double>(), P.at("seeds").get<int>(), seed);
    return structure_json(rep);
}

json do_dim(const fixtures::Fixture& fx, const json& P, std::uint64_t seed,
            std::map<std::string, std::string>& csv) {
    const std::string method = P.at("method").get<std::string>();
    if (method == "moran") {
        std::vector<double> ratios = P.at("ratios").get<std::vector<double>>();
        return {{"method", "moran"}, {"value", dim::moran_dim(ratios)}};
    }
    if (method == "pressure") {
        if (fx.pressure_maps.empty()) throw ValidationError("dim/pressure: fixture provides no IFS data");
        auto est = dim::pressure_dim(fx.pressure_maps, fx.pressure_arcs, fx.pressure_allowed,
                                     P.at("pressure_grid").get<int>());
        return dim_json(est);
    }
    const int lo = P.at("level_lo").get<int>(), hi = P.at("level_hi").get<int>();
    if (method == "box" || method == "entropy") {
        auto s = walk::stationary_sample(fx.walk, P.at("burn").get<int>(), P.at("count").get<int>(),
                                         P.at("chains").get<int>(), seed);
        std::ostringstream os;
        os << "point,weight\n";
        for (std::size_t i = 0; i < s.nu.points.size(); ++i)
            os << csv_double(s.nu.points[i]) << "," << csv_double(s.nu.weights[i]) << "\n";
        csv["points.csv"] = os.str();
        std::ostringstream lv;
        lv << "level,value\n";
        for (auto [n, v] : dim::dyadic_profile(s.nu, lo, hi, method)) lv << n << "," << csv_double(v) << "\n";
        csv["levels.csv"] = lv.str();
        auto est = method == "box" ? dim::box_dim(s.nu.points, lo, hi) : dim::entropy_dim(s.nu, lo, hi);
        return dim_json(est);
    }
    if (method == "formula") {
        dim::DimFormulaParams dp;
        dp.x0 = P.at("x0").get<double>();
        dp.lyap_n = P.at("lyap_n").get<int>();
        dp.lyap_trials = P.at("lyap_trials").get<int>();
        dp.burn = P.at("burn").get<int>();
        dp.sample_count = P.at("count").get<int>();
        dp.chains = P.at("chains").get<int>();
        dp.level_lo = lo;
        dp.level_hi = hi;
        dp.entropy_n = P.at("entropy_n").get<int>();
        dp.entropy_resolution = P.at("entropy_resolution").get<int>();
        dp.entropy_cap = P.at("cap").get<long long>();
        dp.seed = seed;
        auto rec = dim::dim_formula_check(fx.walk, dp);
        return {{"method", "formula"},        {"h_rw", rec.h_rw},
                {"lyap", rec.lyap},           {"predicted_dim", rec.predicted_dim},
                {"measured_dim", rec.measured_dim}, {"gap", rec.gap}};
    }
    throw ValidationError("dim: unknown method " + method);
}

json do_critexp(const fixtures::Fixture& fx, const json& P, std::map<std::string, std::string>& csv) {
    const std::string mode = P.at("mode").get<std::string>();
    std::vector<double> base;
    if (!P.at("base_points").is_null())
        base = P.at("base_points").get<std::vector<double>>();
    else
        base = fx.base_points;
    std::vector<double> ladder;
    if (mode == "global") {
        base = {0.0};
        ladder = {0.5}; // B(x, 1/2) is the whole circle
    } else {
        ladder = P.at("eps_ladder").get<std::vector<double>>();
    }
    if (base.empty()) throw ValidationError("critexp: no base points available");

    critexp::CountOptions opt;
    opt.cap = P.at("cap").get<long long>();
    opt.n_max = P.at("n_max").get<int>();
    std::optional<double> dcap;
    if (!P.at("distortion_cap").is_null()) dcap = P.at("distortion_cap").get<double>();
    const int L = P.at("L").get<int>();

    auto fit_for = [&](const critexp::CountTable& t) {
        int wlo, whi;
        if (!P.at("window").is_null()) {
            wlo = P.at("window")[0].get<int>();
            whi = P.at("window")[1].get<int>();
        } else {
            // auto window: skip the first quarter of populated levels
            int first = 0, last = static_cast<int>(t.counts.size()) - 1;
            while (first < last && t.counts[static_cast<std::size_t>(first)] < 2) ++first;
            while (last > first && t.counts[static_cast<std::size_t>(last)] == t.counts[static_cast<std::size_t>(last - 1)])
                --last;
            wlo = first + (last - first) / 4;
            whi = last;
        }
        return critexp::delta_fit(t, wlo, whi);
    };

    json per_eps = json::array();
    critexp::CountTable finest;
    for (double eps : ladder) {
        auto table = critexp::count_by_conorm(fx.counting_alphabet, base, eps, L, opt, dcap);
        auto fit = fit_for(table);
        per_eps.push_back({{"eps", eps}, {"fit", fit_json(fit)}, {"total_words", table.total_words}});
        csv["counts_eps_" + std::to_string(eps).substr(0, 6) + ".csv"] = counts_csv(table);
        finest = std::move(table);
    }
    // L-sensitivity at the finest eps: delta at L vs L-2
    auto table_m2 = critexp::count_by_conorm(fx.counting_alphabet, base, ladder.back(), L - 2, opt, dcap);
    json sens = {{"delta_at_L", fit_for(finest).delta}};
    try {
        sens["delta_at_L_minus_2"] = fit_for(table_m2).delta;
    } catch (const DegenerateFit&) {
        sens["delta_at_L_minus_2"] = nullptr;
    }
    return {{"mode", mode}, {"per_eps", per_eps}, {"L", L}, {"L_sensitivity", sens},
            {"base_points", base}};
}

json do_poincare(const fixtures::Fixture& fx, const json& P, std::map<std::string, std::string>& csv) {
    double x = P.at("x").is_null() ? fx.wandering_point : P.at("x").get<double>();
    std::vector<double> svals = P.at("s_values").get<std::vector<double>>();
    const int L = P.at("L").get<int>();
    const long long cap = P.at("cap").get<long long>();

    auto table = critexp::poincare_partial(fx.counting_alphabet, x, svals, L, cap);
    std::ostringstream os;
    os << "l,s,partial_sum\n";
    for (std::size_t i = 0; i < table.s_values.size(); ++i)
        for (int l = 0; l <= table.max_len; ++l)
            os << l << "," << csv_double(table.s_values[i]) << ","
               << csv_double(table.partial_sums[i][static_cast<std::size_t>(l)]) << "\n";
    csv["series.csv"] = os.str();

    auto bracket = critexp::convergence_exponent(table);
    if (P.at("refine").get<bool>()) {
        double target = P.at("target_width").get<double>();
        for (int iter = 0; iter < 16 && bracket.width > target; ++iter) {
            double mid = 0.5 * (bracket.lo + bracket.hi);
            std::vector<double> one{mid};
            auto t2 = critexp::poincare_partial(fx.counting_alphabet, x, one, L, cap);
            bool diverging = critexp::tail_decay_exponent(t2, 0) <= 1.0;
            (diverging ? bracket.lo : bracket.hi) = mid;
            bracket.width = bracket.hi - bracket.lo;
            bracket.estimate = 0.5 * (bracket.lo + bracket.hi);
        }
    }
    return {{"x", x},
            {"exponent", bracket.estimate},
            {"bracket_lo", bracket.lo},
            {"bracket_hi", bracket.hi},
            {"width", bracket.width}};
}

json cones_json(const hyperbolic::ConeSet& c) {
    auto arcs = [&](const std::vector<Arc>& v) {
        json a = json::array();
        for (const Arc& x : v) a.push_back(arc_json(x));
        return a;
    };
    return {{"u1_plus", arcs(c.u1_plus)}, {"u2_plus", arcs(c.u2_plus)},
            {"u1_minus", arcs(c.u1_minus)}, {"u2_minus", arcs(c.u2_minus)}};
}

json certificate_json(const hyperbolic::PingpongCertificate& c) {
    json fps1 = json::array(), fps2 = json::array();
    for (const auto& r : c.fixed_points_h1)
        fps1.push_back({{"x", r.location}, {"kind", maps::kind_name(r.kind)}, {"multiplier", r.multiplier}});
    for (const auto& r : c.fixed_points_h2)
        fps2.push_back({{"x", r.location}, {"kind", maps::kind_name(r.kind)}, {"multiplier", r.multiplier}});
    return {{"q", c.q},
            {"margins", c.margins},
            {"cones", cones_json(c.cones)},
            {"fixed_points_h1", fps1},
            {"fixed_points_h2", fps2}};
}

json do_pingpong(const fixtures::Fixture& fx, const json& P, std::uint64_t seed, int& exit_code) {
    const std::string mode = P.at("mode").get<std::string>();
    if (mode == "certify") {
        if (fx.counting_alphabet.generators.size() < 2)
            throw ValidationError("pingpong: two generators required");
        hyperbolic::ConeSet cones;
        if (fx.cones)
            cones = *fx.cones;
        else {
            auto f1 = maps::find_fixed_points(fx.counting_alphabet.generators[0].map, P.at("grid").get<int>());
            auto f2 = maps::find_fixed_points(fx.counting_alphabet.generators[1].map, P.at("grid").get<int>());
            auto c = hyperbolic::cones_from_fixed_points(f1, f2);
            if (!c) throw NotFound("pingpong: could not build cones from fixed points");
            cones = *c;
        }
        auto res = hyperbolic::certify_pingpong(fx.counting_alphabet.generators[0].map,
                                                fx.counting_alphabet.generators[1].map, cones,
                                                P.at("grid").get<int>());
        if (auto* cert = std::get_if<hyperbolic::PingpongCertificate>(&res))
            return {{"certified", true}, {"certificate", certificate_json(*cert)}};
        const auto& ref = std::get<hyperbolic::PingpongRefusal>(res);
        exit_code = 4;
        return {{"certified", false}, {"condition", ref.condition}, {"witness", ref.witness},
                {"detail", ref.detail}};
    }
    if (mode == "search") {
        Arc target{P.at("target_lo").get<double>(), P.at("target_len").get<double>()};
        auto res = hyperbolic::search_pingpong(fx.walk, target, P.at("max_power").get<int>(),
                                               P.at("seeds").get<int>(), seed);
        if (!res) throw NotFound("search_pingpong: no certified pair within budget");
        return {{"found", true},
                {"w1", words::word_to_json(fx.walk.alphabet, res->w1)},
                {"w2", words::word_to_json(fx.walk.alphabet, res->w2)},
                {"certificate", certificate_json(res->certificate)}};
    }
    throw ValidationError("pingpong: unknown mode " + mode);
}

json do_subsystem(const fixtures::Fixture& fx, const json& P, std::map<std::string, std::string>& csv) {
    if (fx.ifs_arcs.empty()) throw ValidationError("subsystem: fixture provides no invariant arcs");
    double lambda = P.at("lambda_target").is_null() ? fx.lambda_hint : P.at("lambda_target").get<double>();
    auto sub = hyperbolic::extract_subsystem(fx.counting_alphabet, P.at("N").get<int>(), lambda,
                                             P.at("eps").get<double>(), fx.ifs_arcs,
                                             P.at("cap").get<long long>(), P.at("separating").get<bool>());
    // depth-2 Cantor sample of the kept subsystem on the first arc
    std::vector<double> pts;
    double base = fx.ifs_arcs[0].midpoint();
    for (const auto& w1 : sub.words)
        for (const auto& w2 : sub.words) {
            auto ev1 = words::evaluate_word(fx.counting_alphabet, w2, base);
            auto ev2 = words::evaluate_word(fx.counting_alphabet, w1, ev1.image);
            pts.push_back(ev2.image);
        }
    auto levels = P.at("cantor_levels").get<std::vector<int>>();
    json cantor = nullptr;
    if (pts.size() >= 4) cantor = dim_json(dim::box_dim(pts, levels[0], levels[1]));
    std::ostringstream os;
    os << "word\n";
    for (const auto& w : sub.words) os << words::word_to_json(fx.counting_alphabet, w).dump() << "\n";
    csv["subsystem_words.csv"] = os.str();
    json words_json = json::array();
    for (std::size_t i = 0; i < sub.words.size() && i < 512; ++i)
        words_json.push_back(words::word_to_json(fx.counting_alphabet, sub.words[i]));
    json arcs_json = json::array();
    for (const Arc& a : sub.arcs) arcs_json.push_back(arc_json(a));
    return {{"N", sub.N},
            {"kept", sub.words.size()},
            {"words", words_json},
            {"arcs", arcs_json},
            {"log2_window", interval_json(sub.log2_window)},
            {"separating", sub.separating},
            {"cantor_box_dim", cantor}};
}

json do_conformal(const fixtures::Fixture& fx, const json& P, std::map<std::string, std::string>& csv) {
    double s;
    if (!P.at("s").is_null()) {
        s = P.at("s").get<double>();
    } else {
        critexp::CountOptions opt;
        opt.cap = P.at("cap").get<long long>();
        opt.n_max = 256;
        auto table = critexp::count_by_conorm(fx.counting_alphabet, fx.base_points,
                                              P.at("delta_eps").get<double>(), P.at("delta_L").get<int>(), opt);
        auto w = P.at("delta_window").get<std::vector<int>>();
        s = critexp::delta_fit(table, w[0], w[1]).delta + P.at("s_offset").get<double>();
    }
    int gen_idx = -1;
    for (int i = 0; i < fx.counting_alphabet.rank(); ++i)
        if (fx.counting_alphabet.generators[static_cast<std::size_t>(i)].name == P.at("generator").get<std::string>())
            gen_idx = i;
    if (gen_idx < 0) throw ValidationError("conformal: unknown generator name");
    const maps::CircleMap& f = fx.counting_alphabet.generators[static_cast<std::size_t>(gen_idx)].map;

    json ladder = json::array();
    hyperbolic::AtomicMeasure biggest;
    for (int L : P.at("L_ladder").get<std::vector<int>>()) {
        auto nu = hyperbolic::patterson_sullivan(fx.counting_alphabet, fx.wandering_point, s, L,
                                                 P.at("cap").get<long long>());
        double res = hyperbolic::conformality_residual(nu, f, s);
        ladder.push_back({{"L", L}, {"residual", res}, {"atoms", nu.atoms.size()}});
        biggest = std::move(nu);
    }
    json mism = json::array();
    for (double off : P.at("mismatch_offsets").get<std::vector<double>>()) {
        double res = hyperbolic::conformality_residual(biggest, f, s + off);
        mism.push_back({{"delta", s + off}, {"residual", res}});
    }
    std::ostringstream os;
    os << "point,weight\n";
    for (const auto& [p, w] : biggest.atoms) os << csv_double(p) << "," << csv_double(w) << "\n";
    csv["atoms.csv"] = os.str();
    return {{"s", s}, {"ladder", ladder}, {"mismatch", mism}};
}

json do_calibrate(const fixtures::Fixture& fx, const json& P, std::map<std::string, std::string>& csv) {
    if (!fx.fuch) throw ValidationError("fuchsian-calibrate: fixture is not a Fuchsian system");
    const long long cap = P.at("cap").get<long long>();
    const int L = P.at("L").get<int>();
    auto wm = P.at("window_matrix").get<std::vector<int>>();
    auto wc = P.at("window_counting").get<std::vector<int>>();
    auto wb = P.at("window_box").get<std::vector<int>>();

    auto mt = fuchsian::classical_count(*fx.fuch, L, cap, P.at("n_max").get<int>());
    auto delta_tilde = critexp::delta_fit(mt, wm[0], wm[1]);
    csv["matrix_counts.csv"] = counts_csv(mt);

    critexp::CountOptions opt;
    opt.cap = cap;
    opt.n_max = P.at("n_max").get<int>();
    auto ct = critexp::count_by_conorm(fx.counting_alphabet, fx.base_points, P.at("eps").get<double>(), L, opt);
    auto delta_hat = critexp::delta_fit(ct, wc[0], wc[1]);
    csv["conorm_counts.csv"] = counts_csv(ct);

    auto sample = fuchsian::limit_set_sample(*fx.fuch, P.at("depth").get<int>(), cap);
    {
        std::ostringstream os;
        os << "point\n";
        for (double x : sample) os << csv_double(x) << "\n";
        csv["limit_set.csv"] = os.str();
    }
    auto box = dim::box_dim(sample, wb[0], wb[1]);

    json pressure = nullptr;
    double max_gap = 0.0;
    std::vector<double> vals = {delta_tilde.delta, delta_hat.delta, box.value};
    if (!fx.pressure_maps.empty()) {
        auto pest = dim::pressure_dim(fx.pressure_maps, fx.pressure_arcs, fx.pressure_allowed,
                                      P.at("pressure_grid").get<int>());
        pressure = dim_json(pest);
        vals.push_back(pest.value);
    }
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            max_gap = std::max(max_gap, std::abs(vals[i] - vals[j]));

    json mats = json::array();
    for (const Mat2& m : fx.fuch->matrices) mats.push_back({{m.a, m.b}, {m.c, m.d}});
    return {{"delta_tilde", fit_json(delta_tilde)},
            {"delta_hat", fit_json(delta_hat)},
            {"box_dim", dim_json(box)},
            {"pressure_dim", pressure},
            {"matrices", mats},
            {"limit_set_points", sample.size()},
            {"max_pairwise_gap", max_gap}};
}

} // namespace

json default_parameters(const std::string& experiment) { return parameter_schema(experiment); }

RunOutcome run_config(const json& config) {
    RunOutcome out;
    json resolved;
    try {
        const std::set<std::string> allowed = {"experiment", "system", "parameters", "seed", "output_dir"};
        for (auto it = config.begin(); it != config.end(); ++it)
            if (!allowed.count(it.key())) throw ValidationError("unknown config field: " + it.key());
        const std::string exp = config.at("experiment").get<std::string>();
        if (!kExperiments.count(exp)) throw ValidationError("unknown experiment: " + exp);
        const std::uint64_t seed = config.value("seed", 1ULL);

        json system = config.value("system", json({{"fixture", "schottky2"}}));
        fixtures::Fixture fx;
        if (system.contains("fixture")) {
            fx = fixtures::make_fixture(system.at("fixture").get<std::string>(),
                                        system.value("params", json::object()));
        } else if (system.contains("alphabet")) {
            fx.name = "inline";
            fx.counting_alphabet = words::alphabet_from_json(system.at("alphabet"));
            walk::WalkMeasure mu;
            mu.alphabet = fx.counting_alphabet;
            mu.weights.assign(fx.counting_alphabet.generators.size(),
                              1.0 / static_cast<double>(fx.counting_alphabet.generators.size()));
            if (system.contains("weights")) mu.weights = system.at("weights").get<std::vector<double>>();
            fx.walk = mu;
            if (system.contains("base_points")) fx.base_points = system.at("base_points").get<std::vector<double>>();
            if (system.contains("wandering_point")) fx.wandering_point = system.at("wandering_point").get<double>();
        } else {
            throw ValidationError("system must name a fixture or provide an alphabet");
        }

        json P = resolve_parameters(exp, config.value("parameters", json::object()));
        resolved = {{"experiment", exp},
                    {"system", system},
                    {"parameters", P},
                    {"seed", seed},
                    {"output_dir", config.value("output_dir", ".")}};
        out.manifest = {{"tool", "circledim"}, {"format_version", 1}, {"config", resolved},
                        {"fixture", fx.name}};

        // validate numeric sanity before running
        if (exp == "critexp") {
            for (double e : P.at("eps_ladder").get<std::vector<double>>())
                if (e <= 0.0) throw ValidationError("critexp: eps must be positive");
        }

        json results;
        int code = 0;
        if (exp == "lyapunov") results = do_lyapunov(fx, P, seed);
        else if (exp == "stationary") results = do_stationary(fx, P, seed, out.csv_files, code);
        else if (exp == "structure") results = do_structure(fx, P, seed);
        else if (exp == "dim") results = do_dim(fx, P, seed, out.csv_files);
        else if (exp == "critexp") results = do_critexp(fx, P, out.csv_files);
        else if (exp == "poincare") results = do_poincare(fx, P, out.csv_files);
        else if (exp == "pingpong") results = do_pingpong(fx, P, seed, code);
        else if (exp == "subsystem") results = do_subsystem(fx, P, out.csv_files);
        else if (exp == "conformal") results = do_conformal(fx, P, out.csv_files);
        else if (exp == "fuchsian-calibrate") results = do_calibrate(fx, P, out.csv_files);

        out.results = {{"experiment", exp}, {"fixture", fx.name}, {"seed", seed},
                       {"status", code == 0 ? "ok" : "flagged"}, {"error", nullptr},
                       {"results", results}};
        out.exit_code = code;
    } catch (const ValidationError& e) {
        out.exit_code = 2;
        out.results = {{"status", "error"}, {"error", {{"type", "validation"}, {"message", e.what()}}}};
    } catch (const UnknownFixture& e) {
        out.exit_code = 2;
        out.results = {{"status", "error"}, {"error", {{"type", "unknown-fixture"}, {"message", e.what()}}}};
    } catch (const BudgetExceeded& e) {
        out.exit_code = 3;
        out.results = {{"status", "error"}, {"error", {{"type", "budget"}, {"message", e.what()}}}};
    } catch (const UnreliableDiagnostics& e) {
        out.exit_code = 4;
        out.results = {{"status", "error"}, {"error", {{"type", "unreliable"}, {"message", e.what()}}}};
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.results = {{"status", "error"}, {"error", {{"type", "internal"}, {"message", e.what()}}}};
    }
    if (out.manifest.is_null())
        out.manifest = {{"tool", "circledim"}, {"format_version", 1}, {"config", config}};
    return out;
}

RunOutcome run_to_dir(const json& config, const std::filesystem::path& outdir) {
    json cfg = config;
    cfg["output_dir"] = outdir.string();
    RunOutcome out = run_config(cfg);
    std::filesystem::create_directories(outdir);
    if (out.exit_code == 2) {
        // validation failures leave no artifacts beyond the manifest; the
        // error is recorded there
        out.manifest["error"] = out.results.value("error", json());
        std::ofstream(outdir / "manifest.json") << out.manifest.dump(2) << "\n";
        return out;
    }
    std::ofstream(outdir / "manifest.json") << out.manifest.dump(2) << "\n";
    std::ofstream(outdir / "results.json") << out.results.dump(2) << "\n";
    for (const auto& [name, content] : out.csv_files) std::ofstream(outdir / name) << content;
    return out;
}

} // namespace circledim::runner
