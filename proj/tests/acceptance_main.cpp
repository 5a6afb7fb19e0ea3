// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are pinned in code; each criterion states what it
// measured.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "circledim/dim.hpp"
#include "circledim/fixtures.hpp"
#include "circledim/runner.hpp"

using namespace circledim;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& title, bool pass, const std::string& detail) {
    std::printf("criterion %2d [%s]: %s (%s)\n", number, title.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

json run_or_throw(const json& cfg) {
    auto out = runner::run_config(cfg);
    if (out.exit_code != 0) throw std::runtime_error("runner exit " + std::to_string(out.exit_code) +
                                                     ": " + out.results.dump());
    return out.results;
}

// --------------------------------------------------------------------------

void criterion_1() {
    auto t0 = Clock::now();
    json cfg = {{"experiment", "fuchsian-calibrate"},
                {"system", {{"fixture", "schottky2"}}},
                {"parameters",
                 {{"L", 12},
                  {"depth", 12},
                  {"eps", 0.01},
                  {"window_matrix", json::array({24, 130})},
                  {"window_counting", json::array({24, 130})},
                  {"window_box", json::array({8, 44})}}},
                {"seed", 1}};
    json r = run_or_throw(cfg)["results"];
    double dt = r["delta_tilde"]["delta"].get<double>();
    double dh = r["delta_hat"]["delta"].get<double>();
    double bx = r["box_dim"]["value"].get<double>();
    double pr = r["pressure_dim"]["value"].get<double>();
    double gap = r["max_pairwise_gap"].get<double>();
    double secs = elapsed(t0);
    bool pass = gap <= 0.05 && secs <= 300.0;
    std::ostringstream d;
    d.precision(4);
    d << "delta_tilde=" << dt << " delta_hat=" << dh << " box=" << bx << " pressure=" << pr
      << " max_gap=" << gap << " time=" << secs << "s";
    report(1, "Fuchsian calibration", pass, d.str());
}

void criterion_2() {
    bool pass = true;
    std::ostringstream d;
    d.precision(4);
    for (const char* name : {"contracting2", "contracting3"}) {
        auto t0 = Clock::now();
        json cfg = {{"experiment", "dim"},
                    {"system", {{"fixture", name}}},
                    {"parameters",
                     {{"method", "formula"}, {"level_lo", 6}, {"level_hi", 13}, {"count", 60000}}},
                    {"seed", 7}};
        json r = run_or_throw(cfg)["results"];
        auto fx = fixtures::make_fixture(name, {});
        double ratio = fx.meta["ratio"].get<double>();
        std::vector<double> ratios(fx.counting_alphabet.generators.size(), ratio);
        double moran = dim::moran_dim(ratios);
        double predicted = r["predicted_dim"].get<double>();
        double measured = r["measured_dim"].get<double>();
        double secs = elapsed(t0);
        bool ok = std::abs(predicted - measured) <= 0.05 && std::abs(predicted - moran) <= 0.05 &&
                  std::abs(measured - moran) <= 0.05 && secs <= 120.0;
        pass = pass && ok;
        d << name << ": predicted=" << predicted << " measured=" << measured << " moran=" << moran
          << " time=" << secs << "s; ";
    }
    report(2, "dimension formula", pass, d.str());
}

void criterion_3() {
    bool pass = true;
    std::ostringstream d;
    d.precision(4);
    for (int k : {1, 2}) {
        auto fx = fixtures::make_fixture(k == 1 ? "parabolic-k1" : "parabolic-k2", {});
        const auto& g = fx.counting_alphabet.generators[0].map;
        double x = fx.wandering_point, logd = 0.0;
        std::vector<double> ln_n, ln_x, ln_d;
        for (long long n = 1; n <= 10000; ++n) {
            logd += g.log2_deriv(x);
            x = g.eval(x);
            if (n >= 100 && n % 25 == 0) {
                ln_n.push_back(std::log2(static_cast<double>(n)));
                ln_x.push_back(std::log2(circ_dist(x, 0.0)));
                ln_d.push_back(logd);
            }
        }
        double orbit_exp = fit_slope(ln_n, ln_x).slope;
        double deriv_exp = fit_slope(ln_n, ln_d).slope;
        bool ok = std::abs(orbit_exp + 1.0 / k) <= 0.05 &&
                  std::abs(deriv_exp + (k + 1.0) / k) <= 0.1;
        pass = pass && ok;
        d << "k=" << k << ": orbit=" << orbit_exp << " (want " << -1.0 / k
          << "), deriv=" << deriv_exp << " (want " << -(k + 1.0) / k << "); ";
    }
    report(3, "parabolic asymptotics", pass, d.str());
}

void criterion_4() {
    std::ostringstream d;
    d.precision(4);
    auto run_poincare = [&](const json& system, int L) {
        json cfg = {{"experiment", "poincare"},
                    {"system", system},
                    {"parameters",
                     {{"L", L},
                      {"s_values", json::array({0.0, 0.25, 0.5, 0.75, 1.0})},
                      {"refine", true},
                      {"target_width", 0.08}}},
                    {"seed", 1}};
        return run_or_throw(cfg)["results"];
    };
    json r1 = run_poincare({{"fixture", "parabolic-k1"}}, 3000);
    bool ok1 = r1["bracket_lo"].get<double>() <= 0.5 && r1["bracket_hi"].get<double>() >= 0.5 &&
               r1["width"].get<double>() <= 0.1;
    d << "k1 bracket [" << r1["bracket_lo"].get<double>() << "," << r1["bracket_hi"].get<double>()
      << "]; ";
    json r2 = run_poincare({{"fixture", "parabolic-k2"}}, 3000);
    bool ok2 = r2["bracket_lo"].get<double>() <= 2.0 / 3.0 &&
               r2["bracket_hi"].get<double>() >= 2.0 / 3.0 && r2["width"].get<double>() <= 0.1;
    d << "k2 bracket [" << r2["bracket_lo"].get<double>() << "," << r2["bracket_hi"].get<double>()
      << "]; ";
    json alphabet = {{"generators",
                      json::array({json{{"name", "g"},
                                        {"map",
                                         {{"type", "mobius_projective"},
                                          {"matrix", {{2.0, 0.0}, {0.0, 0.5}}}}}}})},
                     {"group_mode", true},
                     {"declared_free", false}};
    json r3 = run_poincare({{"alphabet", alphabet}, {"wandering_point", 0.33}}, 1500);
    bool ok3 = r3["exponent"].get<double>() <= 0.05;
    d << "hyperbolic=" << r3["exponent"].get<double>();
    report(4, "pointwise exponent", ok1 && ok2 && ok3, d.str());
}

void criterion_5() {
    bool pass = true;
    std::ostringstream d;
    struct Want {
        const char* fixture;
        int dd, rr;
    };
    for (const Want& w : {Want{"schottky2", 1, 1}, Want{"schottky2-linear", 1, 2},
                          Want{"two-arc-d2", 2, 1}}) {
        for (bool conj : {false, true}) {
            json params = {{"n", 40}, {"grid_size", 256}, {"cluster_eps", 1e-3}, {"seeds", 20}};
            if (conj) params["conjugate_by"] = json{{"type", "rotation"}, {"alpha", 0.3}};
            json cfg = {{"experiment", "structure"},
                        {"system", {{"fixture", w.fixture}}},
                        {"parameters", params},
                        {"seed", 42}};
            json r = run_or_throw(cfg)["results"];
            bool ok = r["d"].get<int>() == w.dd && r["r"].get<int>() == w.rr &&
                      r["seeds_ok"].get<int>() == 20 && r["seeds_modal"].get<int>() == 20;
            pass = pass && ok;
            d << w.fixture << (conj ? "+rot" : "") << "=(" << r["d"].get<int>() << ","
              << r["r"].get<int>() << ")" << r["seeds_modal"].get<int>() << "/20; ";
        }
    }
    report(5, "structure constants", pass, d.str());
}

void criterion_6() {
    bool pass = true;
    std::ostringstream d;
    auto s2 = fixtures::make_fixture("schottky2", {});
    auto lin = fixtures::make_fixture("schottky2-linear", {});

    auto res1 = hyperbolic::certify_pingpong(s2.counting_alphabet.generators[0].map,
                                             s2.counting_alphabet.generators[1].map, *s2.cones, 4096);
    bool ok1 = false;
    if (auto* c = std::get_if<hyperbolic::PingpongCertificate>(&res1)) {
        ok1 = c->q == 1;
        for (double m : c->margins) ok1 = ok1 && m >= 1e-6;
    }
    d << "schottky2 q=1 " << (ok1 ? "certified" : "refused") << "; ";

    auto res2 = hyperbolic::certify_pingpong(lin.counting_alphabet.generators[0].map,
                                             lin.counting_alphabet.generators[1].map, *lin.cones, 8192);
    bool ok2 = false;
    if (auto* c = std::get_if<hyperbolic::PingpongCertificate>(&res2)) {
        ok2 = c->q == 2;
        for (double m : c->margins) ok2 = ok2 && m >= 1e-6;
    }
    d << "linear q=2 " << (ok2 ? "certified" : "refused") << "; ";

    // three designed violations with the expected condition indices
    const auto& h1 = s2.counting_alphabet.generators[0].map;
    const auto& h2 = s2.counting_alphabet.generators[1].map;
    auto v1 = hyperbolic::certify_pingpong(h1, h1, *s2.cones, 4096);
    bool okv1 = std::holds_alternative<hyperbolic::PingpongRefusal>(v1) &&
                std::get<hyperbolic::PingpongRefusal>(v1).condition == 2;
    hyperbolic::ConeSet bad = *s2.cones;
    bad.u1_plus[0] = Arc::ball(0.0, 0.2);
    bad.u2_plus[0] = Arc::ball(0.25, 0.2);
    auto v2 = hyperbolic::certify_pingpong(h1, h2, bad, 4096);
    bool okv2 = std::holds_alternative<hyperbolic::PingpongRefusal>(v2) &&
                std::get<hyperbolic::PingpongRefusal>(v2).condition == 4;
    maps::CircleMap w1 = maps::CircleMap::mobius_projective(Mat2::diag(1.3, 1.0 / 1.3));
    maps::CircleMap w2 = maps::CircleMap::mobius_projective(
        Mat2::rotation(std::numbers::pi * 0.25) * Mat2::diag(1.3, 1.0 / 1.3) *
        Mat2::rotation(-std::numbers::pi * 0.25));
    hyperbolic::ConeSet tiny;
    tiny.u1_plus = {Arc::ball(0.0, 0.01)};
    tiny.u1_minus = {Arc::ball(0.5, 0.01)};
    tiny.u2_plus = {Arc::ball(0.25, 0.01)};
    tiny.u2_minus = {Arc::ball(0.75, 0.01)};
    auto v3 = hyperbolic::certify_pingpong(w1, w2, tiny, 4096);
    bool okv3 = std::holds_alternative<hyperbolic::PingpongRefusal>(v3) &&
                std::get<hyperbolic::PingpongRefusal>(v3).condition == 5;
    d << "violations 2/4/5 " << (okv1 && okv2 && okv3 ? "detected" : "missed") << "; ";

    walk::WalkMeasure semi;
    semi.alphabet = s2.counting_alphabet;
    semi.alphabet.group_mode = false;
    semi.weights = {0.5, 0.5};
    auto found = hyperbolic::search_pingpong(semi, Arc::full(), 4, 24, 5);
    d << "search " << (found ? "succeeded" : "failed");
    pass = ok1 && ok2 && okv1 && okv2 && okv3 && found.has_value();
    report(6, "pingpong certification", pass, d.str());
}

void criterion_7() {
    json cfg = {{"experiment", "subsystem"},
                {"system", {{"fixture", "contracting2"}}},
                {"parameters",
                 {{"N", 6}, {"eps", 0.2}, {"separating", true}, {"cantor_levels", json::array({5, 17})}}},
                {"seed", 1}};
    json r = run_or_throw(cfg)["results"];
    long long kept = r["kept"].get<long long>();
    double box = r["cantor_box_dim"]["value"].get<double>();
    bool pass = kept == 64 && std::abs(box - std::log(2.0) / std::log(3.0)) <= 0.05;
    std::ostringstream d;
    d.precision(4);
    d << "kept=" << kept << "/64 cantor_box=" << box << " (want 0.6309)";
    report(7, "subsystem extraction", pass, d.str());
}

void criterion_8() {
    json cfg = {{"experiment", "conformal"},
                {"system", {{"fixture", "schottky2"}}},
                {"parameters", {{"L_ladder", json::array({8, 10, 12, 14})}, {"cap", 20000000}}},
                {"seed", 1}};
    json r = run_or_throw(cfg)["results"];
    auto ladder = r["ladder"];
    bool monotone = true;
    for (std::size_t i = 1; i < ladder.size(); ++i)
        monotone = monotone && ladder[i]["residual"].get<double>() <
                                   ladder[i - 1]["residual"].get<double>();
    double last = ladder.back()["residual"].get<double>();
    bool mism = true;
    for (const auto& m : r["mismatch"])
        mism = mism && m["residual"].get<double>() >= 5.0 * last;
    bool pass = monotone && last <= 1e-2 && mism;
    std::ostringstream d;
    d << "residuals";
    for (const auto& e : ladder) d << " " << e["residual"].get<double>();
    d << "; mismatch";
    for (const auto& m : r["mismatch"]) d << " " << m["residual"].get<double>();
    report(8, "conformality", pass, d.str());
}

void criterion_9() {
    bool pass = true;
    std::ostringstream d;
    for (int k : {1, 2}) {
        auto fx = fixtures::make_fixture("solvable-2k", {{"k", k}});
        const auto& f = fx.counting_alphabet.generators[0].map;
        const auto& g = fx.counting_alphabet.generators[1].map;
        maps::CircleMap lhs = maps::CircleMap::conjugate(f, g);
        maps::CircleMap rhs = f.inverse();
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double x = i / 1000.0;
            worst = std::max(worst, circ_dist(lhs.eval(x), rhs.eval(x)));
        }
        pass = pass && worst <= 1e-9;
        d << "k=" << k << " sup residual " << worst << "; ";
    }
    report(9, "solvable relation", pass, d.str());
}

void criterion_10() {
    json local_cfg = {{"experiment", "critexp"},
                      {"system", {{"fixture", "twoscale-pingpong"}}},
                      {"parameters",
                       {{"mode", "local"},
                        {"eps_ladder", json::array({0.01})},
                        {"L", 10},
                        {"window", json::array({5, 24})},
                        {"cap", 16000000}}},
                      {"seed", 1}};
    json global_cfg = local_cfg;
    global_cfg["parameters"]["mode"] = "global";
    global_cfg["parameters"]["window"] = json::array({20, 150});
    json lr = run_or_throw(local_cfg)["results"];
    json gr = run_or_throw(global_cfg)["results"];
    double local_delta = lr["per_eps"][0]["fit"]["delta"].get<double>();
    double global_delta = gr["per_eps"][0]["fit"]["delta"].get<double>();
    bool pass = local_delta - global_delta >= 0.2;
    std::ostringstream d;
    d.precision(4);
    d << "local=" << local_delta << " global=" << global_delta << " gap="
      << local_delta - global_delta;
    report(10, "local vs global counting gap", pass, d.str());
}

void criterion_11() {
    // repeated runs with the same seed must be byte-identical in results.json
    std::vector<json> cfgs = {
        {{"experiment", "structure"},
         {"system", {{"fixture", "schottky2-linear"}}},
         {"parameters", {{"n", 40}, {"seeds", 20}}},
         {"seed", 42}},
        {{"experiment", "poincare"},
         {"system", {{"fixture", "parabolic-k1"}}},
         {"parameters", {{"L", 800}, {"s_values", json::array({0.0, 0.25, 0.5, 0.75, 1.0})}}},
         {"seed", 9}},
        {{"experiment", "lyapunov"},
         {"system", {{"fixture", "contracting3"}}},
         {"parameters", {{"n", 200}, {"trials", 16}}},
         {"seed", 3}},
    };
    bool pass = true;
    std::ostringstream d;
    int idx = 0;
    for (const auto& cfg : cfgs) {
        auto dir_a = std::filesystem::temp_directory_path() / ("circledim_acc_a" + std::to_string(idx));
        auto dir_b = std::filesystem::temp_directory_path() / ("circledim_acc_b" + std::to_string(idx));
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
        runner::run_to_dir(cfg, dir_a);
        runner::run_to_dir(cfg, dir_b);
        std::ifstream fa(dir_a / "results.json"), fb(dir_b / "results.json");
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        bool same = !sa.str().empty() && sa.str() == sb.str();
        pass = pass && same;
        d << cfg["experiment"].get<std::string>() << (same ? " identical; " : " DIFFERS; ");
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
        ++idx;
    }
    report(11, "deterministic reproducibility", pass, d.str());
}

} // namespace

int main() {
    std::printf("acceptance suite: desk-scale checks of the dimension/critical-exponent machinery\n");
    auto t0 = Clock::now();
    struct Entry {
        int number;
        const char* title;
        std::function<void()> fn;
    };
    std::vector<Entry> entries = {
        {1, "Fuchsian calibration", criterion_1},
        {2, "dimension formula", criterion_2},
        {3, "parabolic asymptotics", criterion_3},
        {4, "pointwise exponent", criterion_4},
        {5, "structure constants", criterion_5},
        {6, "pingpong certification", criterion_6},
        {7, "subsystem extraction", criterion_7},
        {8, "conformality", criterion_8},
        {9, "solvable relation", criterion_9},
        {10, "local vs global counting gap", criterion_10},
        {11, "deterministic reproducibility", criterion_11},
    };
    for (auto& e : entries) {
        try {
            e.fn();
        } catch (const std::exception& ex) {
            report(e.number, e.title, false, std::string("exception: ") + ex.what());
        }
    }
    std::printf("acceptance: %d/%zu criteria passed (%.1fs)\n",
                static_cast<int>(entries.size()) - g_failures, entries.size(), elapsed(t0));
    return g_failures == 0 ? 0 : 1;
}
