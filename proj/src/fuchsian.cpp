#include "circledim/fuchsian.hpp"

#include <cmath>
#include <numbers>

namespace circledim::fuchsian {

FuchsianSystem schottky(std::span<const double> multipliers, std::span<const double> axis_angles,
                        Cover cover) {
    if (multipliers.size() != axis_angles.size() || multipliers.empty())
        throw ValidationError("schottky: equal-length nonempty multiplier/axis lists required");
    FuchsianSystem sys;
    sys.cover = cover;
    for (std::size_t i = 0; i < multipliers.size(); ++i) {
        double chi = multipliers[i];
        if (!(chi > 1.0)) throw ValidationError("schottky: multipliers must exceed 1");
        Mat2 r = Mat2::rotation(std::numbers::pi * axis_angles[i]);
        Mat2 g = r * Mat2::diag(chi, 1.0 / chi) * Mat2::rotation(-std::numbers::pi * axis_angles[i]);
        if (std::abs(g.op_norm() - chi) > 1e-6 * chi)
            throw ValidationError("schottky: generator norm mismatch");
        sys.matrices.push_back(g);
        sys.attractors.push_back(wrap_unit(axis_angles[i]));
        sys.repellers.push_back(wrap_unit(axis_angles[i] + 0.5));
        words::Alphabet::Generator gen;
        gen.name = std::string(1, static_cast<char>('a' + i));
        gen.map = cover == Cover::projective ? maps::CircleMap::mobius_projective(g)
                                             : maps::CircleMap::mobius_linear(g);
        sys.alphabet.generators.push_back(gen);
    }
    sys.alphabet.group_mode = true;
    sys.alphabet.declared_free = true;

    if (sys.matrices.size() == 2) {
        auto cones = standard_cones(sys);
        auto res = hyperbolic::certify_pingpong(sys.alphabet.generators[0].map,
                                                sys.alphabet.generators[1].map, cones, 4096);
        if (std::holds_alternative<hyperbolic::PingpongRefusal>(res)) {
            const auto& ref = std::get<hyperbolic::PingpongRefusal>(res);
            throw ConesOverlap("schottky: standard cones fail condition " +
                               std::to_string(ref.condition) + " (" + ref.detail + ")");
        }
    }
    return sys;
}

hyperbolic::ConeSet standard_cones(const FuchsianSystem& sys) {
    if (sys.matrices.size() != 2) throw ValidationError("standard_cones: needs 2 generators");
    std::vector<maps::FixedPointRecord> f1 = maps::find_fixed_points(sys.alphabet.generators[0].map, 8192);
    std::vector<maps::FixedPointRecord> f2 = maps::find_fixed_points(sys.alphabet.generators[1].map, 8192);
    auto cones = hyperbolic::cones_from_fixed_points(f1, f2);
    if (!cones) throw ConesOverlap("standard_cones: fixed points too close");
    return *cones;
}

critexp::CountTable classical_count(const FuchsianSystem& sys, int L, long long cap, int n_max) {
    critexp::CountTable table;
    table.eps = 0.0;
    table.max_len = L;
    table.counts.assign(static_cast<std::size_t>(n_max) + 1, 0);

    std::vector<Mat2Wide> stack{Mat2Wide::identity()};
    words::walk_reduced_tree(
        sys.alphabet, L, cap,
        [&]() {
            ++table.total_words;
            double two_log2_norm = 2.0 * stack.back().log2_op_norm();
            int n0 = two_log2_norm <= 0.0 ? 0 : static_cast<int>(std::ceil(two_log2_norm));
            if (n0 > n_max) return;
            for (std::size_t n = static_cast<std::size_t>(n0); n < table.counts.size(); ++n)
                ++table.counts[n];
        },
        [&](int letter, int) {
            const Mat2& g = sys.matrices[static_cast<std::size_t>(std::abs(letter) - 1)];
            stack.push_back(stack.back().apply_left(letter > 0 ? g : g.inverse()));
            return true;
        },
        [&]() { stack.pop_back(); });
    return table;
}

std::vector<double> limit_set_sample(const FuchsianSystem& sys, int depth, long long cap) {
    std::vector<double> base;
    for (std::size_t i = 0; i < sys.alphabet.generators.size(); ++i) {
        for (const auto& r : maps::find_fixed_points(sys.alphabet.generators[i].map, 8192))
            base.push_back(r.location);
    }
    std::vector<double> out;
    std::vector<std::vector<double>> stack{base};
    words::walk_reduced_tree(
        sys.alphabet, depth, cap,
        [&]() {
            if (static_cast<int>(stack.size()) - 1 == depth)
                out.insert(out.end(), stack.back().begin(), stack.back().end());
        },
        [&](int letter, int) {
            const auto& m = sys.alphabet.letter_map(letter);
            std::vector<double> next(stack.back().size());
            for (std::size_t i = 0; i < next.size(); ++i) next[i] = m.eval(stack.back()[i]);
            stack.push_back(std::move(next));
            return true;
        },
        [&]() { stack.pop_back(); });
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace circledim::fuchsian
