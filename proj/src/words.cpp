#include "circledim/words.hpp"

#include <algorithm>
#include <cmath>

namespace circledim::words {

void Alphabet::ensure_inverses() const {
    if (inverse_cache_.size() == generators.size()) return;
    inverse_cache_.clear();
    inverse_cache_.reserve(generators.size());
    for (const auto& g : generators) inverse_cache_.push_back(g.map.inverse());
}

const maps::CircleMap& Alphabet::letter_map(int letter) const {
    if (letter > 0) return generators[static_cast<std::size_t>(letter - 1)].map;
    ensure_inverses();
    return inverse_cache_[static_cast<std::size_t>(-letter - 1)];
}

std::string Alphabet::letter_name(int letter) const {
    const auto& nm = generators[static_cast<std::size_t>(std::abs(letter) - 1)].name;
    return letter > 0 ? nm : nm + "^-1";
}

std::vector<int> Alphabet::letter_order() const {
    std::vector<int> order;
    for (int i = 1; i <= rank(); ++i) {
        order.push_back(i);
        if (group_mode) order.push_back(-i);
    }
    return order;
}

Word reduce(std::vector<int> raw) {
    Word w;
    for (int letter : raw) {
        if (letter == 0) continue;
        if (!w.letters.empty() && w.letters.back() == -letter)
            w.letters.pop_back();
        else
            w.letters.push_back(letter);
    }
    return w;
}

std::pair<Word, int> multiply(const Word& g, const Word& h) {
    // product g*h acts as h first, then g: letters = h.letters ++ g.letters
    Word out;
    out.letters = h.letters;
    int cancels = 0;
    for (int letter : g.letters) {
        if (!out.letters.empty() && out.letters.back() == -letter) {
            out.letters.pop_back();
            ++cancels;
        } else {
            out.letters.push_back(letter);
        }
    }
    return {out, cancels};
}

Word inverse_word(const Word& w) {
    Word out;
    out.letters.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(-*it);
    return out;
}

Word power(const Word& w, int n) {
    Word base = n < 0 ? inverse_word(w) : w;
    Word acc;
    for (int i = 0; i < std::abs(n); ++i) acc = multiply(base, acc).first;
    return acc;
}

long long sphere_size(const Alphabet& alpha, int radius) {
    const int k = alpha.rank();
    if (radius == 0) return 1;
    if (!alpha.group_mode) {
        long long s = 1;
        for (int i = 0; i < radius; ++i) s *= k;
        return s;
    }
    long long s = 2LL * k;
    for (int i = 1; i < radius; ++i) s *= 2LL * k - 1;
    return s;
}

long long ball_size(const Alphabet& alpha, int radius) {
    long long total = 0;
    for (int r = 0; r <= radius; ++r) total += sphere_size(alpha, r);
    return total;
}

std::vector<Word> enumerate(const Alphabet& alpha, int radius, EnumMode mode, long long cap) {
    std::vector<Word> out;
    std::vector<int> stack;
    walk_reduced_tree(
        alpha, radius, cap,
        [&]() {
            if (mode == EnumMode::ball || static_cast<int>(stack.size()) == radius)
                out.push_back(Word{stack});
        },
        [&](int letter, int) {
            stack.push_back(letter);
            return true;
        },
        [&]() { stack.pop_back(); });
    return out;
}

WordEval evaluate_word(const Alphabet& alpha, const Word& w, double x) {
    WordEval ev;
    ev.orbit.reserve(w.letters.size() + 1);
    double y = wrap_unit(x);
    ev.orbit.push_back(y);
    for (int letter : w.letters) {
        const auto& m = alpha.letter_map(letter);
        ev.logderiv += m.log2_deriv(y);
        y = m.eval(y);
        ev.orbit.push_back(y);
    }
    ev.image = y;
    return ev;
}

maps::CircleMap word_map(const Alphabet& alpha, const Word& w) {
    std::vector<maps::CircleMap> ms;
    ms.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        ms.push_back(alpha.letter_map(*it));
    return maps::CircleMap::compose(std::move(ms));
}

nlohmann::json word_to_json(const Alphabet& alpha, const Word& w) {
    nlohmann::json arr = nlohmann::json::array();
    for (int letter : w.letters) arr.push_back(alpha.letter_name(letter));
    return arr;
}

Word word_from_json(const Alphabet& alpha, const nlohmann::json& j) {
    std::vector<int> raw;
    for (const auto& e : j) {
        std::string s = e.get<std::string>();
        bool inv = false;
        if (s.size() > 3 && s.substr(s.size() - 3) == "^-1") {
            inv = true;
            s = s.substr(0, s.size() - 3);
        }
        int idx = -1;
        for (int i = 0; i < alpha.rank(); ++i)
            if (alpha.generators[static_cast<std::size_t>(i)].name == s) idx = i + 1;
        if (idx < 0) throw ValidationError("unknown generator name in word: " + s);
        raw.push_back(inv ? -idx : idx);
    }
    return reduce(std::move(raw));
}

nlohmann::json alphabet_to_json(const Alphabet& alpha) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : alpha.generators)
        gens.push_back({{"name", g.name}, {"map", g.map.to_json()}});
    return {{"generators", gens}, {"group_mode", alpha.group_mode}, {"declared_free", alpha.declared_free}};
}

Alphabet alphabet_from_json(const nlohmann::json& j) {
    Alphabet a;
    for (const auto& g : j.at("generators"))
        a.generators.push_back({g.at("name").get<std::string>(), maps::CircleMap::from_json(g.at("map"))});
    a.group_mode = j.value("group_mode", false);
    a.declared_free = j.value("declared_free", false);
    return a;
}

} // namespace circledim::words
