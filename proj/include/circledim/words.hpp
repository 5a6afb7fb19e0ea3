#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circledim/common.hpp"
#include "circledim/maps.hpp"

namespace circledim::words {

// Letters are signed generator indices: +i is generator i-1, -i its formal
// inverse (group alphabets only). A word stores letters in application
// order: letters[0] acts first, letters.back() last, so the word is the
// composition  letters.back() o ... o letters[0].

struct Alphabet {
    struct Generator {
        std::string name;
        maps::CircleMap map;
    };
    std::vector<Generator> generators;
    bool group_mode = false;
    bool declared_free = false;

    int rank() const { return static_cast<int>(generators.size()); }

    const maps::CircleMap& letter_map(int letter) const;
    std::string letter_name(int letter) const;

    // Deterministic letter order for enumeration: +1, -1, +2, -2, ...
    std::vector<int> letter_order() const;

    void ensure_inverses() const; // builds the inverse-map cache

    mutable std::vector<maps::CircleMap> inverse_cache_;
};

struct Word {
    std::vector<int> letters; // reduced

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
    bool operator==(const Word& o) const { return letters == o.letters; }
};

Word reduce(std::vector<int> raw);

// Reduced product and the cancellation count cl(g,h) = (|g|+|h|-|gh|)/2.
std::pair<Word, int> multiply(const Word& g, const Word& h);

Word power(const Word& w, int n); // w^n (n may be negative in group alphabets)
Word inverse_word(const Word& w);

enum class EnumMode { sphere, ball };

// Reduced words of length == radius (sphere) or <= radius (ball), each once,
// in depth-first lexicographic order by signed letter index. Throws
// BudgetExceeded when more than `cap` words would be produced.
std::vector<Word> enumerate(const Alphabet& alpha, int radius, EnumMode mode, long long cap);

long long sphere_size(const Alphabet& alpha, int radius);
long long ball_size(const Alphabet& alpha, int radius);

struct WordEval {
    double image = 0.0;
    double logderiv = 0.0; // base 2
    std::vector<double> orbit;
};
WordEval evaluate_word(const Alphabet& alpha, const Word& w, double x);

maps::CircleMap word_map(const Alphabet& alpha, const Word& w);

nlohmann::json word_to_json(const Alphabet& alpha, const Word& w);
Word word_from_json(const Alphabet& alpha, const nlohmann::json& j);

nlohmann::json alphabet_to_json(const Alphabet& alpha);
Alphabet alphabet_from_json(const nlohmann::json& j);

// Depth-first traversal of the reduced-word tree up to depth max_len.
// `enter(letter, depth)` is called when a letter is appended (the new word is
// prefix + letter, acting after it); returning false prunes the subtree.
// `leave()` undoes the last append. `visit()` is called once per node,
// including the root (the empty word). Node count is capped by `cap`.
template <typename Visit, typename Enter, typename Leave>
void walk_reduced_tree(const Alphabet& alpha, int max_len, long long cap, Visit&& visit,
                       Enter&& enter, Leave&& leave) {
    const std::vector<int> order = alpha.letter_order();
    std::vector<int> stack;
    long long seen = 1;
    visit();
    std::function<void()> rec = [&]() {
        if (static_cast<int>(stack.size()) >= max_len) return;
        for (int letter : order) {
            if (!stack.empty() && stack.back() == -letter) continue; // keep reduced
            if (++seen > cap) throw BudgetExceeded("word enumeration exceeded cap");
            stack.push_back(letter);
            bool descend = enter(letter, static_cast<int>(stack.size()));
            if (descend) {
                visit();
                rec();
            }
            leave();
            stack.pop_back();
        }
    };
    rec();
}

} // namespace circledim::words
