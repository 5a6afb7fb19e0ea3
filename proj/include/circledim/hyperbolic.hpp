#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "circledim/critexp.hpp"
#include "circledim/walk.hpp"

namespace circledim::hyperbolic {

// Pingpong cones: q disjoint arcs around the attractors/repellors of each map.
struct ConeSet {
    std::vector<Arc> u1_plus, u2_plus, u1_minus, u2_minus;
};

struct PingpongCertificate {
    int q = 0;
    ConeSet cones;
    // Worst-case slack of the six defining conditions, in order:
    // 1 hyperbolicity (min |multiplier - 1|), 2 cyclic arrangement (min gap
    // between fixed points), 3 cone-attractor containment, 4 cone
    // disjointness, 5 mapping inclusion, 6 contraction outside cones
    // (min -log2 derivative).
    std::array<double, 6> margins{};
    std::vector<maps::FixedPointRecord> fixed_points_h1, fixed_points_h2;
};

struct PingpongRefusal {
    int condition = 0; // 1..6
    double witness = 0.0;
    std::string detail;
};

using CertifyResult = std::variant<PingpongCertificate, PingpongRefusal>;

CertifyResult certify_pingpong(const maps::CircleMap& h1, const maps::CircleMap& h2,
                               const ConeSet& cones, int grid = 4096);

// Builds cones as rho-neighborhoods of the attractor/repellor sets of a
// candidate pair (rho = quarter of the minimal fixed-point gap).
std::optional<ConeSet> cones_from_fixed_points(const std::vector<maps::FixedPointRecord>& f1,
                                               const std::vector<maps::FixedPointRecord>& f2);

struct PingpongSearchResult {
    words::Word w1, w2;
    maps::CircleMap h1, h2;
    PingpongCertificate certificate;
};

std::optional<PingpongSearchResult> search_pingpong(const walk::WalkMeasure& mu, const Arc& target_arc,
                                                    int max_power, int seeds, std::uint64_t seed);

struct Subsystem {
    int N = 0;
    std::vector<words::Word> words;
    std::vector<Arc> arcs;
    Interval log2_window; // [N(lambda-eps), N(lambda+eps)]
    bool separating = false;
};

// Scans length-N positive words; keeps those whose certified derivative
// range on every arc lies inside the window and whose arc images land
// strictly inside. With separating=true keeps a maximal pairwise-disjoint
// image subset on the first arc (sorted left endpoints, sweep).
Subsystem extract_subsystem(const words::Alphabet& alpha, int N, double lambda_target, double eps,
                            const std::vector<Arc>& arcs, long long cap, bool separating);

struct AtomicMeasure {
    std::vector<std::pair<double, double>> atoms; // (point, weight), sorted by point
    double s = 0.0;
    double base_point = 0.0;
    int truncation = 0;
};

// Truncated Patterson-Sullivan measure: atoms at g(x) over the L-ball with
// weights proportional to g'(x)^s (regularizer h == 1).
AtomicMeasure patterson_sullivan(const words::Alphabet& alpha, double x, double s, int L, long long cap);

// W1 distance between the pushforward (f^-1)_* nu and nu reweighted by the
// density (f')^delta, both renormalized.
double conformality_residual(const AtomicMeasure& nu, const maps::CircleMap& f, double delta);

} // namespace circledim::hyperbolic
