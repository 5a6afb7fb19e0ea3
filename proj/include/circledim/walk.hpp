#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "circledim/rng.hpp"
#include "circledim/words.hpp"

namespace circledim::walk {

// Step distribution of the random walk: weights over the forward letters of
// the alphabet. Group walks list each inverse as its own generator so that
// sampled words keep their unreduced composition order.
struct WalkMeasure {
    words::Alphabet alphabet;
    std::vector<double> weights;

    void validate() const;
    std::vector<double> cumulative() const;
    double shannon_entropy() const; // base 2
};

words::Word sample_word(const WalkMeasure& mu, int n, std::uint64_t seed);

struct LyapunovEstimate {
    double lambda = 0.0; // base 2, per step
    double stderr_ = 0.0;
    int n = 0;
    int trials = 0;
};
// Mean over trials of logderiv(word of length n)/n at a burned-in start
// point (burn-in n/2 steps from x0). Trial i draws from seed xor i.
LyapunovEstimate lyapunov(const WalkMeasure& mu, double x0, int n, int trials, std::uint64_t seed);

// Single long-run ergodic average, used as an independent cross-check.
double lyapunov_single_run(const WalkMeasure& mu, double x0, long long steps, std::uint64_t seed);

struct EmpiricalMeasure {
    std::vector<double> points;  // sorted
    std::vector<double> weights; // positive, sum 1

    static EmpiricalMeasure from_points(std::vector<double> pts);
    void normalize_sorted();
};

double wasserstein1(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
EmpiricalMeasure push_forward(const EmpiricalMeasure& nu, const maps::CircleMap& f);
EmpiricalMeasure convolve_step(const WalkMeasure& mu, const EmpiricalMeasure& nu); // mu * nu

struct StationarySample {
    EmpiricalMeasure nu;
    double invariance_residual = 0.0; // W1(nu, mu*nu)
    double replica_distance = 0.0;    // W1 between two half-pools
    bool nonconvergence = false;
};
StationarySample stationary_sample(const WalkMeasure& mu, int burn, int count, int chains,
                                   std::uint64_t seed);

struct StructureReport {
    int dr = 0;
    int d = 0;
    int r = 0;
    std::vector<double> cluster_centers;
    std::vector<int> component_of;            // cluster index -> component in [0,d)
    std::vector<double> lyapunov_per_component;
    double max_cluster_diameter = 0.0;
    double min_cluster_gap = 0.0;
    bool reliable = false;
    int seeds_total = 0;
    int seeds_ok = 0;   // seeds passing the gap/diameter diagnostics
    int seeds_modal = 0; // seeds voting for the reported dr
};
// dr = majority-voted cluster count of the push-forward of an equispaced
// grid under random length-n words; d merges clusters whose forward-orbit
// supports overlap within cluster_eps. Throws UnreliableDiagnostics when
// the gap/diameter check fails for more than 20% of seeds.
StructureReport detect_structure(const WalkMeasure& mu, int n, int grid_size, double cluster_eps,
                                 int seeds, std::uint64_t seed);

struct BoundaryEstimate {
    std::vector<double> pi; // cluster centers approximating Pi(omega)
    double decay = 0.0;     // slope of log2(max cluster diameter) vs n
    bool reliable = false;
};
BoundaryEstimate boundary_map(const WalkMeasure& mu, std::uint64_t seed, int n, int grid_size,
                              double cluster_eps);

struct RwEntropyEstimate {
    double h = 0.0; // base 2
    bool exact = false;
};
// Exact Shannon entropy when the alphabet is declared free; otherwise the
// entropy of the n-step convolution on distinct maps, words identified when
// their evaluations agree within 1e-9 on a `resolution`-point grid.
RwEntropyEstimate rw_entropy(const WalkMeasure& mu, int n, int resolution, long long cap);

// 1-d clustering: sort points, cut at gaps > eps.
struct Clusters {
    std::vector<double> centers;
    std::vector<double> diameters;
    std::vector<double> gaps; // gap after cluster i (to the next, cyclically)
    std::vector<int> counts;
    int stragglers = 0; // points dropped by the mass filter
};
Clusters cluster_circle_points(std::vector<double> pts, double eps);

// Same, but clusters carrying fewer than min_count points are dropped:
// the grid image of a homeomorphism always strands a few points near the
// repelling preimages, and those must not inflate the cluster count.
Clusters cluster_filtered(std::vector<double> pts, double eps, int min_count);

} // namespace circledim::walk
