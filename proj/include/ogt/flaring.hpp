#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ogt/automorphism.hpp"
#include "ogt/folding.hpp"

namespace ogt {

// Finite symmetric generating set of a subgroup of Out(F_r).  Closure under
// inversion is enforced; generators Out-equal to the identity are rejected.
struct SubgroupSpec {
    Basis basis;
    std::vector<Automorphism> gens;
    std::vector<std::string> names;   // parallel to gens
    std::vector<int> inverse_index;   // gens[inverse_index[i]] ~ gens[i]^{-1}

    static SubgroupSpec from_generators(std::vector<Automorphism> generators,
                                        std::vector<std::string> names = {});

    std::string word_text(const std::vector<int>& word) const;
    Automorphism word_product(const std::vector<int>& word) const;
};

// BFS ball of Out classes with exact word lengths.
struct CayleyBall {
    struct Node {
        Automorphism rep;
        int dist;
        std::vector<int> word; // generator indices from the identity
    };
    explicit CayleyBall(SubgroupSpec g) : group(std::move(g)) {}
    SubgroupSpec group;
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::vector<int>> buckets; // out_class_key -> nodes
    int radius = 0;

    std::optional<int> find(const Automorphism& g) const;
};

CayleyBall cayley_ball(const SubgroupSpec& group, int radius, std::uint64_t node_budget = 200000);

struct FlaringCounterexample {
    std::vector<int> g1_word, g2_word;
    std::string g1_text, g2_text;
    std::string alpha_text;
    int alpha_len = 0, g1_image_len = 0, g2_inv_image_len = 0;
};

struct FlaringReport {
    Rational lambda;
    int M = 0;
    int word_radius = 0;
    int alpha_budget = 0;
    bool holds_on_sample = false;
    std::optional<FlaringCounterexample> counterexample;
    std::uint64_t pairs = 0, alphas = 0, checks = 0;
    std::vector<double> generator_growth; // fitted exponents, one per generator
    int m_breve = 0;
    Rational illegal_threshold;
    Integer torsion_e_r;
};

// (lambda, M)-conjugacy flaring over certified geodesic pairs in the ball:
// checks lambda*|alpha| <= max(|g1(alpha)|, |g2^{-1}(alpha)|) for all
// conjugacy classes alpha up to alpha_budget; the lexicographically first
// counterexample wins.
FlaringReport conjugacy_flaring_check(const SubgroupSpec& group, const Rational& lambda, int M,
                                      int word_radius, int alpha_budget,
                                      std::uint64_t budget = 200000);

// Re-runs the three conjugacy lengths of a stored counterexample.
bool verify_counterexample(const SubgroupSpec& group, const FlaringCounterexample& ce,
                           const Rational& lambda);

// Heuristic atoroidality screen (NON-CERTIFYING): looks for a short
// conjugacy class fixed by a small power.
struct ScreenVerdict {
    bool certifying = false; // always false, recorded in every report
    std::optional<std::pair<std::string, int>> periodic; // class text, period
    bool degenerate = false;        // identity in Out: everything is fixed
    std::uint64_t pruned = 0;       // orbits cut off by the length ceiling
    int len_cap = 0, pow_cap = 0;
};
ScreenVerdict screen_atoroidal(const Automorphism& phi, int len_cap, int pow_cap,
                               int orbit_length_ceiling = 100000);

// Flare ratios max(l(t-d), l(t+d)) / l(t) along a folding path at
// nearest-event matching; also the longest interval with l <= L0.
struct FlareProbeRow {
    std::string alpha_text;
    Rational min_ratio;
    double longest_short_interval = 0; // in time units, classes with l <= L0
    std::vector<std::pair<size_t, Rational>> ratios; // (event, ratio)
};
std::vector<FlareProbeRow> folding_flare_probe(const FoldingPath& path,
                                               const std::vector<CyclicWord>& alphas, double gap,
                                               const Rational& short_l0);

struct GrowthFit {
    double exponent = 0; // least-squares slope of log length
    Rational min_stretch, max_stretch;
    std::vector<int> lengths;
};
GrowthFit growth_fit(const Automorphism& phi, const CyclicWord& alpha, int n_max);

// |GL_r(Z/3)| bounds the stabilizer of any class in a purely hyperbolic
// subgroup.
Integer torsion_bound(int rank);

// Order of an Out class by iterating to the identity; NotFiniteOrder past
// the cap.
int certify_finite_order(const Automorphism& h, int order_cap = 256);

// The abelianized group generated by H contains no -I (closure capped).
bool projectively_good(const std::vector<Automorphism>& finite_subgroup,
                       std::uint64_t closure_budget = 100000);

// Symmetric generating set {h^{+-1}} u {f^{+-N}} for the ping-pong subgroup.
SubgroupSpec pingpong_spec(const std::vector<Automorphism>& finite_subgroup,
                           const Automorphism& f, int power);

// Stabilizer census |{g in ball : g(alpha) = alpha}|.
int stabilizer_census(const CayleyBall& ball, const CyclicWord& alpha);

} // namespace ogt
