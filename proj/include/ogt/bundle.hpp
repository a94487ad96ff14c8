#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>

#include "ogt/flaring.hpp"

namespace ogt {

// The extension E as a subgroup of Aut(F_r), generated by the inner
// automorphisms of the basis letters together with chosen lifts of the
// group generators.
struct BundleSpec {
    SubgroupSpec group;
    std::vector<Automorphism> lifts; // one per group generator

    // Default lifts: the generators' own representatives.
    static BundleSpec from_group(SubgroupSpec group);

    // Symbolic identity t i_x t^{-1} = i_{t(x)} for every lift and letter.
    bool conjugation_identity_holds() const;
};

struct FiberPoint {
    int base_node = 0; // index into a base Cayley ball
    Word coord;        // element alpha with point = section(base) * i_alpha
};

// Word length of the fiber difference (plain length, not conjugacy length).
int fiber_distance(const FiberPoint& u, const FiberPoint& v);

// Exact Aut-element ball of Cay(E, W).  Nodes are automorphisms compared by
// basis images; edges follow W = {i_{x_j}^{+-1}} u {lifts}.
struct BundleBall {
    struct Node {
        Automorphism element;
        int dist;
    };
    explicit BundleBall(Basis b) : basis(b) {}
    Basis basis;
    std::vector<Node> nodes;
    std::unordered_map<std::string, int> index; // serialized images -> node
    int radius = 0;
    bool complete = true; // false when the budget stopped expansion

    std::optional<int> find(const Automorphism& g) const;
};

BundleBall bundle_ball(const BundleSpec& bundle, int radius,
                       std::uint64_t node_budget = 2'000'000);

// Measured properness function f(n) = max{|alpha| : |i_alpha|_W <= n} over
// the explored ball; BallTooSmall when the ball was truncated below n.
std::vector<int> properness_table(const BundleBall& ball, int up_to_radius);

// Canonical lift of a geodesic edge path through a fiber point.  The path
// is given by generator indices around gamma(0) = identity; geodesy is
// certified against the base ball (NotGeodesic otherwise).
struct CanonicalLift {
    std::vector<Automorphism> points; // one per path vertex
    std::vector<FiberPoint> fiber;    // coordinates relative to the ball's
                                      // per-vertex section lifts
};
CanonicalLift canonical_lift(const BundleSpec& bundle, const CayleyBall& base,
                             const std::vector<int>& path_letters, int zero_index,
                             const Word& start_coord);

struct BundleWitness {
    std::vector<int> path_letters;
    std::string alpha_text;
    int central = 0, forward = 0, backward = 0;
    Rational lambda; // max(forward, backward) / central
};

struct BundleReport {
    int qi_class = 1;
    int n_k = 0, M_k = 0, samples = 0;
    std::uint64_t seed = 0;
    Rational min_lambda;
    double lambda_target = 0;
    std::vector<BundleWitness> below_target;
    std::vector<int> properness; // measured f on the explored range
    bool ball_complete = true;
};

// Samples geodesics [-n_k, n_k] around the identity and canonical-lift pairs
// with central fiber distance >= M_k; reports the empirical flaring ratio.
// When central_family is nonempty the central differences are drawn from it.
BundleReport mj_sardar_sampler(const BundleSpec& bundle, int k, int n_k, int M_k, int samples,
                               std::uint64_t seed, double lambda_target = 1.0,
                               const std::vector<Word>& central_family = {});

struct Prop81Constants {
    Rational lambda_k;
    int n_k = 0;
    Integer M_k;
    int e_k = 0;
    std::vector<int> properness;
};

// Transfer of conjugacy-flaring constants to bundle-flaring constants:
// lambda_k = (lambda+1)/2, n_k = N, M_k = ceil(2(lambda + 2 e_k)/(lambda-1))
// with e_k = f(N + 1 + kN + k) read from the measured properness table.
Prop81Constants prop81_constants(const Rational& lambda, int N, int k, const BundleSpec& bundle,
                                 std::uint64_t node_budget = 2'000'000);

} // namespace ogt
