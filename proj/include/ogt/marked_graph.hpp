#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ogt/automorphism.hpp"
#include "ogt/rational.hpp"
#include "ogt/words.hpp"

namespace ogt {

// Core metric graph with exact rational edge lengths.  Oriented edges are
// 2*e (forward) and 2*e+1 (reverse).
struct MetricGraph {
    struct Edge {
        int from, to;
        Rational len;
    };
    std::vector<Edge> edges;
    int num_vertices = 0;

    int oe_tail(int oe) const { return (oe & 1) ? edges[oe >> 1].to : edges[oe >> 1].from; }
    int oe_head(int oe) const { return (oe & 1) ? edges[oe >> 1].from : edges[oe >> 1].to; }
    static int oe_rev(int oe) { return oe ^ 1; }
    const Rational& oe_len(int oe) const { return edges[oe >> 1].len; }

    int rank() const { return static_cast<int>(edges.size()) - num_vertices + 1; }
    Rational volume() const;
    bool is_connected() const;
    bool is_core() const; // every vertex has valence >= 2
    std::vector<std::vector<int>> outgoing() const;
};

// Frees a cyclic/linear oriented-edge path of backtracks.
std::vector<int> tighten_path(const MetricGraph& g, const std::vector<int>& path);
std::vector<int> tighten_cyclic(const MetricGraph& g, const std::vector<int>& path);

// A point of Outer space: volume-1 marked metric core graph.  The marking
// sends each basis generator to a closed edge path at `base_vertex`; the
// comarking reads an F_r word off each edge and is a homotopy inverse.
struct MarkedGraph {
    Basis basis;
    MetricGraph graph;
    int base_vertex = 0;
    std::vector<std::vector<int>> marking; // per generator
    std::vector<Word> comarking;           // per edge
    std::vector<std::string> vertex_names; // I/O round trips
    std::vector<std::string> edge_names;

    MarkedGraph(Basis b, MetricGraph g, int base, std::vector<std::vector<int>> mk,
                std::vector<Word> cmk, bool normalize = false);

    // Marking built from a spanning tree; comarking collapses the tree.
    static MarkedGraph from_spanning_tree(const Basis& b, MetricGraph g, bool normalize = false);
    static MarkedGraph rose(const Basis& b, const std::vector<Rational>& lengths);
    // Two vertices joined by three edges of length 1/3 (rank 2 only).
    static MarkedGraph theta();

    // Tightened image of a based word through the marking (open path).
    std::vector<int> based_loop(const Word& w) const;
    // Cyclically tightened loop of a conjugacy class.
    std::vector<int> class_loop(const Word& w) const;

    Word read_path(const std::vector<int>& path) const; // through the comarking
    Rational path_length(const std::vector<int>& path) const;

    // Structural checks; throws on violation.
    void validate(bool roundtrip = true) const;

    std::string describe() const;
};

// Length of the immersed representative of a nontrivial conjugacy class.
Rational loop_length(const CyclicWord& alpha, const MarkedGraph& g);
Rational loop_length(const Word& alpha, const MarkedGraph& g);

// Candidate loops: embedded circles, figure eights, barbells, one conjugacy
// class per inverse pair, deterministically ordered.
std::vector<CyclicWord> candidates(const MarkedGraph& g);

// Shortest embedded cycle (always realizes the injectivity radius).
Rational injectivity_radius(const MarkedGraph& g);

struct DistanceResult {
    Rational ratio;      // e^{d(G,H)}
    CyclicWord witness;  // maximizing candidate of G
};

// Asymmetric Lipschitz distance via the candidate maximum (exact).
DistanceResult lipschitz_distance(const MarkedGraph& g, const MarkedGraph& h);

LogScalar symmetrized_distance(const MarkedGraph& g, const MarkedGraph& h);
LogScalar hausdorff_distance(const std::vector<MarkedGraph>& a, const std::vector<MarkedGraph>& b);

// The Out(F_r) action: same metric graph, marking precomposed with
// phi^{-1}, so that l(alpha | phi.G) = l(phi^{-1}(alpha) | G).
MarkedGraph act(const Automorphism& phi, const MarkedGraph& g);

// Erases bivalent vertices (merging their edge pairs) so combinatorial
// comparisons see the underlying metric graph; rebases the marking if the
// base vertex is erased.
MarkedGraph erase_bivalent(const MarkedGraph& g);

// Marked-graph equality: isometry respecting markings up to free homotopy.
// Both sides are normalized with erase_bivalent first.
bool is_marked_isometric(const MarkedGraph& g, const MarkedGraph& h);

// Loop equality as cyclic oriented-edge sequences up to rotation.
bool same_cyclic_path(const std::vector<int>& a, const std::vector<int>& b);

} // namespace ogt
