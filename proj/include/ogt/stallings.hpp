#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ogt/words.hpp"

namespace ogt {

// Folded basis-labeled graph.  Used in two roles: Stallings subgroup graphs
// (conjugacy-class form, no basepoint) and basepointed membership automata.
//
// Edges are stored once with a positive label; traversal uses oriented
// indices 2*e (forward) and 2*e+1 (reverse).
struct LabeledGraph {
    struct Edge {
        int from, to;
        Letter label; // always positive
    };
    std::vector<Edge> edges;
    int num_vertices = 0;

    int oe_tail(int oe) const { return (oe & 1) ? edges[oe >> 1].to : edges[oe >> 1].from; }
    int oe_head(int oe) const { return (oe & 1) ? edges[oe >> 1].from : edges[oe >> 1].to; }
    Letter oe_label(int oe) const { return (oe & 1) ? -edges[oe >> 1].label : edges[oe >> 1].label; }
    static int oe_rev(int oe) { return oe ^ 1; }

    std::vector<std::vector<int>> outgoing() const; // oriented edges per vertex

    int rank() const { return static_cast<int>(edges.size()) - num_vertices + 1; }
};

// Folds the wedge of loops spelling `generators` and returns the basepointed
// graph (vertex 0 is the basepoint) with valence-1 vertices other than the
// basepoint pruned.  Throws TrivialSubgroup when every generator is trivial.
LabeledGraph stallings_graph(const Basis& basis, const std::vector<Word>& generators);

// Cyclic core: iteratively deletes all valence-1 vertices (basepoint-free).
LabeledGraph cyclic_core(const LabeledGraph& g);

// Membership walk in a basepointed folded graph: true iff the word traces a
// closed path at the basepoint.
bool traces_loop(const LabeledGraph& g, const Word& w);

// True iff a label-preserving graph morphism src -> dst exists.  Both inputs
// must be folded cores; a morphism is then determined by one vertex image.
bool morphism_exists(const LabeledGraph& src, const LabeledGraph& dst);

// Deterministic isomorphism-invariant serialization of a folded core graph.
std::string canonical_signature(const LabeledGraph& g);
std::uint64_t canonical_hash(const LabeledGraph& g);

// Inverts the map x_i -> images[i], certifying that the images form a basis.
// The returned words satisfy result[j](images) = x_j.  Throws
// NotAnAutomorphism when the images generate a proper subgroup.
std::vector<Word> invert_basis_map(const Basis& basis, const std::vector<Word>& images);

} // namespace ogt
