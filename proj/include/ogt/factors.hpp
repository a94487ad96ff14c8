#pragma once

#include <optional>
#include <vector>

#include "ogt/folding.hpp"
#include "ogt/marked_graph.hpp"
#include "ogt/stallings.hpp"

namespace ogt {

// Conjugacy class of a finitely generated subgroup, carried by its folded
// core graph.  Proper free factors have 1 <= rank < r.
struct FactorClass {
    std::vector<Word> generators;
    LabeledGraph core; // cyclic (basepoint-free) folded core

    int rank() const { return core.rank(); }
};

// Folds the wedge of the generators and takes the cyclic core.
FactorClass stallings_core(const Basis& basis, const std::vector<Word>& generators);

// True iff some conjugate of A lies in B (label-preserving morphism of
// folded cores).
bool conjugate_into(const FactorClass& a, const FactorClass& b);
bool same_factor_class(const FactorClass& a, const FactorClass& b);

// Core of the A-cover of G: finite graph, immersion to G, lengths pulled
// back.  Edge labels index oriented edges of G.
struct CoverCore {
    MetricGraph graph;
    std::vector<int> to_graph_edge; // per cover edge, the G edge it maps to
    int rank() const { return graph.rank(); }
    Rational total_length() const { return graph.volume(); }
};

CoverCore cover_core(const FactorClass& a, const MarkedGraph& g);

// Free factors of proper connected noncontractible subgraphs, read through
// the comarking, deduplicated up to conjugacy.
std::vector<FactorClass> project_factors(const MarkedGraph& g, int subgraph_budget = 1 << 20);

// Whether phi fixes the factor set: pi(phi.G) = phi.pi(G) uses this.
FactorClass apply_automorphism(const Automorphism& phi, const FactorClass& a);
bool same_factor_set(const std::vector<FactorClass>& a, const std::vector<FactorClass>& b);

// Legal/illegal structure pulled back to a cover core along a folding path
// event: per cover vertex, gates inherited from the event structure.
struct CoverStructure {
    CoverCore core;
    TrainTrackStructure gates;
};
CoverStructure cover_with_gates(const FactorClass& a, const FoldEvent& event);

// Longest legal segment length in the cover (exact; unbounded when a legal
// cycle exists).
struct SegmentSearch {
    bool unbounded = false;
    Rational longest; // meaningful when bounded
};
SegmentSearch longest_legal_segment(const CoverStructure& cs);
// Longest segment containing no legal subsegment of length >= 3.
SegmentSearch longest_illegal_segment(const CoverStructure& cs, int state_budget = 200000);

// The threshold I = (18 m'(3r-3) + 6)(2r-1) for right projections.
Rational illegal_segment_threshold(int rank);

struct ProjectionWindow {
    int left_event = 0;  // discretized inf over events
    int right_event = 0; // discretized sup over events
    bool left_clamped = false, right_clamped = false;
};

// left: first event whose cover has an immersed legal segment of length 3;
// right: last event with an immersed illegal segment of length I.  Clamped
// endpoints are flagged when the defining sets are empty.
ProjectionWindow left_right_projection(const FactorClass& a, const FoldingPath& path);

// Pr(H) = path snapshot at the leftmost left-projection over pi(H).
struct FactorProjection {
    int event = 0;
    std::vector<ProjectionWindow> windows; // per factor of pi(H)
};
FactorProjection project_to_path(const MarkedGraph& h, const FoldingPath& path);

} // namespace ogt
