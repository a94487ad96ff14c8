#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ogt/marked_graph.hpp"

namespace ogt {

// A point on a metric graph: a vertex, or an interior point of an edge at an
// exact offset from the edge's tail (in the edge's own coordinates).
struct GraphPoint {
    int vertex = -1;
    int edge = -1;
    Rational offset;

    bool at_vertex() const { return vertex >= 0; }
    static GraphPoint at(int v) {
        GraphPoint p;
        p.vertex = v;
        return p;
    }
    static GraphPoint on(int e, Rational off) {
        GraphPoint p;
        p.edge = e;
        p.offset = std::move(off);
        return p;
    }
    friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
        return a.vertex == b.vertex && a.edge == b.edge && (a.vertex >= 0 || a.offset == b.offset);
    }
};

// Tight path in a metric graph between two GraphPoints: a run of
// edge intervals in traversal order.  Interval coordinates are measured
// along the oriented edge, so 0 <= from < to <= len(e).
struct PathInterval {
    int oedge;
    Rational from, to; // oriented coordinates

    Rational length() const { return to - from; }
};

struct MapPath {
    GraphPoint start, end;
    std::vector<PathInterval> ivs;

    Rational arclen() const;
    MapPath reversed(const MetricGraph& g) const;
    // First oriented edge (the germ); requires a nondegenerate path.
    int germ() const;
    void append(const MapPath& other); // tightens at the seam
    MapPath prefix(const MetricGraph& g, const Rational& len) const;
    MapPath suffix(const MetricGraph& g, const Rational& len) const;
    GraphPoint point_at(const MetricGraph& g, const Rational& len) const;
};

// Arc length along which two tight paths out of a common point agree.
Rational common_prefix_length(const MapPath& a, const MapPath& b);

// A linear-on-edges difference of markings G -> H.  The homotopy class of
// each edge image is pinned by marking_H(comarking_G(edge)).
struct DifferenceOfMarkings {
    std::shared_ptr<const MarkedGraph> source, target;
    std::vector<GraphPoint> vertex_image; // per source vertex
    std::vector<MapPath> edge_image;      // per source edge, forward orientation

    Rational slope(int edge) const;
    Rational lip() const;
    std::vector<int> tension_edges() const; // edges with slope == lip
};

// Gates at each vertex: partition of outgoing oriented edges by image germ.
struct TrainTrackStructure {
    // gates[v] = list of gates, each a sorted list of oriented edges at v.
    std::vector<std::vector<std::vector<int>>> gates;

    bool is_train_track() const; // at least two gates at every vertex
    int illegality() const;      // sum over gates of (size - 1)
    // True iff the two oriented edges leave a common vertex in one gate.
    bool illegal_turn(int oe1, int oe2) const;
    int gate_of(int vertex, int oe) const;
};

TrainTrackStructure gates_of(const DifferenceOfMarkings& map);

// Base map phi_0 = marking_H . comarking_G with every vertex at the base
// vertex of H.  All further searches move its vertex images.
DifferenceOfMarkings base_difference(std::shared_ptr<const MarkedGraph> g,
                                     std::shared_ptr<const MarkedGraph> h);

// Optimal map: Lip equals the candidate ratio, certified exactly.  The
// search slides vertices to the next rational balance event; if it stalls
// above the certificate it reports OptimalityGap rather than returning an
// uncertified map.
DifferenceOfMarkings optimal_map(std::shared_ptr<const MarkedGraph> g,
                                 std::shared_ptr<const MarkedGraph> h, int slide_cap = 4000);

struct FoldEvent {
    LogScalar time;  // ratio = e^t, exact
    std::shared_ptr<const MarkedGraph> graph;
    DifferenceOfMarkings residual; // graph -> target, fully tense
    TrainTrackStructure structure;
    int illegality = 0;
    // Fold data to the next event (empty on the last event):
    std::vector<std::vector<int>> edge_to_next; // oriented-edge path per edge
    std::vector<int> vertex_to_next;
};

struct FoldingPath {
    std::shared_ptr<const MarkedGraph> target;
    std::vector<FoldEvent> events;

    const FoldEvent& at(size_t i) const { return events.at(i); }
    size_t size() const { return events.size(); }
    LogScalar total_time() const { return events.empty() ? LogScalar() : events.back().time; }
};

struct StandardGeodesic {
    // Rescaling segment (may be trivial): start point and the rescaled G'.
    std::shared_ptr<const MarkedGraph> start;
    std::shared_ptr<const MarkedGraph> rescaled;
    LogScalar rescale_time; // ratio 1 when the segment is empty
    FoldingPath fold;
};

// Shrinks edges outside the tension graph (collapsing the zero-stretch
// forest) to a fully tense optimal map, with exact additivity
// ratio(G,G') * ratio(G',H) = ratio(G,H).
struct TenseResult {
    std::shared_ptr<const MarkedGraph> rescaled;
    DifferenceOfMarkings map;
    LogScalar rescale_time;
};
TenseResult make_fully_tense(const DifferenceOfMarkings& opt);

// Greedy folding engine: folds every gate simultaneously, event by event,
// until the residual map is a marked isometry.
FoldingPath fold_path(const DifferenceOfMarkings& tense, int event_cap = 10000);

StandardGeodesic standard_geodesic(std::shared_ptr<const MarkedGraph> g,
                                   std::shared_ptr<const MarkedGraph> h);

// Per-event record of a tracked conjugacy class.
struct LoopRecord {
    Rational length;
    int illegal_turns = 0;
    Rational leg, ilg, ntr;
    // Maximal complementary pieces (runs of short legal arcs): for each, its
    // total length, illegal turn count, and whether it counts toward ilg.
    struct Piece {
        Rational length;
        int turns = 0;
        bool illegal = false;
        int first_turn = 0; // index into the loop's illegal-turn list
    };
    std::vector<Piece> pieces;
    std::vector<int> turn_positions; // indices into the loop edge path
    std::vector<int> loop;           // tightened oriented-edge path
};

// m-breve: max illegal turns over train track structures, instantiated as
// the rose bound C(2r-1, 2).
int max_illegality_bound(int rank);

LoopRecord loop_profile_at(const CyclicWord& alpha, const FoldEvent& event, int rank);
std::vector<LoopRecord> loop_profile(const CyclicWord& alpha, const FoldingPath& path);

// Exact length of alpha at intermediate time s = e^{t - t_event} within the
// event interval: l(s) = l*s - (2k/m)(s-1).
Rational length_between_events(const LoopRecord& rec, int illegality, const Rational& s);

// Unfolds a subpath of alpha|G_{t'} (given by a half-open range of
// illegal-turn indices) to the earlier event t; both must be event indices.
struct SubpathRef {
    int first_turn;  // index into turn_positions
    int last_turn;   // inclusive
};
std::vector<int> unfold_subpath(const CyclicWord& alpha, const FoldingPath& path, size_t from_event,
                                size_t to_event, const SubpathRef& sub);

// Illegal-turn correspondence across one fold event: for each turn of the
// earlier loop, the index of the turn it becomes (or -1 when it turns
// legal); merged turns map to a common index.
std::vector<int> turn_correspondence(const CyclicWord& alpha, const FoldingPath& path,
                                     size_t event_index);

} // namespace ogt
