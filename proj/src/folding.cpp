#include "ogt/folding.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "ogt/simplex.hpp"
#include "ogt/stallings.hpp"

namespace ogt {

Rational MapPath::arclen() const {
    Rational sum = 0;
    for (const auto& iv : ivs) sum += iv.length();
    return sum;
}

MapPath MapPath::reversed(const MetricGraph& g) const {
    MapPath out;
    out.start = end;
    out.end = start;
    for (auto it = ivs.rbegin(); it != ivs.rend(); ++it) {
        const Rational& len = g.edges[it->oedge >> 1].len;
        out.ivs.push_back({MetricGraph::oe_rev(it->oedge), len - it->to, len - it->from});
    }
    return out;
}

int MapPath::germ() const {
    if (ivs.empty()) fail(ErrorCode::BadInput, "degenerate path has no germ");
    return ivs.front().oedge;
}

void MapPath::append(const MapPath& other) {
    std::vector<PathInterval> rest = other.ivs;
    size_t j = 0;
    while (!ivs.empty() && j < rest.size()) {
        PathInterval& last = ivs.back();
        PathInterval& next = rest[j];
        if (next.oedge != MetricGraph::oe_rev(last.oedge)) break;
        // The seam sits at matching coordinates; cancel the overlap.
        Rational c = std::min(last.length(), next.length());
        last.to -= c;
        next.from += c;
        if (last.length() == 0) ivs.pop_back();
        if (next.length() == 0) ++j;
    }
    for (; j < rest.size(); ++j) {
        if (!ivs.empty() && ivs.back().oedge == rest[j].oedge && ivs.back().to == rest[j].from)
            ivs.back().to = rest[j].to; // contiguous run on one edge
        else
            ivs.push_back(rest[j]);
    }
    end = other.end;
}

GraphPoint MapPath::point_at(const MetricGraph& g, const Rational& len) const {
    if (len == 0) return start;
    Rational left = len;
    for (const auto& iv : ivs) {
        if (left <= iv.length()) {
            Rational oc = iv.from + left; // oriented coordinate
            int e = iv.oedge >> 1;
            const Rational& L = g.edges[e].len;
            Rational fwd = (iv.oedge & 1) ? L - oc : oc;
            if (fwd == 0) return GraphPoint::at(g.edges[e].from);
            if (fwd == L) return GraphPoint::at(g.edges[e].to);
            return GraphPoint::on(e, fwd);
        }
        left -= iv.length();
    }
    if (left == 0) return end;
    fail(ErrorCode::BadInput, "point_at beyond path length");
}

MapPath MapPath::prefix(const MetricGraph& g, const Rational& len) const {
    MapPath out;
    out.start = start;
    out.end = point_at(g, len);
    Rational left = len;
    for (const auto& iv : ivs) {
        if (left == 0) break;
        if (left < iv.length()) {
            out.ivs.push_back({iv.oedge, iv.from, iv.from + left});
            left = 0;
            break;
        }
        out.ivs.push_back(iv);
        left -= iv.length();
    }
    if (left > 0) fail(ErrorCode::BadInput, "prefix beyond path length");
    return out;
}

MapPath MapPath::suffix(const MetricGraph& g, const Rational& len) const {
    return reversed(g).prefix(g, len).reversed(g);
}

Rational common_prefix_length(const MapPath& a, const MapPath& b) {
    Rational agreed = 0;
    size_t i = 0, j = 0;
    Rational ai = 0, bj = 0; // consumed within current intervals
    while (i < a.ivs.size() && j < b.ivs.size()) {
        const PathInterval& x = a.ivs[i];
        const PathInterval& y = b.ivs[j];
        if (x.oedge != y.oedge || x.from + ai != y.from + bj) return agreed;
        Rational step = std::min(x.length() - ai, y.length() - bj);
        agreed += step;
        ai += step;
        bj += step;
        if (ai == x.length()) {
            ++i;
            ai = 0;
        }
        if (bj == y.length()) {
            ++j;
            bj = 0;
        }
    }
    return agreed;
}

Rational DifferenceOfMarkings::slope(int edge) const {
    return edge_image[edge].arclen() / source->graph.edges[edge].len;
}

Rational DifferenceOfMarkings::lip() const {
    Rational best = 0;
    for (size_t e = 0; e < edge_image.size(); ++e) best = std::max(best, slope(static_cast<int>(e)));
    return best;
}

std::vector<int> DifferenceOfMarkings::tension_edges() const {
    Rational l = lip();
    std::vector<int> out;
    for (size_t e = 0; e < edge_image.size(); ++e)
        if (slope(static_cast<int>(e)) == l) out.push_back(static_cast<int>(e));
    return out;
}

bool TrainTrackStructure::is_train_track() const {
    for (const auto& vgates : gates)
        if (vgates.size() < 2) return false;
    return true;
}

int TrainTrackStructure::illegality() const {
    int m = 0;
    for (const auto& vgates : gates)
        for (const auto& gate : vgates) m += static_cast<int>(gate.size()) - 1;
    return m;
}

int TrainTrackStructure::gate_of(int vertex, int oe) const {
    const auto& vgates = gates[vertex];
    for (size_t i = 0; i < vgates.size(); ++i)
        if (std::find(vgates[i].begin(), vgates[i].end(), oe) != vgates[i].end())
            return static_cast<int>(i);
    return -1;
}

bool TrainTrackStructure::illegal_turn(int oe1, int oe2) const {
    if (oe1 == oe2) return false;
    for (const auto& vgates : gates)
        for (const auto& gate : vgates) {
            bool has1 = std::find(gate.begin(), gate.end(), oe1) != gate.end();
            bool has2 = std::find(gate.begin(), gate.end(), oe2) != gate.end();
            if (has1 && has2) return true;
            if (has1 || has2) return false;
        }
    return false;
}

namespace {

// Image path of an oriented edge (forward image stored per edge).
MapPath oriented_image(const DifferenceOfMarkings& m, int oe) {
    const MapPath& p = m.edge_image[oe >> 1];
    return (oe & 1) ? p.reversed(m.target->graph) : p;
}

// Germ key of a direction's image: its first oriented target edge, or -1
// for a degenerate path.
int image_germ(const DifferenceOfMarkings& m, int oe) {
    const MapPath& p = m.edge_image[oe >> 1];
    if (p.ivs.empty()) return -1;
    if ((oe & 1) == 0) return p.ivs.front().oedge;
    const PathInterval& last = p.ivs.back();
    return MetricGraph::oe_rev(last.oedge);
}

} // namespace

TrainTrackStructure gates_of(const DifferenceOfMarkings& m) {
    const MetricGraph& g = m.source->graph;
    TrainTrackStructure tt;
    tt.gates.resize(g.num_vertices);
    auto adj = g.outgoing();
    for (int v = 0; v < g.num_vertices; ++v) {
        std::map<int, std::vector<int>> by_germ;
        for (int oe : adj[v]) {
            int germ = image_germ(m, oe);
            if (germ < 0) fail(ErrorCode::BadInput, "gates need nondegenerate edge images");
            by_germ[germ].push_back(oe);
        }
        for (auto& [germ, dirs] : by_germ) {
            std::sort(dirs.begin(), dirs.end());
            tt.gates[v].push_back(dirs);
        }
    }
    return tt;
}

DifferenceOfMarkings base_difference(std::shared_ptr<const MarkedGraph> g,
                                     std::shared_ptr<const MarkedGraph> h) {
    if (!(g->basis == h->basis)) fail(ErrorCode::BadInput, "basis mismatch");
    DifferenceOfMarkings m;
    m.source = std::move(g);
    m.target = std::move(h);
    const MetricGraph& tg = m.target->graph;
    GraphPoint base = GraphPoint::at(m.target->base_vertex);
    m.vertex_image.assign(m.source->graph.num_vertices, base);
    for (size_t e = 0; e < m.source->graph.edges.size(); ++e) {
        MapPath path;
        path.start = base;
        path.end = base;
        for (int oe : m.target->based_loop(m.source->comarking[e]))
            path.ivs.push_back({oe, 0, tg.oe_len(oe)});
        m.edge_image.push_back(std::move(path));
    }
    return m;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

struct EdgeEnd {
    int edge;
    bool at_head; // end sitting at the slide vertex
};

std::vector<EdgeEnd> ends_at(const MetricGraph& g, int v) {
    std::vector<EdgeEnd> out;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].from == v) out.push_back({static_cast<int>(e), false});
        if (g.edges[e].to == v) out.push_back({static_cast<int>(e), true});
    }
    return out;
}

// Available slide distance from p along oriented direction d before hitting
// a target vertex.
Rational slide_room(const MetricGraph& h, const GraphPoint& p, int d) {
    int e = d >> 1;
    const Rational& L = h.edges[e].len;
    if (p.at_vertex()) return L;
    return (d & 1) ? p.offset : L - p.offset;
}

// One-interval path from p along d of length s.
MapPath segment_path(const MetricGraph& h, const GraphPoint& p, int d, const Rational& s) {
    MapPath seg;
    seg.start = p;
    int e = d >> 1;
    const Rational& L = h.edges[e].len;
    Rational start_oc; // oriented coordinate of p along d
    if (p.at_vertex())
        start_oc = 0;
    else
        start_oc = (d & 1) ? L - p.offset : p.offset;
    seg.ivs.push_back({d, start_oc, start_oc + s});
    seg.end = seg.point_at(h, s);
    return seg;
}

void slide_vertex(DifferenceOfMarkings& m, int v, int d, const Rational& s) {
    const MetricGraph& h = m.target->graph;
    MapPath seg = segment_path(h, m.vertex_image[v], d, s);
    MapPath seg_rev = seg.reversed(h);
    for (const EdgeEnd& end : ends_at(m.source->graph, v)) {
        MapPath& path = m.edge_image[end.edge];
        if (end.at_head) {
            path.append(seg); // extend at the head end
        } else {
            MapPath moved = seg_rev;
            moved.append(path);
            path = std::move(moved);
        }
    }
    m.vertex_image[v] = seg.end;
}

} // namespace

namespace {

// One zero-stretch class of source vertices: they share an image point and
// slide as a unit.
struct SlideClass {
    std::vector<int> members;
    GraphPoint point;
    std::vector<int> dirs;      // candidate movement germs (oriented target edges)
    std::vector<Rational> room; // distance to the next target vertex per germ
};

std::vector<SlideClass> slide_classes(const DifferenceOfMarkings& m) {
    const MetricGraph& sg = m.source->graph;
    UnionFind uf(sg.num_vertices);
    for (size_t e = 0; e < sg.edges.size(); ++e)
        if (m.edge_image[e].arclen() == 0) uf.unite(sg.edges[e].from, sg.edges[e].to);
    std::vector<SlideClass> out;
    std::vector<int> index(sg.num_vertices, -1);
    for (int v = 0; v < sg.num_vertices; ++v) {
        int r = uf.find(v);
        if (index[r] < 0) {
            index[r] = static_cast<int>(out.size());
            out.push_back({});
            out.back().point = m.vertex_image[r];
        }
        out[index[r]].members.push_back(v);
        if (!(m.vertex_image[v] == out[index[r]].point))
            fail(ErrorCode::BadInput, "internal: zero class with split image");
    }
    return out;
}

int class_of(const std::vector<SlideClass>& classes, int vertex) {
    for (size_t i = 0; i < classes.size(); ++i)
        for (int v : classes[i].members)
            if (v == vertex) return static_cast<int>(i);
    return -1;
}

// Candidate directions: at an interior point both ways along its edge; at a
// target vertex the germs of incident image paths (moving anywhere else
// lengthens every path).
void collect_dirs(const DifferenceOfMarkings& m, std::vector<SlideClass>& classes) {
    const MetricGraph& sg = m.source->graph;
    const MetricGraph& tg = m.target->graph;
    for (auto& cls : classes) {
        if (!cls.point.at_vertex()) {
            cls.dirs = {2 * cls.point.edge, 2 * cls.point.edge + 1};
        } else {
            for (int v : cls.members)
                for (const EdgeEnd& end : ends_at(sg, v)) {
                    int eg = image_germ(m, 2 * end.edge + (end.at_head ? 1 : 0));
                    if (eg < 0) continue;
                    if (std::find(cls.dirs.begin(), cls.dirs.end(), eg) == cls.dirs.end())
                        cls.dirs.push_back(eg);
                }
        }
        for (int d : cls.dirs) cls.room.push_back(slide_room(tg, cls.point, d));
    }
}

// Splitting a zero-stretch class across one of its degenerate edges: the
// two sides move along distinct germs, so the cut edge stretches linearly.
struct SplitSpec {
    int cls = -1;
    int cut_edge = -1;
    int dir_a = -1, dir_b = -1;
};

// Cell LP over joint movements u_{class,dir} >= 0: within the rooms each
// image length is len0 - u into its germ + u into every other direction of
// its endpoint classes.  Minimizing the maximal slope either improves the
// map or certifies a (local = global, by convexity on the tree) optimum.
// With a SplitSpec the chosen class is divided across the cut edge and each
// side is pinned to one direction; the move is applied only when the LP
// value strictly improves on `lip`.
bool lp_round(DifferenceOfMarkings& m, const Rational& lip, const SplitSpec* split = nullptr) {
    const MetricGraph& sg = m.source->graph;
    std::vector<SlideClass> classes = slide_classes(m);
    collect_dirs(m, classes);
    if (split) {
        // Partition the class by removing the cut edge from its forest.
        SlideClass whole = classes[split->cls];
        std::vector<int> side_a;
        {
            UnionFind uf(sg.num_vertices);
            for (size_t e = 0; e < sg.edges.size(); ++e)
                if (m.edge_image[e].arclen() == 0 && static_cast<int>(e) != split->cut_edge)
                    uf.unite(sg.edges[e].from, sg.edges[e].to);
            int ra = uf.find(sg.edges[split->cut_edge].from);
            for (int v : whole.members)
                if (uf.find(v) == ra) side_a.push_back(v);
        }
        SlideClass part_a, part_b;
        part_a.point = part_b.point = whole.point;
        for (int v : whole.members) {
            if (std::find(side_a.begin(), side_a.end(), v) != side_a.end())
                part_a.members.push_back(v);
            else
                part_b.members.push_back(v);
        }
        part_a.dirs = {split->dir_a};
        part_b.dirs = {split->dir_b};
        part_a.room = {slide_room(m.target->graph, part_a.point, split->dir_a)};
        part_b.room = {slide_room(m.target->graph, part_b.point, split->dir_b)};
        classes[split->cls] = part_a;
        classes.push_back(part_b);
    }
    const int nc = static_cast<int>(classes.size());

    std::vector<std::pair<int, int>> vars; // (class, dir slot)
    std::vector<std::vector<int>> var_of(nc);
    for (int i = 0; i < nc; ++i)
        for (size_t j = 0; j < classes[i].dirs.size(); ++j) {
            var_of[i].push_back(static_cast<int>(vars.size()));
            vars.emplace_back(i, static_cast<int>(j));
        }
    const int nv = static_cast<int>(vars.size());
    const int tvar = nv;

    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b, c(nv + 1, Rational(0));
    c[tvar] = 1;

    for (int k = 0; k < nv; ++k) {
        std::vector<Rational> row(nv + 1, Rational(0));
        row[k] = 1;
        A.push_back(row);
        b.push_back(classes[vars[k].first].room[vars[k].second]);
    }

    auto add_end = [&](std::vector<Rational>& coef, int cls_idx, int germ) {
        for (size_t j = 0; j < classes[cls_idx].dirs.size(); ++j)
            coef[var_of[cls_idx][j]] += (classes[cls_idx].dirs[j] == germ) ? -1 : 1;
    };
    for (size_t e = 0; e < sg.edges.size(); ++e) {
        const MapPath& path = m.edge_image[e];
        int cu = class_of(classes, sg.edges[e].from);
        int cv = class_of(classes, sg.edges[e].to);
        if (path.ivs.empty()) {
            if (cu == cv) continue; // stays degenerate
            // Cut edge of a split: stretches by the sum of the two moves
            // (the directions are distinct by construction).
            if (classes[cu].dirs.size() != 1 || classes[cv].dirs.size() != 1 ||
                classes[cu].dirs[0] == classes[cv].dirs[0])
                fail(ErrorCode::BadInput, "internal: degenerate edge across free classes");
            std::vector<Rational> row(nv + 1, Rational(0));
            row[var_of[cu][0]] = 1;
            row[var_of[cv][0]] = 1;
            row[tvar] = -sg.edges[e].len;
            A.push_back(row);
            b.push_back(Rational(0));
            continue;
        }
        std::vector<Rational> coef(nv + 1, Rational(0));
        add_end(coef, cu, path.ivs.front().oedge);
        add_end(coef, cv, MetricGraph::oe_rev(path.ivs.back().oedge));
        std::vector<Rational> row = coef;
        row[tvar] = -sg.edges[e].len;
        A.push_back(row);
        b.push_back(-path.arclen());
        if (path.ivs.size() == 1) {
            std::vector<Rational> neg(nv + 1, Rational(0));
            for (int k = 0; k < nv; ++k) neg[k] = -coef[k];
            A.push_back(neg);
            b.push_back(path.arclen());
        }
    }

    LPResult res = solve_lp(A, b, c);
    if (res.status != LPStatus::Optimal)
        fail(ErrorCode::OptimalityGap, "cell LP failed to solve");
    if (split && res.value >= lip) return false;

    // Normalize: two positive movements of one class cancel pairwise without
    // hurting feasibility, leaving at most one direction per class.
    for (int i = 0; i < nc; ++i) {
        while (true) {
            int a = -1, bslot = -1;
            for (int k : var_of[i])
                if (res.x[k] > 0) {
                    if (a < 0)
                        a = k;
                    else {
                        bslot = k;
                        break;
                    }
                }
            if (bslot < 0) break;
            Rational cut = std::min(res.x[a], res.x[bslot]);
            res.x[a] -= cut;
            res.x[bslot] -= cut;
        }
    }

    bool moved = false;
    for (int i = 0; i < nc; ++i)
        for (size_t j = 0; j < classes[i].dirs.size(); ++j) {
            Rational u = res.x[var_of[i][j]];
            if (u == 0) continue;
            moved = true;
            for (int v : classes[i].members) slide_vertex(m, v, classes[i].dirs[j], u);
        }
    return moved;
}

// One tidy slide: a class whose whole positive-slope star leaves through a
// single germ shrinks strictly; after tensing, every class then carries at
// least two gates.  Returns false when nothing is left to tidy.
bool tidy_step(DifferenceOfMarkings& m) {
    const MetricGraph& sg = m.source->graph;
    const MetricGraph& tg = m.target->graph;
    std::vector<SlideClass> classes = slide_classes(m);
    for (auto& cls : classes) {
        int germ = -2;
        bool bad = false, any = false;
        for (int v : cls.members)
            for (const EdgeEnd& end : ends_at(sg, v)) {
                int eg = image_germ(m, 2 * end.edge + (end.at_head ? 1 : 0));
                if (eg < 0) continue;
                any = true;
                if (germ == -2) germ = eg;
                else if (germ != eg) bad = true;
            }
        if (!any || bad || germ < 0) continue;

        // Slide to the next event: a path consumed or a target vertex.
        std::map<int, int> rate;
        for (int v : cls.members)
            for (const EdgeEnd& end : ends_at(sg, v)) {
                if (m.edge_image[end.edge].ivs.empty()) continue;
                rate[end.edge] += 1;
            }
        Rational s = slide_room(tg, cls.point, germ);
        for (auto& [e, r] : rate) s = std::min(s, m.edge_image[e].arclen() / Rational(r));
        if (s <= 0) fail(ErrorCode::OptimalityGap, "tidy slide stalled");
        for (int v : cls.members) slide_vertex(m, v, germ, s);
        return true;
    }
    return false;
}

} // namespace

DifferenceOfMarkings optimal_map(std::shared_ptr<const MarkedGraph> g,
                                 std::shared_ptr<const MarkedGraph> h, int slide_cap) {
    Rational target = lipschitz_distance(*g, *h).ratio;
    DifferenceOfMarkings m = base_difference(g, h);

    for (int round = 0; round < slide_cap; ++round) {
        Rational lip = m.lip();
        if (lip < target)
            fail(ErrorCode::BadInput, "internal: slope below the candidate certificate");
        if (lip == target) {
            if (!tidy_step(m)) return m;
            continue;
        }
        if (lp_round(m, lip)) continue;
        // The joint move is cell-optimal; try splitting a zero-stretch class
        // across each of its degenerate edges.
        bool improved = false;
        std::vector<SlideClass> classes = slide_classes(m);
        collect_dirs(m, classes);
        for (size_t ci = 0; ci < classes.size() && !improved; ++ci) {
            if (classes[ci].members.size() < 2) continue;
            for (size_t e = 0; e < m.source->graph.edges.size() && !improved; ++e) {
                if (m.edge_image[e].arclen() != 0) continue;
                int cu = class_of(classes, m.source->graph.edges[e].from);
                if (cu != static_cast<int>(ci)) continue;
                for (int da : classes[ci].dirs) {
                    for (int db : classes[ci].dirs) {
                        if (da == db) continue;
                        SplitSpec spec{static_cast<int>(ci), static_cast<int>(e), da, db};
                        if (lp_round(m, lip, &spec)) {
                            improved = true;
                            break;
                        }
                    }
                    if (improved) break;
                }
            }
        }
        if (!improved)
            fail(ErrorCode::OptimalityGap,
                 "optimal map search stalled at Lip " + rational_to_string(lip) +
                     " above certificate " + rational_to_string(target));
    }
    fail(ErrorCode::OptimalityGap, "optimal map search exceeded " + std::to_string(slide_cap) +
                                       " rounds, target " + rational_to_string(target));
}

namespace {

// Rebuilds a comarking from a marking: read the marking through a spanning
// tree to get theta: x_i -> word in the loop basis, then invert.
std::vector<Word> comarking_from_marking(const Basis& basis, const MetricGraph& g, int base,
                                         const std::vector<std::vector<int>>& marking) {
    auto adj = g.outgoing();
    std::vector<int> parent_edge(g.num_vertices, -1);
    std::vector<bool> seen(g.num_vertices, false);
    std::vector<bool> in_tree(g.edges.size(), false);
    std::deque<int> queue{base};
    seen[base] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int oe : adj[v]) {
            int hh = g.oe_head(oe);
            if (!seen[hh]) {
                seen[hh] = true;
                parent_edge[hh] = oe;
                in_tree[oe >> 1] = true;
                queue.push_back(hh);
            }
        }
    }
    std::vector<int> loop_index(g.edges.size(), 0);
    int next = 1;
    for (size_t e = 0; e < g.edges.size(); ++e)
        if (!in_tree[e]) loop_index[e] = next++;
    if (next - 1 != basis.rank) fail(ErrorCode::BadInput, "marking rank mismatch");

    std::vector<Word> theta_images;
    for (const auto& path : marking) {
        std::vector<Letter> raw;
        for (int oe : path) {
            int e = oe >> 1;
            if (loop_index[e] == 0) continue;
            raw.push_back((oe & 1) ? -loop_index[e] : loop_index[e]);
        }
        theta_images.push_back(reduce(raw));
    }
    std::vector<Word> inv = invert_basis_map(basis, theta_images);
    std::vector<Word> comarking(g.edges.size());
    for (size_t e = 0; e < g.edges.size(); ++e)
        if (loop_index[e] != 0) comarking[e] = inv[loop_index[e] - 1];
    return comarking;
}

} // namespace

TenseResult make_fully_tense(const DifferenceOfMarkings& opt) {
    const MarkedGraph& src = *opt.source;
    const MetricGraph& g = src.graph;
    Rational lam = opt.lip();

    // Zero-stretch edges form a forest (the map is a homotopy equivalence).
    UnionFind uf(g.num_vertices);
    std::vector<bool> collapsed(g.edges.size(), false);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (opt.edge_image[e].arclen() == 0) {
            collapsed[e] = true;
            if (!uf.unite(g.edges[e].from, g.edges[e].to))
                fail(ErrorCode::BadInput, "zero-stretch edges contain a cycle");
        }
    }

    // Tree words from each component root through original comarking.
    std::vector<Word> word_to(g.num_vertices);
    {
        auto adj = g.outgoing();
        std::vector<bool> seen(g.num_vertices, false);
        for (int v = 0; v < g.num_vertices; ++v) {
            if (uf.find(v) != v || seen[v]) continue;
            std::deque<int> queue{v};
            seen[v] = true;
            while (!queue.empty()) {
                int x = queue.front();
                queue.pop_front();
                for (int oe : adj[x]) {
                    if (!collapsed[oe >> 1]) continue;
                    int hh = g.oe_head(oe);
                    if (seen[hh]) continue;
                    seen[hh] = true;
                    Word step = src.comarking[oe >> 1];
                    if (oe & 1) step = step.inverse();
                    word_to[hh] = concat(word_to[x], step);
                    queue.push_back(hh);
                }
            }
        }
    }

    // Collapsed graph with tense lengths.
    Rational volume = 0;
    for (size_t e = 0; e < g.edges.size(); ++e)
        if (!collapsed[e]) volume += opt.edge_image[e].arclen() / lam;
    if (volume <= 0) fail(ErrorCode::BadInput, "degenerate tension graph");

    MetricGraph ng;
    std::vector<int> vmap(g.num_vertices, -1);
    for (int v = 0; v < g.num_vertices; ++v)
        if (uf.find(v) == v) vmap[v] = ng.num_vertices++;
    std::vector<int> emap(g.edges.size(), -1);
    std::vector<Word> comarking;
    std::vector<MapPath> images;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (collapsed[e]) continue;
        emap[e] = static_cast<int>(ng.edges.size());
        Rational len = opt.edge_image[e].arclen() / (lam * volume);
        ng.edges.push_back({vmap[uf.find(g.edges[e].from)], vmap[uf.find(g.edges[e].to)], len});
        comarking.push_back(concat(concat(word_to[g.edges[e].from], src.comarking[e]),
                                   word_to[g.edges[e].to].inverse()));
        images.push_back(opt.edge_image[e]);
    }

    std::vector<std::vector<int>> marking;
    for (const auto& path : src.marking) {
        std::vector<int> mapped;
        for (int oe : path) {
            int e = oe >> 1;
            if (collapsed[e]) continue;
            mapped.push_back(2 * emap[e] + (oe & 1));
        }
        marking.push_back(tighten_path(ng, mapped));
    }

    auto rescaled = std::make_shared<MarkedGraph>(src.basis, std::move(ng),
                                                  vmap[uf.find(src.base_vertex)],
                                                  std::move(marking), std::move(comarking));

    DifferenceOfMarkings tense;
    tense.source = rescaled;
    tense.target = opt.target;
    tense.vertex_image.resize(rescaled->graph.num_vertices);
    for (int v = 0; v < g.num_vertices; ++v)
        if (uf.find(v) == v) tense.vertex_image[vmap[v]] = opt.vertex_image[v];
    tense.edge_image = std::move(images);

    // Exact additivity: d(G,G') stretches the tense witness by 1/volume.
    return {rescaled, std::move(tense), LogScalar(1 / volume)};
}

namespace {

struct GateRef {
    int vertex;
    int gate;
};

} // namespace

FoldingPath fold_path(const DifferenceOfMarkings& tense, int event_cap) {
    FoldingPath path;
    path.target = tense.target;

    DifferenceOfMarkings cur = tense;
    Rational lam = cur.lip();
    for (size_t e = 0; e < cur.edge_image.size(); ++e)
        if (cur.slope(static_cast<int>(e)) != lam)
            fail(ErrorCode::NotTense, "tension graph must be the whole source");
    LogScalar now;

    const Rational girth = injectivity_radius(*tense.target);

    for (int iter = 0; iter < event_cap; ++iter) {
        const MetricGraph& g = cur.source->graph;
        const MetricGraph& tg = cur.target->graph;
        TrainTrackStructure tt = gates_of(cur);
        if (!tt.is_train_track())
            fail(ErrorCode::NotTrainTrack, "a vertex has a single gate");
        int m = tt.illegality();

        FoldEvent ev;
        ev.time = now;
        ev.graph = cur.source;
        ev.residual = cur;
        ev.structure = tt;
        ev.illegality = m;

        if (m == 0) {
            // Immersion with matching volumes: the residual is a marked
            // isometry (up to bivalent subdivision points) and the path is
            // complete.  Certify: unit slopes and the edge images tile the
            // target exactly.
            if (lam != 1)
                fail(ErrorCode::BadInput, "internal: immersive residual with Lip != 1");
            std::vector<std::vector<std::pair<Rational, Rational>>> cover(tg.edges.size());
            for (size_t e = 0; e < g.edges.size(); ++e) {
                if (cur.slope(static_cast<int>(e)) != 1)
                    fail(ErrorCode::BadInput, "internal: terminal slope is not 1");
                for (const auto& iv : cur.edge_image[e].ivs) {
                    int te = iv.oedge >> 1;
                    const Rational& L = tg.edges[te].len;
                    Rational a = (iv.oedge & 1) ? L - iv.to : iv.from;
                    Rational b = (iv.oedge & 1) ? L - iv.from : iv.to;
                    cover[te].emplace_back(a, b);
                }
            }
            for (size_t te = 0; te < tg.edges.size(); ++te) {
                auto& parts = cover[te];
                std::sort(parts.begin(), parts.end());
                Rational at = 0;
                for (auto& [a, b] : parts) {
                    if (a != at)
                        fail(ErrorCode::BadInput, "internal: terminal residual not a bijection");
                    at = b;
                }
                if (at != tg.edges[te].len)
                    fail(ErrorCode::BadInput, "internal: terminal residual not onto");
            }
            path.events.push_back(std::move(ev));
            return path;
        }
        if (lam <= 1) fail(ErrorCode::BadInput, "internal: illegal turns at Lip <= 1");

        // Fold amount: next-event distance over all gates and edges, with a
        // reconvergence guard from the target girth.
        std::vector<GateRef> folds;
        Rational delta = girth / (2 * lam);
        delta = std::min(delta, (1 - 1 / lam) / Rational(m)); // arrival cap
        std::vector<int> fold_rate(g.edges.size(), 0);
        for (int v = 0; v < g.num_vertices; ++v) {
            for (size_t gi = 0; gi < tt.gates[v].size(); ++gi) {
                const auto& gate = tt.gates[v][gi];
                if (gate.size() < 2) continue;
                folds.push_back({v, static_cast<int>(gi)});
                for (int oe : gate) fold_rate[oe >> 1]++;
                for (size_t a = 0; a < gate.size(); ++a)
                    for (size_t b = a + 1; b < gate.size(); ++b) {
                        MapPath pa = oriented_image(cur, gate[a]);
                        MapPath pb = oriented_image(cur, gate[b]);
                        delta = std::min(delta, common_prefix_length(pa, pb) / lam);
                    }
            }
        }
        for (size_t e = 0; e < g.edges.size(); ++e)
            if (fold_rate[e] > 0) delta = std::min(delta, g.edges[e].len / Rational(fold_rate[e]));
        if (delta <= 0) fail(ErrorCode::BadInput, "internal: zero fold step");

        // Quotient nodes: original vertices plus one tip per folded gate.
        int nodes = g.num_vertices + static_cast<int>(folds.size());
        UnionFind uf(nodes);
        std::map<std::pair<int, int>, int> tip_of; // (vertex, gate) -> node
        for (size_t i = 0; i < folds.size(); ++i)
            tip_of[{folds[i].vertex, folds[i].gate}] = g.num_vertices + static_cast<int>(i);

        // Per oriented edge: gate tip eating this end (or -1).
        std::vector<int> end_tip(2 * g.edges.size(), -1);
        for (const auto& f : folds)
            for (int oe : tt.gates[f.vertex][f.gate]) end_tip[oe] = tip_of[{f.vertex, f.gate}];

        struct MiddleInfo {
            Rational len;
            int from_node, to_node;
        };
        std::vector<MiddleInfo> middle(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e) {
            int tail_tip = end_tip[2 * e];     // germ leaving the tail
            int head_tip = end_tip[2 * e + 1]; // germ leaving the head
            Rational len = g.edges[e].len;
            int from_node = g.edges[e].from, to_node = g.edges[e].to;
            if (tail_tip >= 0) {
                len -= delta;
                from_node = tail_tip;
            }
            if (head_tip >= 0) {
                len -= delta;
                to_node = head_tip;
            }
            if (len < 0) fail(ErrorCode::BadInput, "internal: negative middle");
            middle[e] = {len, from_node, to_node};
            if (len == 0) uf.unite(from_node, to_node);
        }

        // Build the quotient graph.
        MetricGraph ng;
        std::vector<int> node_map(nodes, -1);
        for (int nidx = 0; nidx < nodes; ++nidx)
            if (uf.find(nidx) == nidx) node_map[nidx] = ng.num_vertices++;
        auto cls = [&](int nidx) { return node_map[uf.find(nidx)]; };

        Rational volume = 0;
        std::vector<int> stub_edge(folds.size(), -1);
        for (size_t i = 0; i < folds.size(); ++i) {
            stub_edge[i] = static_cast<int>(ng.edges.size());
            int tip = g.num_vertices + static_cast<int>(i);
            ng.edges.push_back({cls(folds[i].vertex), cls(tip), delta});
            volume += delta;
        }
        std::vector<int> middle_edge(g.edges.size(), -1);
        for (size_t e = 0; e < g.edges.size(); ++e) {
            if (middle[e].len == 0) continue;
            middle_edge[e] = static_cast<int>(ng.edges.size());
            ng.edges.push_back({cls(middle[e].from_node), cls(middle[e].to_node), middle[e].len});
            volume += middle[e].len;
        }
        if (ng.rank() != cur.source->basis.rank)
            fail(ErrorCode::BadInput, "internal: fold changed the rank");
        if (volume != 1 - delta * m)
            fail(ErrorCode::BadInput, "internal: volume bookkeeping mismatch");

        // Fold map: old edge -> path of new oriented edges.
        auto stub_for_end = [&](int oe) -> int {
            int tip = end_tip[oe];
            if (tip < 0) return -1;
            return stub_edge[tip - g.num_vertices];
        };
        std::vector<std::vector<int>> edge_to_next(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e) {
            std::vector<int> p;
            int st = stub_for_end(static_cast<int>(2 * e));
            if (st >= 0) p.push_back(2 * st); // tail stub forward (vertex -> tip)
            if (middle_edge[e] >= 0) p.push_back(2 * middle_edge[e]);
            int sh = stub_for_end(static_cast<int>(2 * e + 1));
            if (sh >= 0) p.push_back(2 * sh + 1); // head stub reversed (tip -> vertex)
            edge_to_next[e] = p;
        }
        std::vector<int> vertex_to_next(g.num_vertices);
        for (int v = 0; v < g.num_vertices; ++v) vertex_to_next[v] = cls(v);

        // New marking through the fold map.
        std::vector<std::vector<int>> marking;
        for (const auto& mp : cur.source->marking) {
            std::vector<int> mapped;
            for (int oe : mp) {
                const auto& pe = edge_to_next[oe >> 1];
                if ((oe & 1) == 0)
                    mapped.insert(mapped.end(), pe.begin(), pe.end());
                else
                    for (auto it = pe.rbegin(); it != pe.rend(); ++it)
                        mapped.push_back(MetricGraph::oe_rev(*it));
            }
            marking.push_back(tighten_path(ng, mapped));
        }

        // Renormalize to volume 1 and advance time by -log(volume).
        for (auto& edge : ng.edges) edge.len /= volume;
        std::vector<Word> comarking =
            comarking_from_marking(cur.source->basis, ng, cls(cur.source->base_vertex), marking);

        auto next_graph = std::make_shared<MarkedGraph>(cur.source->basis, std::move(ng),
                                                        cls(cur.source->base_vertex),
                                                        std::move(marking), std::move(comarking));

        // Residual map from the quotient.
        DifferenceOfMarkings next;
        next.source = next_graph;
        next.target = cur.target;
        next.vertex_image.resize(next_graph->graph.num_vertices);
        std::vector<bool> image_set(next_graph->graph.num_vertices, false);
        auto set_image = [&](int node, const GraphPoint& p) {
            int c = cls(node);
            if (image_set[c]) {
                if (!(next.vertex_image[c] == p))
                    fail(ErrorCode::BadInput, "internal: inconsistent fold images");
                return;
            }
            image_set[c] = true;
            next.vertex_image[c] = p;
        };
        for (int v = 0; v < g.num_vertices; ++v) set_image(v, cur.vertex_image[v]);
        std::vector<MapPath> stub_paths(folds.size());
        for (size_t i = 0; i < folds.size(); ++i) {
            const auto& gate = tt.gates[folds[i].vertex][folds[i].gate];
            MapPath image = oriented_image(cur, gate.front());
            stub_paths[i] = image.prefix(tg, lam * delta);
            set_image(g.num_vertices + static_cast<int>(i), stub_paths[i].end);
        }
        next.edge_image.resize(next_graph->graph.edges.size());
        for (size_t i = 0; i < folds.size(); ++i) next.edge_image[stub_edge[i]] = stub_paths[i];
        for (size_t e = 0; e < g.edges.size(); ++e) {
            if (middle_edge[e] < 0) continue;
            MapPath img = cur.edge_image[e];
            Rational len = img.arclen();
            Rational lead = (end_tip[2 * e] >= 0) ? lam * delta : Rational(0);
            Rational trail = (end_tip[2 * e + 1] >= 0) ? lam * delta : Rational(0);
            MapPath trimmed = img.suffix(tg, len - lead).prefix(tg, len - lead - trail);
            next.edge_image[middle_edge[e]] = trimmed;
        }

        ev.edge_to_next = std::move(edge_to_next);
        ev.vertex_to_next = std::move(vertex_to_next);
        path.events.push_back(std::move(ev));

        lam = lam * volume;
        now = LogScalar(now.ratio / volume);
        cur = std::move(next);
    }
    fail(ErrorCode::EventCapExceeded, "folding exceeded " + std::to_string(event_cap) + " events");
}

StandardGeodesic standard_geodesic(std::shared_ptr<const MarkedGraph> g,
                                   std::shared_ptr<const MarkedGraph> h) {
    DifferenceOfMarkings opt = optimal_map(g, h);
    TenseResult tense = make_fully_tense(opt);
    StandardGeodesic out;
    out.start = g;
    out.rescaled = tense.rescaled;
    out.rescale_time = tense.rescale_time;
    out.fold = fold_path(tense.map);
    return out;
}

int max_illegality_bound(int rank) { return (2 * rank - 1) * (2 * rank - 2) / 2; }

LoopRecord loop_profile_at(const CyclicWord& alpha, const FoldEvent& event, int rank) {
    LoopRecord rec;
    const MarkedGraph& g = *event.graph;
    rec.loop = g.class_loop(alpha.rep);
    if (rec.loop.empty()) fail(ErrorCode::TrivialClass, "trivial class in profile");
    rec.length = g.path_length(rec.loop);

    const int n = static_cast<int>(rec.loop.size());
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        int incoming = MetricGraph::oe_rev(rec.loop[i]);
        int outgoing = rec.loop[j];
        int v = g.graph.oe_head(rec.loop[i]);
        int gi = event.structure.gate_of(v, incoming);
        int gj = event.structure.gate_of(v, outgoing);
        if (gi < 0 || gj < 0) fail(ErrorCode::BadInput, "loop direction missing from gates");
        if (gi == gj && incoming != outgoing) rec.turn_positions.push_back(i);
        if (gi == gj && incoming == outgoing)
            fail(ErrorCode::BadInput, "internal: loop backtracks");
    }
    rec.illegal_turns = static_cast<int>(rec.turn_positions.size());

    const int mb = max_illegality_bound(rank);
    if (rec.illegal_turns == 0) {
        rec.leg = rec.length;
        rec.ilg = 0;
        rec.ntr = 0;
        return rec;
    }
    // Arcs between consecutive illegal turns (cyclic).
    const int k = rec.illegal_turns;
    std::vector<Rational> arc_len(k, Rational(0));
    for (int t = 0; t < k; ++t) {
        int from = rec.turn_positions[t];
        int to = rec.turn_positions[(t + 1) % k];
        int steps = (to - from + n) % n;
        if (steps == 0) steps = n; // single turn: the arc wraps the loop
        for (int s = 1; s <= steps; ++s)
            arc_len[t] += g.graph.oe_len(rec.loop[(from + s) % n]);
    }
    rec.leg = 0;
    std::vector<bool> is_long(k, false);
    bool any_long = false;
    for (int t = 0; t < k; ++t) {
        if (arc_len[t] >= 3) {
            is_long[t] = true;
            any_long = true;
            rec.leg += arc_len[t];
        }
    }
    rec.ilg = 0;
    rec.ntr = 0;
    if (!any_long) {
        LoopRecord::Piece piece;
        piece.length = rec.length - rec.leg;
        piece.turns = k;
        piece.first_turn = 0;
        piece.illegal = piece.turns >= mb + 1;
        (piece.illegal ? rec.ilg : rec.ntr) += piece.length;
        rec.pieces.push_back(piece);
        return rec;
    }
    // Walk maximal runs of short arcs, scanning from just past a long arc so
    // wrapping runs are collected once.  A run of j arcs carries j+1 turns
    // counting its endpoints.
    int anchor = 0;
    while (!is_long[anchor]) ++anchor;
    int idx = anchor + 1;
    while (idx <= anchor + k) {
        if (is_long[idx % k]) {
            ++idx;
            continue;
        }
        int start = idx;
        Rational len = 0;
        int arcs = 0;
        while (!is_long[(start + arcs) % k]) {
            len += arc_len[(start + arcs) % k];
            ++arcs;
        }
        LoopRecord::Piece piece;
        piece.length = len;
        piece.turns = arcs + 1;
        piece.first_turn = start % k;
        piece.illegal = piece.turns >= mb + 1;
        (piece.illegal ? rec.ilg : rec.ntr) += piece.length;
        rec.pieces.push_back(piece);
        idx = start + arcs;
    }
    return rec;
}

std::vector<LoopRecord> loop_profile(const CyclicWord& alpha, const FoldingPath& path) {
    std::vector<LoopRecord> out;
    const int rank = path.target->basis.rank;
    for (const auto& ev : path.events) out.push_back(loop_profile_at(alpha, ev, rank));
    return out;
}

Rational length_between_events(const LoopRecord& rec, int illegality, const Rational& s) {
    // l(s) = l * s - (2k/m)(s - 1) with s = e^{t - t_event}.
    return rec.length * s - Rational(2 * rec.illegal_turns, illegality) * (s - 1);
}

namespace {

// Pushes the loop through one fold event, tracking which input slot each
// surviving output edge came from.
struct PushedLoop {
    std::vector<int> edges;
    std::vector<int> slots;
};

PushedLoop push_loop(const FoldEvent& ev, const std::vector<int>& loop) {
    std::vector<std::pair<int, int>> buf; // (oedge, slot)
    auto push = [&](int oe, int slot) {
        if (!buf.empty() && buf.back().first == MetricGraph::oe_rev(oe))
            buf.pop_back();
        else
            buf.emplace_back(oe, slot);
    };
    for (size_t i = 0; i < loop.size(); ++i) {
        int oe = loop[i];
        const auto& p = ev.edge_to_next[oe >> 1];
        if ((oe & 1) == 0)
            for (int x : p) push(x, static_cast<int>(i));
        else
            for (auto it = p.rbegin(); it != p.rend(); ++it)
                push(MetricGraph::oe_rev(*it), static_cast<int>(i));
    }
    // Cyclic reduction.
    size_t lo = 0, hi = buf.size();
    while (hi > lo + 1 && buf[lo].first == MetricGraph::oe_rev(buf[hi - 1].first)) {
        ++lo;
        --hi;
    }
    PushedLoop out;
    for (size_t i = lo; i < hi; ++i) {
        out.edges.push_back(buf[i].first);
        out.slots.push_back(buf[i].second);
    }
    return out;
}

int find_rotation(const std::vector<int>& a, const std::vector<int>& b) {
    // b == rotate(a, r): returns smallest such r, or -1.
    if (a.size() != b.size()) return -1;
    const size_t n = a.size();
    for (size_t r = 0; r < n; ++r) {
        bool ok = true;
        for (size_t k = 0; ok && k < n; ++k)
            if (a[(r + k) % n] != b[k]) ok = false;
        if (ok) return static_cast<int>(r);
    }
    return -1;
}

} // namespace

std::vector<int> turn_correspondence(const CyclicWord& alpha, const FoldingPath& path,
                                     size_t event_index) {
    const int rank = path.target->basis.rank;
    if (event_index + 1 >= path.events.size())
        fail(ErrorCode::BadInput, "no later event to fold into");
    const FoldEvent& ev = path.events[event_index];
    LoopRecord before = loop_profile_at(alpha, ev, rank);
    LoopRecord after = loop_profile_at(alpha, path.events[event_index + 1], rank);

    PushedLoop pushed = push_loop(ev, before.loop);
    int rot = find_rotation(pushed.edges, after.loop);
    if (rot < 0) fail(ErrorCode::BadInput, "internal: pushed loop does not match event loop");

    const int n_out = static_cast<int>(after.loop.size());
    const int n_in = static_cast<int>(before.loop.size());

    // Output turn after position j (in after.loop indexing) separates input
    // slots pushed.slots[(rot + j) % n] and pushed.slots[(rot + j + 1) % n].
    std::vector<int> result(before.turn_positions.size(), -1);
    for (size_t ti = 0; ti < before.turn_positions.size(); ++ti) {
        int slot = before.turn_positions[ti]; // turn between slot and slot+1
        for (size_t tj = 0; tj < after.turn_positions.size(); ++tj) {
            int j = after.turn_positions[tj];
            int s_before = pushed.slots[(rot + j) % n_out];
            int s_after = pushed.slots[(rot + j + 1) % n_out];
            // The output junction covers input junctions s_before..s_after-1
            // cyclically.
            int span = (s_after - s_before + n_in) % n_in;
            int offset = (slot - s_before + n_in) % n_in;
            if (offset < span || (span == 0 && slot == s_before)) {
                result[ti] = static_cast<int>(tj);
                break;
            }
        }
    }
    return result;
}

std::vector<int> unfold_subpath(const CyclicWord& alpha, const FoldingPath& path,
                                size_t from_event, size_t to_event, const SubpathRef& sub) {
    if (from_event > to_event || to_event >= path.events.size())
        fail(ErrorCode::BadInput, "bad event range");
    const int rank = path.target->basis.rank;

    int first = sub.first_turn, last = sub.last_turn;
    {
        LoopRecord rec = loop_profile_at(alpha, path.events[to_event], rank);
        if (first < 0 || first >= rec.illegal_turns || last < 0 || last >= rec.illegal_turns)
            fail(ErrorCode::NotIllegalEndpoint, "subpath endpoints must be illegal turns");
    }
    for (size_t k = to_event; k-- > from_event;) {
        std::vector<int> corr = turn_correspondence(alpha, path, k);
        // Preimage range: minimal input turn mapping to `first`, maximal
        // mapping to `last`.
        int new_first = -1, new_last = -1;
        for (size_t t = 0; t < corr.size(); ++t) {
            if (corr[t] == first && new_first < 0) new_first = static_cast<int>(t);
            if (corr[t] == last) new_last = static_cast<int>(t);
        }
        if (new_first < 0 || new_last < 0)
            fail(ErrorCode::NotIllegalEndpoint, "subpath endpoint does not unfold");
        first = new_first;
        last = new_last;
    }
    LoopRecord rec = loop_profile_at(alpha, path.events[from_event], rank);
    const int n = static_cast<int>(rec.loop.size());
    int from_pos = rec.turn_positions[first];
    int to_pos = rec.turn_positions[last];
    std::vector<int> out;
    int steps = (to_pos - from_pos + n) % n;
    for (int s = 1; s <= steps; ++s) out.push_back(rec.loop[(from_pos + s) % n]);
    return out;
}

} // namespace ogt
