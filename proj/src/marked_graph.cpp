#include "ogt/marked_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ogt {

Rational MetricGraph::volume() const {
    Rational v = 0;
    for (const auto& e : edges) v += e.len;
    return v;
}

std::vector<std::vector<int>> MetricGraph::outgoing() const {
    std::vector<std::vector<int>> out(num_vertices);
    for (size_t e = 0; e < edges.size(); ++e) {
        out[edges[e].from].push_back(static_cast<int>(2 * e));
        out[edges[e].to].push_back(static_cast<int>(2 * e + 1));
    }
    return out;
}

bool MetricGraph::is_connected() const {
    if (num_vertices == 0) return false;
    std::vector<bool> seen(num_vertices, false);
    std::deque<int> queue{0};
    seen[0] = true;
    int count = 1;
    auto adj = outgoing();
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int oe : adj[v]) {
            int h = oe_head(oe);
            if (!seen[h]) {
                seen[h] = true;
                ++count;
                queue.push_back(h);
            }
        }
    }
    return count == num_vertices;
}

bool MetricGraph::is_core() const {
    std::vector<int> valence(num_vertices, 0);
    for (const auto& e : edges) {
        valence[e.from]++;
        valence[e.to]++;
    }
    return std::all_of(valence.begin(), valence.end(), [](int v) { return v >= 2; });
}

std::vector<int> tighten_path(const MetricGraph& g, const std::vector<int>& path) {
    (void)g;
    std::vector<int> out;
    out.reserve(path.size());
    for (int oe : path) {
        if (!out.empty() && out.back() == MetricGraph::oe_rev(oe))
            out.pop_back();
        else
            out.push_back(oe);
    }
    return out;
}

std::vector<int> tighten_cyclic(const MetricGraph& g, const std::vector<int>& path) {
    std::vector<int> lin = tighten_path(g, path);
    size_t i = 0, j = lin.size();
    while (j > i + 1 && lin[i] == MetricGraph::oe_rev(lin[j - 1])) {
        ++i;
        --j;
    }
    return std::vector<int>(lin.begin() + i, lin.begin() + j);
}

MarkedGraph::MarkedGraph(Basis b, MetricGraph g, int base, std::vector<std::vector<int>> mk,
                         std::vector<Word> cmk, bool normalize)
    : basis(b), graph(std::move(g)), base_vertex(base), marking(std::move(mk)),
      comarking(std::move(cmk)) {
    if (normalize) {
        Rational vol = graph.volume();
        if (vol <= 0) fail(ErrorCode::BadInput, "graph has nonpositive volume");
        for (auto& e : graph.edges) e.len /= vol;
    }
    for (auto& p : marking) p = tighten_path(graph, p);
    vertex_names.resize(graph.num_vertices);
    for (int v = 0; v < graph.num_vertices; ++v) vertex_names[v] = "v" + std::to_string(v);
    edge_names.resize(graph.edges.size());
    for (size_t e = 0; e < graph.edges.size(); ++e) edge_names[e] = "e" + std::to_string(e + 1);
    validate(false);
}

void MarkedGraph::validate(bool roundtrip) const {
    if (!graph.is_connected()) fail(ErrorCode::BadInput, "graph not connected");
    if (!graph.is_core()) fail(ErrorCode::BadInput, "valence-1 vertex (graph not core)");
    for (const auto& e : graph.edges)
        if (e.len <= 0) fail(ErrorCode::BadInput, "nonpositive edge length");
    if (graph.volume() != 1) fail(ErrorCode::BadInput, "volume is not 1 (pass normalize)");
    if (graph.rank() != basis.rank) fail(ErrorCode::BadInput, "graph rank does not match basis");
    if (static_cast<int>(marking.size()) != basis.rank)
        fail(ErrorCode::BadInput, "marking must cover every generator");
    if (comarking.size() != graph.edges.size())
        fail(ErrorCode::BadInput, "comarking must cover every edge");
    for (const auto& p : marking) {
        if (p.empty()) fail(ErrorCode::BadInput, "marking path is trivial");
        if (graph.oe_tail(p.front()) != base_vertex || graph.oe_head(p.back()) != base_vertex)
            fail(ErrorCode::BadInput, "marking path not closed at base vertex");
        for (size_t i = 0; i + 1 < p.size(); ++i)
            if (graph.oe_head(p[i]) != graph.oe_tail(p[i + 1]))
                fail(ErrorCode::BadInput, "marking path not continuous");
    }
    if (roundtrip) {
        // Generators survive marking -> comarking.
        for (int j = 0; j < basis.rank; ++j) {
            Word back = read_path(marking[j]);
            if (cyclic_reduce(back).letters != std::vector<Letter>{j + 1})
                fail(ErrorCode::BadInput, "marking/comarking round trip fails on generator");
        }
        // Loops survive comarking -> marking up to free homotopy: check a
        // homology basis of loops through a spanning tree.
        auto adj = graph.outgoing();
        std::vector<int> parent_edge(graph.num_vertices, -1);
        std::vector<bool> seen(graph.num_vertices, false);
        std::deque<int> queue{base_vertex};
        seen[base_vertex] = true;
        std::vector<bool> in_tree(graph.edges.size(), false);
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int oe : adj[v]) {
                int h = graph.oe_head(oe);
                if (!seen[h]) {
                    seen[h] = true;
                    parent_edge[h] = oe;
                    in_tree[oe >> 1] = true;
                    queue.push_back(h);
                }
            }
        }
        auto tree_path_from_base = [&](int v) {
            std::vector<int> path;
            while (v != base_vertex) {
                int oe = parent_edge[v];
                path.push_back(oe);
                v = graph.oe_tail(oe);
            }
            std::reverse(path.begin(), path.end());
            return path;
        };
        for (size_t e = 0; e < graph.edges.size(); ++e) {
            if (in_tree[e]) continue;
            std::vector<int> loop = tree_path_from_base(graph.edges[e].from);
            loop.push_back(static_cast<int>(2 * e));
            auto back = tree_path_from_base(graph.edges[e].to);
            std::reverse(back.begin(), back.end());
            for (int oe : back) loop.push_back(MetricGraph::oe_rev(oe));
            Word w = read_path(loop);
            if (cyclic_reduce(w).empty())
                fail(ErrorCode::BadInput, "comarking kills an essential loop");
            std::vector<int> pushed = class_loop(w);
            if (!same_cyclic_path(pushed, tighten_cyclic(graph, loop)))
                fail(ErrorCode::BadInput, "comarking/marking round trip fails on a loop");
        }
    }
}

MarkedGraph MarkedGraph::from_spanning_tree(const Basis& b, MetricGraph g, bool normalize) {
    if (!g.is_connected()) fail(ErrorCode::BadInput, "graph not connected");
    if (g.rank() != b.rank) fail(ErrorCode::BadInput, "graph rank does not match basis");
    auto adj = g.outgoing();
    const int base = 0;
    std::vector<int> parent_edge(g.num_vertices, -1);
    std::vector<bool> seen(g.num_vertices, false);
    std::vector<bool> in_tree(g.edges.size(), false);
    std::deque<int> queue{base};
    seen[base] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int oe : adj[v]) {
            int h = g.oe_head(oe);
            if (!seen[h]) {
                seen[h] = true;
                parent_edge[h] = oe;
                in_tree[oe >> 1] = true;
                queue.push_back(h);
            }
        }
    }
    auto tree_path_from_base = [&](int v) {
        std::vector<int> path;
        while (v != base) {
            int oe = parent_edge[v];
            path.push_back(oe);
            v = g.oe_tail(oe);
        }
        std::reverse(path.begin(), path.end());
        return path;
    };
    std::vector<std::vector<int>> marking;
    std::vector<Word> comarking(g.edges.size());
    int gen = 0;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (in_tree[e]) continue;
        if (gen >= b.rank) fail(ErrorCode::BadInput, "too many independent loops");
        std::vector<int> loop = tree_path_from_base(g.edges[e].from);
        loop.push_back(static_cast<int>(2 * e));
        auto back = tree_path_from_base(g.edges[e].to);
        std::reverse(back.begin(), back.end());
        for (int oe : back) loop.push_back(MetricGraph::oe_rev(oe));
        marking.push_back(loop);
        comarking[e] = Word({gen + 1});
        ++gen;
    }
    if (gen != b.rank) fail(ErrorCode::BadInput, "rank mismatch building marking");
    return MarkedGraph(b, std::move(g), base, std::move(marking), std::move(comarking), normalize);
}

MarkedGraph MarkedGraph::rose(const Basis& b, const std::vector<Rational>& lengths) {
    if (static_cast<int>(lengths.size()) != b.rank)
        fail(ErrorCode::BadInput, "rose needs one length per generator");
    MetricGraph g;
    g.num_vertices = 1;
    for (const auto& len : lengths) g.edges.push_back({0, 0, len});
    std::vector<std::vector<int>> marking;
    std::vector<Word> comarking;
    for (int j = 0; j < b.rank; ++j) {
        marking.push_back({2 * j});
        comarking.push_back(Word({j + 1}));
    }
    return MarkedGraph(b, std::move(g), 0, std::move(marking), std::move(comarking));
}

MarkedGraph MarkedGraph::theta() {
    Basis b(2);
    MetricGraph g;
    g.num_vertices = 2;
    Rational third(1, 3);
    g.edges.push_back({0, 1, third}); // e1
    g.edges.push_back({0, 1, third}); // e2
    g.edges.push_back({0, 1, third}); // e3
    std::vector<std::vector<int>> marking = {{0, 3}, {2, 5}}; // a = e1 e2^-, b = e2 e3^-
    std::vector<Word> comarking = {Word({1}), Word(), Word({-2})};
    return MarkedGraph(b, std::move(g), 0, std::move(marking), std::move(comarking));
}

std::vector<int> MarkedGraph::based_loop(const Word& w) const {
    std::vector<int> out;
    for (Letter l : w.letters) {
        const std::vector<int>& p = marking[std::abs(l) - 1];
        if (l > 0) {
            for (int oe : p) {
                if (!out.empty() && out.back() == MetricGraph::oe_rev(oe))
                    out.pop_back();
                else
                    out.push_back(oe);
            }
        } else {
            for (auto it = p.rbegin(); it != p.rend(); ++it) {
                int oe = MetricGraph::oe_rev(*it);
                if (!out.empty() && out.back() == MetricGraph::oe_rev(oe))
                    out.pop_back();
                else
                    out.push_back(oe);
            }
        }
    }
    return out;
}

std::vector<int> MarkedGraph::class_loop(const Word& w) const {
    std::vector<int> lin = based_loop(w);
    size_t i = 0, j = lin.size();
    while (j > i + 1 && lin[i] == MetricGraph::oe_rev(lin[j - 1])) {
        ++i;
        --j;
    }
    return std::vector<int>(lin.begin() + i, lin.begin() + j);
}

Word MarkedGraph::read_path(const std::vector<int>& path) const {
    std::vector<Letter> raw;
    for (int oe : path) {
        const Word& w = comarking[oe >> 1];
        if (oe & 1) {
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
                raw.push_back(inverse_letter(*it));
        } else {
            raw.insert(raw.end(), w.letters.begin(), w.letters.end());
        }
    }
    return reduce(raw);
}

Rational MarkedGraph::path_length(const std::vector<int>& path) const {
    Rational sum = 0;
    for (int oe : path) sum += graph.oe_len(oe);
    return sum;
}

std::string MarkedGraph::describe() const {
    std::ostringstream os;
    os << "graph(V=" << graph.num_vertices << ",E=" << graph.edges.size() << ";";
    for (size_t e = 0; e < graph.edges.size(); ++e)
        os << edge_names[e] << ":" << rational_to_string(graph.edges[e].len) << ",";
    os << ")";
    return os.str();
}

Rational loop_length(const Word& alpha, const MarkedGraph& g) {
    Word r = reduce(alpha.letters);
    if (cyclic_reduce(r).empty()) fail(ErrorCode::TrivialClass, "trivial conjugacy class");
    std::vector<int> loop = g.class_loop(r);
    if (loop.empty()) fail(ErrorCode::TrivialClass, "marking killed a nontrivial class");
    return g.path_length(loop);
}

Rational loop_length(const CyclicWord& alpha, const MarkedGraph& g) {
    return loop_length(alpha.rep, g);
}

namespace {

// Embedded cycles as oriented-edge paths, one representative each.
std::vector<std::vector<int>> embedded_circles(const MetricGraph& g) {
    auto adj = g.outgoing();
    std::vector<std::vector<int>> result;
    std::set<std::vector<int>> seen; // sorted edge-id sets
    std::vector<int> path;
    std::vector<bool> on_path(g.num_vertices, false);

    std::function<void(int, int)> dfs = [&](int start, int v) {
        for (int oe : adj[v]) {
            int h = g.oe_head(oe);
            if (!path.empty() && oe == MetricGraph::oe_rev(path.back())) continue;
            if (h == start) {
                std::vector<int> cycle = path;
                cycle.push_back(oe);
                std::vector<int> ids;
                for (int x : cycle) ids.push_back(x >> 1);
                std::sort(ids.begin(), ids.end());
                if (ids.end() == std::adjacent_find(ids.begin(), ids.end()) &&
                    seen.insert(ids).second)
                    result.push_back(cycle);
                continue;
            }
            if (on_path[h] || h < start) continue;
            path.push_back(oe);
            on_path[h] = true;
            dfs(start, h);
            on_path[h] = false;
            path.pop_back();
        }
    };
    for (int start = 0; start < g.num_vertices; ++start) {
        path.clear();
        dfs(start, start);
    }
    // Loop edges form their own 1-cycles; the DFS above finds them, but make
    // the order deterministic.
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<int> rotate_cycle_to(const MetricGraph& g, const std::vector<int>& cycle, int v) {
    for (size_t i = 0; i < cycle.size(); ++i)
        if (g.oe_tail(cycle[i]) == v) {
            std::vector<int> out(cycle.begin() + i, cycle.end());
            out.insert(out.end(), cycle.begin(), cycle.begin() + i);
            return out;
        }
    fail(ErrorCode::BadInput, "vertex not on cycle");
}

std::vector<int> reverse_path(const std::vector<int>& p) {
    std::vector<int> out;
    for (auto it = p.rbegin(); it != p.rend(); ++it) out.push_back(MetricGraph::oe_rev(*it));
    return out;
}

std::set<int> cycle_vertices(const MetricGraph& g, const std::vector<int>& c) {
    std::set<int> vs;
    for (int oe : c) vs.insert(g.oe_tail(oe));
    return vs;
}

std::set<int> cycle_edges(const std::vector<int>& c) {
    std::set<int> es;
    for (int oe : c) es.insert(oe >> 1);
    return es;
}

// Simple arcs between two vertex sets, internally disjoint from both.
std::vector<std::vector<int>> connecting_arcs(const MetricGraph& g, const std::set<int>& avoid_edges,
                                              const std::set<int>& from_vs,
                                              const std::set<int>& to_vs) {
    auto adj = g.outgoing();
    std::vector<std::vector<int>> result;
    std::vector<int> path;
    std::vector<bool> used_vertex(g.num_vertices, false);

    std::function<void(int)> dfs = [&](int v) {
        for (int oe : adj[v]) {
            if (avoid_edges.count(oe >> 1)) continue;
            bool used_edge = false;
            for (int x : path)
                if ((x >> 1) == (oe >> 1)) used_edge = true;
            if (used_edge) continue;
            int h = g.oe_head(oe);
            if (to_vs.count(h)) {
                path.push_back(oe);
                result.push_back(path);
                path.pop_back();
                continue;
            }
            if (used_vertex[h] || from_vs.count(h)) continue;
            path.push_back(oe);
            used_vertex[h] = true;
            dfs(h);
            used_vertex[h] = false;
            path.pop_back();
        }
    };
    for (int s : from_vs) dfs(s);
    return result;
}

} // namespace

std::vector<CyclicWord> candidates(const MarkedGraph& mg) {
    const MetricGraph& g = mg.graph;
    auto circles = embedded_circles(g);

    std::vector<std::vector<int>> loops = circles;

    for (size_t i = 0; i < circles.size(); ++i)
        for (size_t j = i + 1; j < circles.size(); ++j) {
            auto ei = cycle_edges(circles[i]), ej = cycle_edges(circles[j]);
            std::vector<int> shared_edges;
            std::set_intersection(ei.begin(), ei.end(), ej.begin(), ej.end(),
                                  std::back_inserter(shared_edges));
            if (!shared_edges.empty()) continue;
            auto vi = cycle_vertices(g, circles[i]), vj = cycle_vertices(g, circles[j]);
            std::vector<int> shared;
            std::set_intersection(vi.begin(), vi.end(), vj.begin(), vj.end(),
                                  std::back_inserter(shared));
            if (shared.size() == 1) {
                // Figure eight at the shared vertex, both relative orientations.
                int v = shared[0];
                auto c1 = rotate_cycle_to(g, circles[i], v);
                auto c2 = rotate_cycle_to(g, circles[j], v);
                std::vector<int> f8 = c1;
                f8.insert(f8.end(), c2.begin(), c2.end());
                loops.push_back(f8);
                std::vector<int> f8r = c1;
                auto c2r = reverse_path(c2);
                f8r.insert(f8r.end(), c2r.begin(), c2r.end());
                loops.push_back(f8r);
            } else if (shared.empty()) {
                // Barbells: internally disjoint arcs between the circles.
                std::set<int> avoid = ei;
                avoid.insert(ej.begin(), ej.end());
                for (const auto& arc : connecting_arcs(g, avoid, vi, vj)) {
                    int u = g.oe_tail(arc.front());
                    int w = g.oe_head(arc.back());
                    auto c1 = rotate_cycle_to(g, circles[i], u);
                    auto c2 = rotate_cycle_to(g, circles[j], w);
                    auto arc_back = reverse_path(arc);
                    for (int orient = 0; orient < 2; ++orient) {
                        std::vector<int> bb = c1;
                        bb.insert(bb.end(), arc.begin(), arc.end());
                        auto mid = (orient == 0) ? c2 : reverse_path(c2);
                        bb.insert(bb.end(), mid.begin(), mid.end());
                        bb.insert(bb.end(), arc_back.begin(), arc_back.end());
                        loops.push_back(bb);
                    }
                }
            }
        }

    std::set<CyclicWord> classes;
    for (const auto& loop : loops) {
        // Defining property re-checked: immersed, each edge crossed <= 2.
        std::map<int, int> crossings;
        for (int oe : loop) crossings[oe >> 1]++;
        for (auto& [e, c] : crossings)
            if (c > 2) fail(ErrorCode::BadInput, "candidate crosses an edge more than twice");
        Word w = mg.read_path(loop);
        CyclicWord cw(w);
        CyclicWord ci = cw.inverse();
        classes.insert(ci < cw ? ci : cw);
    }
    return std::vector<CyclicWord>(classes.begin(), classes.end());
}

Rational injectivity_radius(const MarkedGraph& mg) {
    auto circles = embedded_circles(mg.graph);
    if (circles.empty()) fail(ErrorCode::BadInput, "no essential loop");
    Rational best = -1;
    for (const auto& c : circles) {
        Rational len = mg.path_length(c);
        if (best < 0 || len < best) best = len;
    }
    return best;
}

DistanceResult lipschitz_distance(const MarkedGraph& g, const MarkedGraph& h) {
    if (!(g.basis == h.basis)) fail(ErrorCode::BadInput, "basis mismatch");
    auto cands = candidates(g);
    if (cands.empty()) fail(ErrorCode::BadInput, "no candidates");
    std::optional<Rational> best;
    CyclicWord witness;
    for (const auto& alpha : cands) {
        Rational ratio = loop_length(alpha, h) / loop_length(alpha, g);
        if (!best || ratio > *best) {
            best = ratio;
            witness = alpha;
        }
    }
    return {*best, witness};
}

LogScalar symmetrized_distance(const MarkedGraph& g, const MarkedGraph& h) {
    return LogScalar(lipschitz_distance(g, h).ratio * lipschitz_distance(h, g).ratio);
}

LogScalar hausdorff_distance(const std::vector<MarkedGraph>& a, const std::vector<MarkedGraph>& b) {
    if (a.empty() || b.empty()) fail(ErrorCode::EmptySet, "hausdorff of empty set");
    Rational worst = 1;
    auto one_side = [&](const std::vector<MarkedGraph>& from, const std::vector<MarkedGraph>& to) {
        for (const auto& x : from) {
            std::optional<Rational> nearest;
            for (const auto& y : to) {
                Rational d = symmetrized_distance(x, y).ratio;
                if (!nearest || d < *nearest) nearest = d;
            }
            if (*nearest > worst) worst = *nearest;
        }
    };
    one_side(a, b);
    one_side(b, a);
    return LogScalar(worst);
}

MarkedGraph act(const Automorphism& phi, const MarkedGraph& g) {
    if (!(phi.basis() == g.basis)) fail(ErrorCode::BadInput, "basis mismatch");
    Automorphism inv = phi.inverse();
    std::vector<std::vector<int>> marking;
    for (int j = 0; j < g.basis.rank; ++j) marking.push_back(g.based_loop(inv.image(j)));
    std::vector<Word> comarking;
    for (const auto& w : g.comarking) comarking.push_back(phi.apply(w));
    MarkedGraph out(g.basis, g.graph, g.base_vertex, std::move(marking), std::move(comarking));
    out.vertex_names = g.vertex_names;
    out.edge_names = g.edge_names;
    return out;
}

bool same_cyclic_path(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    for (size_t r = 0; r < a.size(); ++r) {
        bool match = true;
        for (size_t k = 0; match && k < a.size(); ++k)
            if (a[(r + k) % a.size()] != b[k]) match = false;
        if (match) return true;
    }
    return false;
}

namespace {

// Enumerates length-preserving graph isomorphisms by backtracking on the
// edge correspondence.
bool isomorphism_search(const MetricGraph& g, const MetricGraph& h, size_t edge_index,
                        std::vector<int>& edge_map, std::vector<int>& edge_flip,
                        std::vector<int>& vertex_map, std::vector<bool>& used_edge,
                        const std::function<bool()>& accept) {
    if (edge_index == g.edges.size()) {
        std::vector<bool> used_vertex(h.num_vertices, false);
        for (int v = 0; v < g.num_vertices; ++v) {
            if (vertex_map[v] < 0 || used_vertex[vertex_map[v]]) return false;
            used_vertex[vertex_map[v]] = true;
        }
        return accept();
    }
    const auto& e = g.edges[edge_index];
    for (size_t f = 0; f < h.edges.size(); ++f) {
        if (used_edge[f]) continue;
        if (h.edges[f].len != e.len) continue;
        for (int flip = 0; flip < 2; ++flip) {
            int from = flip ? h.edges[f].to : h.edges[f].from;
            int to = flip ? h.edges[f].from : h.edges[f].to;
            int old_from = vertex_map[e.from], old_to = vertex_map[e.to];
            if (old_from >= 0 && old_from != from) continue;
            if (old_to >= 0 && old_to != to) continue;
            vertex_map[e.from] = from;
            vertex_map[e.to] = to;
            used_edge[f] = true;
            edge_map[edge_index] = static_cast<int>(f);
            edge_flip[edge_index] = flip;
            if (isomorphism_search(g, h, edge_index + 1, edge_map, edge_flip, vertex_map,
                                   used_edge, accept))
                return true;
            used_edge[f] = false;
            vertex_map[e.from] = old_from;
            vertex_map[e.to] = old_to;
        }
    }
    return false;
}

} // namespace

MarkedGraph erase_bivalent(const MarkedGraph& input) {
    MarkedGraph g = input;
    while (true) {
        auto adj = g.graph.outgoing();
        int victim = -1;
        for (int v = 0; v < g.graph.num_vertices && victim < 0; ++v)
            if (adj[v].size() == 2 && (adj[v][0] >> 1) != (adj[v][1] >> 1)) victim = v;
        if (victim < 0) return g;

        if (g.base_vertex == victim) {
            // Move the base to a branch vertex, conjugating the marking.
            int w = -1;
            for (int v = 0; v < g.graph.num_vertices; ++v)
                if (v != victim && adj[v].size() >= 3) {
                    w = v;
                    break;
                }
            if (w < 0) fail(ErrorCode::BadInput, "cannot rebase a circle");
            // BFS path from w to the old base.
            std::vector<int> via(g.graph.num_vertices, -1);
            std::deque<int> queue{w};
            std::vector<bool> seen(g.graph.num_vertices, false);
            seen[w] = true;
            while (!queue.empty()) {
                int x = queue.front();
                queue.pop_front();
                for (int oe : adj[x])
                    if (!seen[g.graph.oe_head(oe)]) {
                        seen[g.graph.oe_head(oe)] = true;
                        via[g.graph.oe_head(oe)] = oe;
                        queue.push_back(g.graph.oe_head(oe));
                    }
            }
            std::vector<int> p;
            for (int x = g.base_vertex; x != w; x = g.graph.oe_tail(via[x])) p.push_back(via[x]);
            std::reverse(p.begin(), p.end());
            for (auto& mp : g.marking) {
                std::vector<int> conj = p;
                conj.insert(conj.end(), mp.begin(), mp.end());
                for (auto it = p.rbegin(); it != p.rend(); ++it)
                    conj.push_back(MetricGraph::oe_rev(*it));
                mp = tighten_path(g.graph, conj);
            }
            g.base_vertex = w;
            continue;
        }

        int d1 = adj[victim][0], d2 = adj[victim][1];
        // Merged edge runs head(d1) -> victim -> head(d2).
        int e1 = d1 >> 1, e2 = d2 >> 1;
        MetricGraph ng;
        std::vector<int> vmap(g.graph.num_vertices, -1);
        for (int v = 0; v < g.graph.num_vertices; ++v)
            if (v != victim) vmap[v] = ng.num_vertices++;
        std::vector<int> emap(g.graph.edges.size(), -1);
        std::vector<Word> comarking;
        std::vector<std::string> edge_names;
        for (size_t e = 0; e < g.graph.edges.size(); ++e) {
            if (static_cast<int>(e) == e1 || static_cast<int>(e) == e2) continue;
            emap[e] = static_cast<int>(ng.edges.size());
            ng.edges.push_back({vmap[g.graph.edges[e].from], vmap[g.graph.edges[e].to],
                                g.graph.edges[e].len});
            comarking.push_back(g.comarking[e]);
            edge_names.push_back(g.edge_names[e]);
        }
        int merged = static_cast<int>(ng.edges.size());
        ng.edges.push_back({vmap[g.graph.oe_head(d1)], vmap[g.graph.oe_head(d2)],
                            g.graph.oe_len(d1) + g.graph.oe_len(d2)});
        Word w1 = g.comarking[e1];
        if (!(d1 & 1)) w1 = w1.inverse(); // rev(d1) traversal
        Word w2 = g.comarking[e2];
        if (d2 & 1) w2 = w2.inverse();
        comarking.push_back(concat(w1, w2));
        edge_names.push_back(g.edge_names[e1] + "+" + g.edge_names[e2]);

        auto map_path = [&](const std::vector<int>& path) {
            std::vector<int> out;
            for (size_t i = 0; i < path.size(); ++i) {
                int oe = path[i];
                int e = oe >> 1;
                if (emap[e] >= 0) {
                    out.push_back(2 * emap[e] + (oe & 1));
                    continue;
                }
                // Crossing the erased vertex uses both halves; emit the
                // merged edge on the first half only.
                if (oe == MetricGraph::oe_rev(d1))
                    out.push_back(2 * merged);
                else if (oe == MetricGraph::oe_rev(d2))
                    out.push_back(2 * merged + 1);
                // d1/d2 themselves are the second halves: skip.
            }
            return tighten_path(ng, out);
        };
        std::vector<std::vector<int>> marking;
        for (const auto& mp : g.marking) marking.push_back(map_path(mp));
        auto names = g.vertex_names;
        names.erase(names.begin() + victim);
        MarkedGraph next(g.basis, std::move(ng), vmap[g.base_vertex], std::move(marking),
                         std::move(comarking));
        next.vertex_names = std::move(names);
        next.edge_names = std::move(edge_names);
        g = std::move(next);
    }
}

bool is_marked_isometric(const MarkedGraph& g_in, const MarkedGraph& h_in) {
    if (!(g_in.basis == h_in.basis)) return false;
    MarkedGraph g = erase_bivalent(g_in);
    MarkedGraph h = erase_bivalent(h_in);
    if (g.graph.num_vertices != h.graph.num_vertices ||
        g.graph.edges.size() != h.graph.edges.size())
        return false;
    std::vector<int> edge_map(g.graph.edges.size(), -1), edge_flip(g.graph.edges.size(), 0);
    std::vector<int> vertex_map(g.graph.num_vertices, -1);
    std::vector<bool> used_edge(h.graph.edges.size(), false);

    auto accept = [&]() {
        // Marking comparison: the induced basis map must be inner.
        std::vector<Word> images;
        for (int j = 0; j < g.basis.rank; ++j) {
            std::vector<int> mapped;
            for (int oe : g.marking[j]) {
                int e = oe >> 1;
                int image_oe = 2 * edge_map[e] + ((oe & 1) ^ edge_flip[e]);
                mapped.push_back(image_oe);
            }
            Word w = h.read_path(tighten_path(h.graph, mapped));
            if (cyclic_reduce(w).empty()) return false;
            images.push_back(w);
        }
        try {
            Automorphism psi(g.basis, images);
            return out_equal(psi, Automorphism::identity(g.basis)).equal;
        } catch (const Error&) {
            return false;
        }
    };
    return isomorphism_search(g.graph, h.graph, 0, edge_map, edge_flip, vertex_map, used_edge,
                              accept);
}

} // namespace ogt
