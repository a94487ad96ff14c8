#include "ogt/stallings.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace ogt {

std::vector<std::vector<int>> LabeledGraph::outgoing() const {
    std::vector<std::vector<int>> out(num_vertices);
    for (size_t e = 0; e < edges.size(); ++e) {
        out[edges[e].from].push_back(static_cast<int>(2 * e));
        out[edges[e].to].push_back(static_cast<int>(2 * e + 1));
    }
    return out;
}

namespace {

// Mutable folding workspace.  Contents (words in an auxiliary basis) are
// carried along edges when `track_contents` is set; gauge moves keep the
// loop-content invariant while edges are identified.
struct FoldWorkspace {
    struct WEdge {
        int from, to;
        Letter label; // positive
        Word content;
        bool alive = true;
    };
    std::vector<WEdge> edges;
    int num_vertices = 0;
    std::vector<bool> vertex_alive;
    bool track_contents = false;
    bool injectivity_violated = false;

    int oe_tail(int oe) const { return (oe & 1) ? edges[oe >> 1].to : edges[oe >> 1].from; }
    int oe_head(int oe) const { return (oe & 1) ? edges[oe >> 1].from : edges[oe >> 1].to; }
    Letter oe_label(int oe) const { return (oe & 1) ? -edges[oe >> 1].label : edges[oe >> 1].label; }
    Word oe_content(int oe) const {
        return (oe & 1) ? edges[oe >> 1].content.inverse() : edges[oe >> 1].content;
    }

    int add_vertex() {
        vertex_alive.push_back(true);
        return num_vertices++;
    }

    void add_edge(int from, int to, Letter signed_label, Word content) {
        if (signed_label < 0) {
            std::swap(from, to);
            signed_label = -signed_label;
            content = content.inverse();
        }
        edges.push_back(WEdge{from, to, signed_label, std::move(content), true});
    }

    std::vector<int> live_oriented_at(int v) const {
        std::vector<int> out;
        for (size_t e = 0; e < edges.size(); ++e) {
            if (!edges[e].alive) continue;
            if (edges[e].from == v) out.push_back(static_cast<int>(2 * e));
            if (edges[e].to == v) out.push_back(static_cast<int>(2 * e + 1));
        }
        return out;
    }

    // Multiplies every germ at w on the appropriate side so loop contents
    // are unchanged while the content of edges into w shifts by g.
    void gauge(int w, const Word& g) {
        if (!track_contents) return;
        Word ginv = g.inverse();
        for (auto& e : edges) {
            if (!e.alive) continue;
            bool at_head = (e.to == w), at_tail = (e.from == w);
            if (at_head && at_tail) e.content = concat(concat(ginv, e.content), g);
            else if (at_head) e.content = concat(e.content, g);
            else if (at_tail) e.content = concat(ginv, e.content);
        }
    }

    void merge_vertices(int keep, int drop) {
        if (keep == drop) return;
        for (auto& e : edges) {
            if (!e.alive) continue;
            if (e.from == drop) e.from = keep;
            if (e.to == drop) e.to = keep;
        }
        vertex_alive[drop] = false;
    }

    // Folds until no vertex has two identically labeled outgoing germs.
    void fold_all() {
        std::deque<int> dirty;
        for (int v = 0; v < num_vertices; ++v)
            if (vertex_alive[v]) dirty.push_back(v);
        while (!dirty.empty()) {
            int v = dirty.front();
            dirty.pop_front();
            if (!vertex_alive[v]) continue;
            bool folded = true;
            while (folded) {
                folded = false;
                auto germs = live_oriented_at(v);
                std::map<Letter, int> seen;
                for (int oe : germs) {
                    Letter l = oe_label(oe);
                    auto it = seen.find(l);
                    if (it == seen.end()) {
                        seen[l] = oe;
                        continue;
                    }
                    int survivor = fold_pair(it->second, oe);
                    folded = true;
                    dirty.push_back(v);
                    dirty.push_back(survivor);
                    break;
                }
            }
        }
    }

    // Identifies two identically labeled germs at a common tail; returns the
    // surviving head vertex.
    int fold_pair(int oe1, int oe2) {
        int h1 = oe_head(oe1), h2 = oe_head(oe2);
        int v = oe_tail(oe1);
        if (track_contents) {
            if (h1 == h2) {
                // Parallel pair: loop oe1*oe2^{-1} has trivial label word, so
                // unequal contents witness a non-injective basis map.
                if (oe_content(oe1) != oe_content(oe2)) injectivity_violated = true;
            } else if (h2 != v) {
                gauge(h2, concat(oe_content(oe2).inverse(), oe_content(oe1)));
            } else {
                gauge(h1, concat(oe_content(oe1).inverse(), oe_content(oe2)));
                std::swap(oe1, oe2);
                std::swap(h1, h2);
            }
        }
        // Keep oe1's edge, retire oe2's, merge endpoints.
        edges[oe2 >> 1].alive = false;
        merge_vertices(h1, h2);
        return h1;
    }

    // Deletes valence-1 vertices; `protect` (or -1) is kept.
    void prune_spurs(int protect) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int v = 0; v < num_vertices; ++v) {
                if (!vertex_alive[v] || v == protect) continue;
                auto germs = live_oriented_at(v);
                if (germs.size() == 1) {
                    edges[germs[0] >> 1].alive = false;
                    vertex_alive[v] = false;
                    changed = true;
                } else if (germs.empty()) {
                    vertex_alive[v] = false;
                    changed = true;
                }
            }
        }
    }

    LabeledGraph extract() const {
        LabeledGraph g;
        std::vector<int> vmap(num_vertices, -1);
        for (int v = 0; v < num_vertices; ++v)
            if (vertex_alive[v]) {
                vmap[v] = g.num_vertices++;
            }
        for (const auto& e : edges)
            if (e.alive) g.edges.push_back({vmap[e.from], vmap[e.to], e.label});
        return g;
    }
};

FoldWorkspace build_wedge(const Basis& basis, const std::vector<Word>& generators,
                          bool track_contents) {
    FoldWorkspace ws;
    ws.track_contents = track_contents;
    int base = ws.add_vertex();
    bool any = false;
    for (size_t i = 0; i < generators.size(); ++i) {
        const Word w = reduce(generators[i].letters);
        if (w.empty()) {
            if (track_contents)
                fail(ErrorCode::NotAnAutomorphism, "image of a generator is trivial");
            continue;
        }
        any = true;
        int prev = base;
        for (int k = 0; k < w.length(); ++k) {
            int next = (k + 1 == w.length()) ? base : ws.add_vertex();
            Word content;
            if (track_contents && k + 1 == w.length())
                content = Word({static_cast<Letter>(i + 1)});
            ws.add_edge(prev, next, w.letters[k], std::move(content));
            prev = next;
        }
    }
    if (!any) fail(ErrorCode::TrivialSubgroup, "all generators are trivial");
    (void)basis;
    return ws;
}

} // namespace

LabeledGraph stallings_graph(const Basis& basis, const std::vector<Word>& generators) {
    FoldWorkspace ws = build_wedge(basis, generators, false);
    ws.fold_all();
    ws.prune_spurs(0);
    return ws.extract(); // basepoint survives as vertex 0
}

LabeledGraph cyclic_core(const LabeledGraph& g) {
    std::vector<bool> vertex_alive(g.num_vertices, true);
    std::vector<bool> edge_alive(g.edges.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> valence(g.num_vertices, 0);
        for (size_t e = 0; e < g.edges.size(); ++e) {
            if (!edge_alive[e]) continue;
            valence[g.edges[e].from]++;
            valence[g.edges[e].to]++;
        }
        for (int v = 0; v < g.num_vertices; ++v) {
            if (!vertex_alive[v]) continue;
            if (valence[v] <= 1) {
                vertex_alive[v] = false;
                for (size_t e = 0; e < g.edges.size(); ++e)
                    if (edge_alive[e] && (g.edges[e].from == v || g.edges[e].to == v))
                        edge_alive[e] = false;
                changed = true;
            }
        }
    }
    LabeledGraph out;
    std::vector<int> vmap(g.num_vertices, -1);
    for (int v = 0; v < g.num_vertices; ++v)
        if (vertex_alive[v]) vmap[v] = out.num_vertices++;
    for (size_t e = 0; e < g.edges.size(); ++e)
        if (edge_alive[e])
            out.edges.push_back({vmap[g.edges[e].from], vmap[g.edges[e].to], g.edges[e].label});
    return out;
}

bool traces_loop(const LabeledGraph& g, const Word& w) {
    if (g.num_vertices == 0) return w.empty();
    auto adj = g.outgoing();
    int at = 0;
    for (Letter l : w.letters) {
        int next = -1;
        for (int oe : adj[at])
            if (g.oe_label(oe) == l) {
                next = g.oe_head(oe);
                break;
            }
        if (next < 0) return false;
        at = next;
    }
    return at == 0;
}

bool morphism_exists(const LabeledGraph& src, const LabeledGraph& dst) {
    if (src.num_vertices == 0) return true;
    if (dst.num_vertices == 0) return false;
    auto src_adj = src.outgoing();
    auto dst_adj = dst.outgoing();
    for (int root_image = 0; root_image < dst.num_vertices; ++root_image) {
        std::vector<int> image(src.num_vertices, -1);
        image[0] = root_image;
        std::deque<int> queue{0};
        bool ok = true;
        while (ok && !queue.empty()) {
            int a = queue.front();
            queue.pop_front();
            for (int oe : src_adj[a]) {
                Letter l = src.oe_label(oe);
                int b = image[a];
                int target = -1;
                for (int de : dst_adj[b])
                    if (dst.oe_label(de) == l) {
                        target = dst.oe_head(de);
                        break;
                    }
                if (target < 0) {
                    ok = false;
                    break;
                }
                int a2 = src.oe_head(oe);
                if (image[a2] < 0) {
                    image[a2] = target;
                    queue.push_back(a2);
                } else if (image[a2] != target) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return true;
    }
    return false;
}

std::string canonical_signature(const LabeledGraph& g) {
    if (g.num_vertices == 0) return "()";
    auto adj = g.outgoing();
    int max_label = 0;
    for (const auto& e : g.edges) max_label = std::max(max_label, static_cast<int>(e.label));

    std::string best;
    for (int root = 0; root < g.num_vertices; ++root) {
        std::vector<int> number(g.num_vertices, -1);
        std::vector<int> order;
        number[root] = 0;
        order.push_back(root);
        std::ostringstream sig;
        for (size_t qi = 0; qi < order.size(); ++qi) {
            int v = order[qi];
            sig << "|";
            for (Letter l = -max_label; l <= max_label; ++l) {
                if (l == 0) continue;
                int head = -1;
                for (int oe : adj[v])
                    if (g.oe_label(oe) == l) {
                        head = g.oe_head(oe);
                        break;
                    }
                if (head < 0) continue;
                if (number[head] < 0) {
                    number[head] = static_cast<int>(order.size());
                    order.push_back(head);
                }
                sig << l << ":" << number[head] << ",";
            }
        }
        if (static_cast<int>(order.size()) != g.num_vertices) sig << "#disconnected";
        std::string s = sig.str();
        if (best.empty() || s < best) best = s;
    }
    return best;
}

std::uint64_t canonical_hash(const LabeledGraph& g) {
    std::string s = canonical_signature(g);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<Word> invert_basis_map(const Basis& basis, const std::vector<Word>& images) {
    if (static_cast<int>(images.size()) != basis.rank)
        fail(ErrorCode::BadInput, "need one image per generator");
    FoldWorkspace ws = build_wedge(basis, images, true);
    ws.fold_all();
    if (ws.injectivity_violated)
        fail(ErrorCode::NotAnAutomorphism, "images do not generate freely");
    ws.prune_spurs(0);

    // A genuine basis folds to the one-vertex rose with each letter once.
    int live_vertices = 0;
    for (int v = 0; v < ws.num_vertices; ++v)
        if (ws.vertex_alive[v]) live_vertices++;
    std::vector<Word> result(basis.rank);
    std::vector<bool> found(basis.rank, false);
    int live_edges = 0;
    for (const auto& e : ws.edges) {
        if (!e.alive) continue;
        live_edges++;
        if (e.label >= 1 && e.label <= basis.rank && !found[e.label - 1]) {
            found[e.label - 1] = true;
            result[e.label - 1] = e.content;
        }
    }
    bool is_rose = (live_vertices == 1) && (live_edges == basis.rank) &&
                   std::all_of(found.begin(), found.end(), [](bool b) { return b; });
    if (!is_rose)
        fail(ErrorCode::NotAnAutomorphism, "images generate a proper subgroup");
    return result;
}

} // namespace ogt
