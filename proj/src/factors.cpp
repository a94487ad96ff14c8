#include "ogt/factors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace ogt {

FactorClass stallings_core(const Basis& basis, const std::vector<Word>& generators) {
    FactorClass out;
    out.generators = generators;
    out.core = cyclic_core(stallings_graph(basis, generators));
    if (out.core.edges.empty()) fail(ErrorCode::TrivialSubgroup, "trivial subgroup");
    return out;
}

bool conjugate_into(const FactorClass& a, const FactorClass& b) {
    return morphism_exists(a.core, b.core);
}

bool same_factor_class(const FactorClass& a, const FactorClass& b) {
    return conjugate_into(a, b) && conjugate_into(b, a);
}

CoverCore cover_core(const FactorClass& a, const MarkedGraph& g) {
    const int E = static_cast<int>(g.graph.edges.size());
    // Fold the wedge of generator loops in the oriented-edge alphabet; the
    // folded graph immerses into g and is the core of the A-cover.
    Basis edge_alphabet(std::max(2, E));
    std::vector<Word> loops;
    for (const Word& w : a.generators) {
        std::vector<Letter> letters;
        for (int oe : g.based_loop(w))
            letters.push_back((oe & 1) ? -((oe >> 1) + 1) : (oe >> 1) + 1);
        if (letters.empty()) continue;
        loops.push_back(Word(letters));
    }
    if (loops.empty()) fail(ErrorCode::TrivialSubgroup, "trivial subgroup in cover");
    LabeledGraph folded = cyclic_core(stallings_graph(edge_alphabet, loops));
    CoverCore out;
    out.graph.num_vertices = folded.num_vertices;
    for (const auto& e : folded.edges) {
        int ge = e.label - 1;
        out.graph.edges.push_back({e.from, e.to, g.graph.edges[ge].len});
        out.to_graph_edge.push_back(ge);
    }
    return out;
}

std::vector<FactorClass> project_factors(const MarkedGraph& g, int subgraph_budget) {
    const int E = static_cast<int>(g.graph.edges.size());
    if ((1LL << E) > subgraph_budget)
        fail(ErrorCode::BudgetExceeded, "too many edge subsets in project_factors");

    std::vector<FactorClass> out;
    for (unsigned mask = 1; mask + 1 < (1u << E); ++mask) {
        // Connected?
        std::vector<int> edges;
        for (int e = 0; e < E; ++e)
            if (mask & (1u << e)) edges.push_back(e);
        std::set<int> verts;
        for (int e : edges) {
            verts.insert(g.graph.edges[e].from);
            verts.insert(g.graph.edges[e].to);
        }
        // BFS over selected edges only.
        std::set<int> seen{*verts.begin()};
        std::deque<int> queue{*verts.begin()};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int e : edges) {
                for (int w : {g.graph.edges[e].from, g.graph.edges[e].to}) {
                    if ((g.graph.edges[e].from == v || g.graph.edges[e].to == v) &&
                        !seen.count(w)) {
                        seen.insert(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        if (seen.size() != verts.size()) continue;
        int rank = static_cast<int>(edges.size()) - static_cast<int>(verts.size()) + 1;
        if (rank < 1) continue; // contractible

        // Generators: non-tree edges read through the comarking.
        std::map<int, int> parent; // vertex -> oriented edge toward root
        int root = *verts.begin();
        std::set<int> in_tree;
        std::deque<int> q2{root};
        std::set<int> seen2{root};
        while (!q2.empty()) {
            int v = q2.front();
            q2.pop_front();
            for (int e : edges) {
                for (int oe : {2 * e, 2 * e + 1}) {
                    if (g.graph.oe_tail(oe) != v) continue;
                    int h = g.graph.oe_head(oe);
                    if (seen2.count(h)) continue;
                    seen2.insert(h);
                    parent[h] = oe;
                    in_tree.insert(e);
                    q2.push_back(h);
                }
            }
        }
        auto path_to_root_word = [&](int v) {
            Word w;
            while (v != root) {
                int oe = parent.at(v);
                Word step = g.comarking[oe >> 1];
                if (oe & 1) step = step.inverse();
                w = concat(step.inverse(), w);
                v = g.graph.oe_tail(oe);
            }
            return w; // word of the path v -> root
        };
        std::vector<Word> gens;
        for (int e : edges) {
            if (in_tree.count(e)) continue;
            Word down = path_to_root_word(g.graph.edges[e].from).inverse(); // root -> tail
            Word mid = g.comarking[e];
            Word up = path_to_root_word(g.graph.edges[e].to); // head -> root
            Word loop = concat(concat(down, mid), up);
            if (!cyclic_reduce(loop).empty()) gens.push_back(loop);
        }
        if (gens.empty()) continue;
        FactorClass fc = stallings_core(g.basis, gens);
        if (fc.rank() >= g.basis.rank) continue; // not proper
        bool dup = false;
        for (const auto& other : out)
            if (same_factor_class(fc, other)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(fc));
    }
    return out;
}

FactorClass apply_automorphism(const Automorphism& phi, const FactorClass& a) {
    std::vector<Word> gens;
    for (const Word& w : a.generators) gens.push_back(phi.apply(w));
    return stallings_core(phi.basis(), gens);
}

bool same_factor_set(const std::vector<FactorClass>& a, const std::vector<FactorClass>& b) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        bool found = false;
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            if (same_factor_class(x, b[j])) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

CoverStructure cover_with_gates(const FactorClass& a, const FoldEvent& event) {
    CoverStructure cs;
    cs.core = cover_core(a, *event.graph);
    const MetricGraph& cg = cs.core.graph;
    const MetricGraph& gg = event.graph->graph;
    cs.gates.gates.resize(cg.num_vertices);
    auto adj = cg.outgoing();
    for (int v = 0; v < cg.num_vertices; ++v) {
        // Group cover directions by the gate of their image directions.
        std::map<std::pair<int, int>, std::vector<int>> by_gate;
        for (int oe : adj[v]) {
            int ge = cs.core.to_graph_edge[oe >> 1];
            int goe = 2 * ge + (oe & 1);
            int gv = gg.oe_tail(goe);
            int gate = event.structure.gate_of(gv, goe);
            if (gate < 0) fail(ErrorCode::BadInput, "cover direction missing from gates");
            by_gate[{gv, gate}].push_back(oe);
        }
        for (auto& [key, dirs] : by_gate) {
            std::sort(dirs.begin(), dirs.end());
            cs.gates.gates[v].push_back(dirs);
        }
    }
    return cs;
}

namespace {

// Legal-step digraph: arc oe -> of when the turn {rev(oe), of} is legal.
std::vector<std::vector<int>> legal_arcs(const CoverStructure& cs) {
    const MetricGraph& g = cs.core.graph;
    auto adj = g.outgoing();
    std::vector<std::vector<int>> arcs(2 * g.edges.size());
    for (size_t e2 = 0; e2 < 2 * g.edges.size(); ++e2) {
        int oe = static_cast<int>(e2);
        int v = g.oe_head(oe);
        for (int of : adj[v]) {
            if (of == MetricGraph::oe_rev(oe)) continue;
            if (!cs.gates.illegal_turn(MetricGraph::oe_rev(oe), of)) arcs[oe].push_back(of);
        }
    }
    return arcs;
}

} // namespace

SegmentSearch longest_legal_segment(const CoverStructure& cs) {
    const MetricGraph& g = cs.core.graph;
    auto arcs = legal_arcs(cs);
    const int n = static_cast<int>(2 * g.edges.size());

    // Cycle detection + DAG longest path by edge length.
    std::vector<int> state(n, 0); // 0 unvisited, 1 on stack, 2 done
    std::vector<Rational> best(n, Rational(0));
    bool cyc = false;
    std::function<void(int)> dfs = [&](int oe) {
        state[oe] = 1;
        Rational tail = 0;
        for (int of : arcs[oe]) {
            if (state[of] == 1) {
                cyc = true;
                continue;
            }
            if (state[of] == 0) dfs(of);
            tail = std::max(tail, best[of]);
        }
        best[oe] = g.oe_len(oe) + tail;
        state[oe] = 2;
    };
    SegmentSearch out;
    for (int oe = 0; oe < n; ++oe)
        if (state[oe] == 0) dfs(oe);
    if (cyc) {
        out.unbounded = true;
        return out;
    }
    out.longest = *std::max_element(best.begin(), best.end());
    return out;
}

SegmentSearch longest_illegal_segment(const CoverStructure& cs, int state_budget) {
    const MetricGraph& g = cs.core.graph;
    auto adj = g.outgoing();
    const Rational limit = 3;

    // States: (oriented edge, trailing legal run length < 3).  A revisit on
    // the stack is a cycle all of whose legal runs stay short, so segments
    // of any length exist.
    using State = std::pair<int, Rational>;
    std::map<State, int> status; // 1 on stack, 2 done
    std::map<State, Rational> best;
    bool cyc = false;
    int states = 0;

    std::function<Rational(const State&)> dfs = [&](const State& s) -> Rational {
        auto it = best.find(s);
        if (it != best.end() && status[s] == 2) return it->second;
        if (++states > state_budget)
            fail(ErrorCode::BudgetExceeded, "illegal segment search exceeded state budget");
        status[s] = 1;
        auto [oe, run] = s;
        Rational tail = 0;
        for (int of : adj[g.oe_head(oe)]) {
            if (of == MetricGraph::oe_rev(oe)) continue;
            bool illegal = cs.gates.illegal_turn(MetricGraph::oe_rev(oe), of);
            Rational next_run = illegal ? g.oe_len(of) : run + g.oe_len(of);
            if (next_run >= limit) continue; // would contain a legal length-3 piece
            State ns{of, next_run};
            auto st = status.find(ns);
            if (st != status.end() && st->second == 1) {
                cyc = true;
                continue;
            }
            tail = std::max(tail, dfs(ns));
        }
        best[s] = g.oe_len(oe) + tail;
        status[s] = 2;
        return best[s];
    };

    SegmentSearch out;
    Rational overall = 0;
    for (size_t e2 = 0; e2 < 2 * g.edges.size(); ++e2) {
        int oe = static_cast<int>(e2);
        if (g.oe_len(oe) >= limit) continue; // the single edge is already legal length 3
        overall = std::max(overall, dfs({oe, g.oe_len(oe)}));
        if (cyc) {
            out.unbounded = true;
            return out;
        }
    }
    out.longest = overall;
    return out;
}

Rational illegal_segment_threshold(int rank) {
    int mb = max_illegality_bound(rank);
    return Rational((18 * mb * (3 * rank - 3) + 6) * (2 * rank - 1));
}

ProjectionWindow left_right_projection(const FactorClass& a, const FoldingPath& path) {
    if (path.events.empty()) fail(ErrorCode::BadInput, "empty folding path");
    const int rank = path.target->basis.rank;
    const Rational threshold = illegal_segment_threshold(rank);
    const int n = static_cast<int>(path.events.size());

    ProjectionWindow win;
    int left = -1, right = -1;
    for (int i = 0; i < n; ++i) {
        CoverStructure cs = cover_with_gates(a, path.events[i]);
        SegmentSearch legal = longest_legal_segment(cs);
        if (left < 0 && (legal.unbounded || legal.longest >= 3)) left = i;
        SegmentSearch illegal = longest_illegal_segment(cs);
        if (illegal.unbounded || illegal.longest >= threshold) right = i;
    }
    if (left < 0) {
        win.left_event = n - 1;
        win.left_clamped = true;
    } else {
        win.left_event = left;
    }
    if (right < 0) {
        win.right_event = 0;
        win.right_clamped = true;
    } else {
        win.right_event = right;
    }
    return win;
}

FactorProjection project_to_path(const MarkedGraph& h, const FoldingPath& path) {
    auto factors = project_factors(h);
    if (factors.empty()) fail(ErrorCode::RankTooSmall, "no proper factors");
    FactorProjection out;
    int best = -1;
    for (const auto& a : factors) {
        ProjectionWindow w = left_right_projection(a, path);
        if (best < 0 || w.left_event < best) best = w.left_event;
        out.windows.push_back(w);
    }
    out.event = best;
    return out;
}

} // namespace ogt
