#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "ogt/factors.hpp"

using namespace ogt;
using namespace ogt::testfix;

namespace {

FactorClass fc2(const std::vector<std::string>& gens) {
    Basis b(2);
    std::vector<Word> words;
    for (auto& s : gens) words.push_back(parse_word(b, s));
    return stallings_core(b, words);
}

} // namespace

TEST_CASE("stallings cores") {
    Basis b(2);
    auto a = fc2({"a"});
    CHECK(a.core.num_vertices == 1);
    CHECK(a.core.edges.size() == 1);
    CHECK(a.rank() == 1);

    // Conjugate generator: same core as the plain one.
    CHECK(same_factor_class(fc2({"abA"}), fc2({"b"})));

    auto idx2 = fc2({"aa", "ab"});
    CHECK(idx2.rank() == 2);
    CHECK(idx2.core.edges.size() - idx2.core.num_vertices + 1 == 2);

    CHECK_THROWS_AS(fc2({"aA"}), Error);
}

TEST_CASE("conjugate_into") {
    CHECK(conjugate_into(fc2({"abA"}), fc2({"b"})));
    CHECK_FALSE(conjugate_into(fc2({"a"}), fc2({"b"})));
    CHECK(conjugate_into(fc2({"aa"}), fc2({"a"})));
    CHECK_FALSE(conjugate_into(fc2({"a"}), fc2({"aa"})));
}

TEST_CASE("conjugate_into agrees with brute force") {
    Basis b(2);
    std::mt19937 rng(71);
    int checked = 0;
    for (int i = 0; i < 120; ++i) {
        // Mix of planted containments and unrelated pairs.
        std::vector<Word> bg;
        int nb = 1 + static_cast<int>(rng() % 2);
        for (int k = 0; k < nb; ++k) {
            Word w = random_word(rng, b, 4);
            if (!cyclic_reduce(w).empty()) bg.push_back(w);
        }
        if (bg.empty()) continue;
        std::vector<Word> ag;
        if (rng() % 2) {
            // Plant: conjugates of products of B generators.
            Word u = random_word(rng, b, 2);
            Word prod = bg[rng() % bg.size()];
            if (rng() % 2 && bg.size() > 1) prod = concat(prod, bg[rng() % bg.size()]);
            ag.push_back(conjugate(prod, u));
        } else {
            Word w = random_word(rng, b, 4);
            if (cyclic_reduce(w).empty()) continue;
            ag.push_back(w);
        }
        FactorClass A = stallings_core(b, ag), B = stallings_core(b, bg);
        CHECK(conjugate_into(A, B) == brute_force_conjugate_into(b, ag, bg, 6));
        ++checked;
    }
    CHECK(checked >= 80);
}

TEST_CASE("cover cores") {
    Basis b(2);
    auto rose = MarkedGraph::rose(b, {{1, 2}, {1, 2}});

    auto ca = cover_core(fc2({"a"}), rose);
    CHECK(ca.graph.num_vertices == 1);
    CHECK(ca.graph.edges.size() == 1);
    CHECK(ca.total_length() == Rational(1, 2));

    // Improper factor: the cover is the graph itself.
    auto cf = cover_core(fc2({"a", "b"}), rose);
    CHECK(cf.graph.edges.size() == 2);
    CHECK(cf.total_length() == Rational(1));

    auto cab = cover_core(fc2({"ab"}), rose);
    CHECK(cab.rank() == 1);
    CHECK(cab.total_length() == Rational(1));

    // rank(A|G) = rank(A) on random subgroups.
    std::mt19937 rng(5);
    for (int i = 0; i < 20; ++i) {
        std::vector<Word> gens;
        for (int k = 0; k < 2; ++k) {
            Word w = random_word(rng, b, 5);
            if (!cyclic_reduce(w).empty()) gens.push_back(w);
        }
        if (gens.empty()) continue;
        auto A = stallings_core(b, gens);
        auto g = random_marked_graph(rng, b);
        CHECK(cover_core(A, g).rank() == A.rank());
    }
}

TEST_CASE("project_factors on the rose and theta") {
    Basis b(2);
    auto rose = MarkedGraph::rose(b, {{1, 2}, {1, 2}});
    auto pf = project_factors(rose);
    REQUIRE(pf.size() == 2);
    CHECK(same_factor_set(pf, {fc2({"a"}), fc2({"b"})}));

    auto theta = MarkedGraph::theta();
    auto pt = project_factors(theta);
    REQUIRE(pt.size() == 3);
    CHECK(same_factor_set(pt, {fc2({"a"}), fc2({"b"}), fc2({"ab"})}));
    for (const auto& f : pt) {
        CHECK(f.rank() >= 1);
        CHECK(f.rank() < 2);
    }
}

TEST_CASE("projection is equivariant") {
    std::mt19937 rng(13);
    Basis b(2);
    for (int i = 0; i < 12; ++i) {
        auto g = random_marked_graph(rng, b);
        auto phi = random_automorphism(rng, b, 4);
        auto lhs = project_factors(act(phi, g));
        std::vector<FactorClass> rhs;
        for (const auto& f : project_factors(g)) rhs.push_back(apply_automorphism(phi, f));
        CHECK(same_factor_set(lhs, rhs));
    }
}

TEST_CASE("cover core of a projected factor embeds") {
    std::mt19937 rng(17);
    Basis b(2);
    for (int i = 0; i < 8; ++i) {
        auto g = random_marked_graph(rng, b);
        for (const auto& f : project_factors(g)) {
            auto cc = cover_core(f, g);
            // The defining subgraph embeds: the cover core crosses no graph
            // edge more than... it maps injectively, so counts are <= 1.
            std::map<int, int> count;
            for (int ge : cc.to_graph_edge) count[ge]++;
            for (auto& [ge, n] : count) CHECK(n == 1);
        }
    }
}

TEST_CASE("left and right projections to a folding path") {
    Basis b(2);
    auto g = std::make_shared<MarkedGraph>(MarkedGraph::rose(b, {{1, 2}, {1, 2}}));
    auto h = std::make_shared<MarkedGraph>(
        act(Automorphism(b, {parse_word(b, "ab"), parse_word(b, "b")}), *g));
    auto sg = standard_geodesic(g, h);
    const auto& path = sg.fold;
    REQUIRE(path.size() >= 2);

    CHECK(illegal_segment_threshold(2) == Rational(504));

    // Factors of the start graph: scanning windows are well-defined and
    // clamping is flagged coherently.
    for (const auto& f : project_factors(*g)) {
        auto w = left_right_projection(f, path);
        CHECK(w.left_event >= 0);
        CHECK(w.right_event >= 0);
        CHECK(w.left_event < static_cast<int>(path.size()));
        CHECK(w.right_event < static_cast<int>(path.size()));
        // No graph here carries an illegal segment of length 504.
        CHECK(w.right_clamped);
    }

    // Window containment at event granularity for candidates supported on a
    // proper subgraph (their cyclic cover immerses into the factor's cover;
    // figure-eight candidates of a rose cross every edge and escape the
    // factor set, so they are excluded).
    auto theta = MarkedGraph::theta();
    auto hp = project_to_path(theta, path);
    int left_h = static_cast<int>(path.size()), right_h = -1;
    for (const auto& w : hp.windows) {
        left_h = std::min(left_h, w.left_event);
        right_h = std::max(right_h, w.right_event);
    }
    for (const auto& alpha : candidates(theta)) {
        auto loop = theta.class_loop(alpha.rep);
        std::set<int> crossed;
        for (int oe : loop) crossed.insert(oe >> 1);
        if (crossed.size() == theta.graph.edges.size()) continue;
        FactorClass fa = stallings_core(b, {alpha.rep});
        auto w = left_right_projection(fa, path);
        CHECK(w.left_event >= left_h);
        CHECK(w.right_event <= right_h);
    }
    CHECK(hp.event == left_h);
}

TEST_CASE("legal segment search matches loop profiles on circles") {
    Basis b(2);
    auto g = std::make_shared<MarkedGraph>(MarkedGraph::rose(b, {{1, 2}, {1, 2}}));
    auto h = std::make_shared<MarkedGraph>(
        act(Automorphism(b, {parse_word(b, "ab"), parse_word(b, "b")}), *g));
    auto sg = standard_geodesic(g, h);
    CyclicWord alpha(parse_word(b, "ab"));
    FactorClass fa = stallings_core(b, {alpha.rep});
    for (size_t i = 0; i < sg.fold.size(); ++i) {
        auto cs = cover_with_gates(fa, sg.fold.at(i));
        auto rec = loop_profile_at(alpha, sg.fold.at(i), 2);
        // The circle cover has an illegal turn iff the loop profile says so.
        CHECK((cs.gates.illegality() > 0) == (rec.illegal_turns > 0));
    }
}
