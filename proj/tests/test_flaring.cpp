#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "ogt/flaring.hpp"

using namespace ogt;
using namespace ogt::testfix;

namespace {

Automorphism aut2(const std::string& ia, const std::string& ib) {
    Basis b(2);
    return Automorphism(b, {parse_word(b, ia), parse_word(b, ib)});
}

} // namespace

TEST_CASE("subgroup specs enforce symmetry and reject the identity") {
    Basis b(2);
    auto spec = SubgroupSpec::from_generators({aut2("ab", "b")});
    CHECK(spec.gens.size() == 2);
    CHECK(spec.inverse_index[0] == 1);
    CHECK(spec.inverse_index[1] == 0);
    CHECK_THROWS_AS(
        SubgroupSpec::from_generators({Automorphism::inner(b, parse_word(b, "a"))}), Error);
}

TEST_CASE("cayley balls of a cyclic group") {
    auto spec = SubgroupSpec::from_generators({aut2("ab", "b")});
    auto ball = cayley_ball(spec, 4);
    CHECK(ball.nodes.size() == 9); // 2n+1 for an infinite-order generator
    CHECK(cayley_ball(spec, 0).nodes.size() == 1);
    for (const auto& node : ball.nodes) CHECK(node.dist <= 4);
    // Distances agree with pairwise out_equal dedup: every node unique.
    for (size_t i = 0; i < ball.nodes.size(); ++i)
        for (size_t j = i + 1; j < ball.nodes.size(); ++j)
            CHECK_FALSE(out_equal(ball.nodes[i].rep, ball.nodes[j].rep).equal);
}

TEST_CASE("negative flaring fixture: a fixed class defeats every lambda") {
    auto spec = SubgroupSpec::from_generators({aut2("a", "ba")});
    for (const char* lam : {"3/2", "2", "3"}) {
        auto report = conjugacy_flaring_check(spec, parse_rational(lam), 2, 5, 3);
        CHECK_FALSE(report.holds_on_sample);
        REQUIRE(report.counterexample.has_value());
        CHECK(report.counterexample->alpha_text == "a");
        CHECK(verify_counterexample(spec, *report.counterexample, parse_rational(lam)));
    }
}

TEST_CASE("flaring verdict is inner-twist independent") {
    Basis b(2);
    auto phi = aut2("a", "ba");
    auto twisted = compose(Automorphism::inner(b, parse_word(b, "ab")), phi);
    auto r1 = conjugacy_flaring_check(SubgroupSpec::from_generators({phi}), Rational(2), 1, 4, 3);
    auto r2 =
        conjugacy_flaring_check(SubgroupSpec::from_generators({twisted}), Rational(2), 1, 4, 3);
    CHECK(r1.holds_on_sample == r2.holds_on_sample);
    REQUIRE(r1.counterexample.has_value());
    REQUIRE(r2.counterexample.has_value());
    CHECK(r1.counterexample->alpha_text == r2.counterexample->alpha_text);
}

TEST_CASE("counterexamples persist under larger budgets") {
    auto spec = SubgroupSpec::from_generators({aut2("a", "ba")});
    auto small = conjugacy_flaring_check(spec, Rational(2), 1, 3, 2);
    auto large = conjugacy_flaring_check(spec, Rational(2), 1, 5, 4);
    CHECK_FALSE(small.holds_on_sample);
    CHECK_FALSE(large.holds_on_sample);
}

TEST_CASE("positive flaring sample for a screened power") {
    // Rank 2 never flares (every infinite-order class is a punctured-torus
    // mapping class, so some commutator class is periodic).  The rank-3 map
    // a -> b -> c -> ab screens clean and its fourth power has min stretch 3.
    Basis b3(3);
    Automorphism f(b3, {parse_word(b3, "b"), parse_word(b3, "c"), parse_word(b3, "ab")});
    auto screen = screen_atoroidal(f, 4, 8);
    CHECK_FALSE(screen.certifying);
    CHECK_FALSE(screen.periodic.has_value());

    Automorphism f4 = compose(compose(f, f), compose(f, f));
    CHECK(growth_fit(f4, CyclicWord(Word({1})), 6).min_stretch >= 2);
    auto spec = SubgroupSpec::from_generators({f4}, {"f4"});
    auto report = conjugacy_flaring_check(spec, Rational(2), 1, 2, 4);
    CHECK(report.holds_on_sample);
    CHECK(report.counterexample == std::nullopt);
    CHECK(report.pairs > 0);
    CHECK(report.checks > 0);
}

TEST_CASE("atoroidality screen catches fixed classes") {
    auto s1 = screen_atoroidal(aut2("a", "ba"), 2, 4);
    REQUIRE(s1.periodic.has_value());
    CHECK(s1.periodic->first == "a");
    CHECK(s1.periodic->second == 1);

    // Surface-like automorphism: some class is fixed (the screen reports
    // the first in enumeration order); the commutator class is fixed too.
    Basis b2(2);
    auto surface = aut2("ab", "b");
    auto s2 = screen_atoroidal(surface, 4, 4);
    REQUIRE(s2.periodic.has_value());
    CyclicWord comm(parse_word(b2, "abAB"));
    CHECK(surface.apply_class(comm) == comm);

    Basis b(2);
    auto s3 = screen_atoroidal(compose(Automorphism::inner(b, parse_word(b, "a")),
                                       Automorphism::identity(b)),
                               1, 2);
    CHECK(s3.degenerate);
}

TEST_CASE("growth fit on the Fibonacci substitution") {
    Basis b(2);
    auto f = aut2("ab", "a");
    auto fit = growth_fit(f, CyclicWord(parse_word(b, "a")), 12);
    // Image lengths follow the Fibonacci numbers 2, 3, 5, 8, ...
    CHECK(fit.lengths[0] == 2);
    CHECK(fit.lengths[1] == 3);
    CHECK(fit.lengths[2] == 5);
    CHECK(fit.lengths[11] == 377);
    double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    CHECK(std::abs(fit.exponent - golden) / golden < 0.05);

    auto fixed = growth_fit(aut2("a", "ba"), CyclicWord(parse_word(b, "a")), 6);
    CHECK(fixed.exponent == doctest::Approx(0.0));
    auto idfit = growth_fit(Automorphism::identity(b), CyclicWord(parse_word(b, "ab")), 6);
    CHECK(idfit.exponent == doctest::Approx(0.0));
}

TEST_CASE("torsion bound and projectively good") {
    CHECK(torsion_bound(2) == 48);
    CHECK(torsion_bound(3) == Integer(26) * 24 * 18); // (27-1)(27-3)(27-9)

    Basis b(2);
    // sigma: a -> b, b -> a is an involution in Out.
    auto sigma = aut2("b", "a");
    CHECK(certify_finite_order(sigma) == 2);
    CHECK(projectively_good({sigma}));

    // a -> A, b -> B abelianizes to -I.
    auto neg = aut2("A", "B");
    CHECK(certify_finite_order(neg) == 2);
    CHECK_FALSE(projectively_good({neg}));

    CHECK_THROWS_AS(certify_finite_order(aut2("ab", "b"), 16), Error);
}

TEST_CASE("pingpong specs") {
    auto sigma = aut2("b", "a");
    auto f = aut2("ab", "a");
    auto spec = pingpong_spec({sigma}, f, 3);
    // {sigma, sigma^-1} collapses to one element; f^3 and f^-3 are distinct.
    CHECK(spec.gens.size() == 3);
}

TEST_CASE("stabilizer census is bounded by the torsion bound") {
    Basis b(2);
    auto f3 = compose(aut2("ab", "a"), compose(aut2("ab", "a"), aut2("ab", "a")));
    auto ball = cayley_ball(SubgroupSpec::from_generators({f3}), 3);
    std::mt19937 rng(3);
    for (int i = 0; i < 10; ++i) {
        Word w = random_word(rng, b, 6);
        if (cyclic_reduce(w).empty()) continue;
        CHECK(Integer(stabilizer_census(ball, CyclicWord(w))) <= torsion_bound(2));
    }
}

TEST_CASE("flare probe on a folding path") {
    Basis b(2);
    auto g = std::make_shared<MarkedGraph>(MarkedGraph::rose(b, {{1, 2}, {1, 2}}));
    auto h = std::make_shared<MarkedGraph>(act(aut2("ab", "b"), *g));
    auto sg = standard_geodesic(g, h);
    std::vector<CyclicWord> alphas{CyclicWord(parse_word(b, "a")),
                                   CyclicWord(parse_word(b, "b"))};
    double span = std::log(to_double(sg.fold.total_time().ratio));
    auto rows = folding_flare_probe(sg.fold, alphas, span / 8, Rational(1, 4));
    CHECK(rows.size() == 2);
    for (const auto& row : rows) {
        // Ratios re-derive from stored profiles exactly.
        for (auto& [event, ratio] : row.ratios) CHECK(ratio > 0);
    }
    CHECK_THROWS_AS(folding_flare_probe(sg.fold, alphas, 10 * span, Rational(1)), Error);
}
