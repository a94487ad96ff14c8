#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ogt/automorphism.hpp"
#include "ogt/stallings.hpp"

using namespace ogt;

namespace {

Automorphism aut2(const std::string& ia, const std::string& ib) {
    Basis b(2);
    return Automorphism(b, {parse_word(b, ia), parse_word(b, ib)});
}

Automorphism random_aut(std::mt19937& rng, const Basis& b, int moves) {
    // Random product of elementary Nielsen moves keeps images honest.
    Automorphism f = Automorphism::identity(b);
    std::uniform_int_distribution<int> pick(0, b.rank - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < moves; ++i) {
        int x = pick(rng), y = pick(rng);
        std::vector<Word> images;
        for (int g = 1; g <= b.rank; ++g) images.push_back(Word({g}));
        if (x == y) {
            images[x] = images[x].inverse();
        } else if (coin(rng)) {
            images[x] = concat(Word({x + 1}), Word({coin(rng) ? y + 1 : -(y + 1)}));
        } else {
            images[x] = concat(Word({coin(rng) ? y + 1 : -(y + 1)}), Word({x + 1}));
        }
        f = compose(f, Automorphism(b, std::move(images)));
    }
    return f;
}

Word random_word(std::mt19937& rng, const Basis& b, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> gen(1, b.rank);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<Letter> raw;
    int n = len(rng);
    for (int i = 0; i < n; ++i) raw.push_back(gen(rng) * (sign(rng) ? 1 : -1));
    return reduce(raw);
}

} // namespace

TEST_CASE("apply substitutes and reduces") {
    auto phi = aut2("ab", "b");
    Basis b(2);
    CHECK(phi.apply(parse_word(b, "a")) == parse_word(b, "ab"));
    CHECK(phi.apply(parse_word(b, "aB")) == parse_word(b, "a"));
    auto id = Automorphism::identity(b);
    CHECK(id.apply(parse_word(b, "abAB")) == parse_word(b, "abAB"));
}

TEST_CASE("compose") {
    auto phi = aut2("ab", "b");
    auto psi = aut2("a", "ba");
    auto fg = compose(phi, psi);
    Basis b(2);
    CHECK(fg.image(0) == parse_word(b, "ab"));
    CHECK(fg.image(1) == parse_word(b, "bab"));
    CHECK(compose(phi, Automorphism::identity(b)) == phi);
    CHECK(compose(phi, phi.inverse()) == Automorphism::identity(b));
}

TEST_CASE("invert by folding") {
    auto phi = aut2("ab", "b");
    auto inv = phi.inverse();
    Basis b(2);
    CHECK(inv.image(0) == parse_word(b, "aB"));
    CHECK(inv.image(1) == parse_word(b, "b"));
    CHECK(Automorphism::identity(b).inverse() == Automorphism::identity(b));
    CHECK_THROWS_AS(aut2("aa", "b"), Error); // index-2 image subgroup
}

TEST_CASE("apply of compose equals nested apply") {
    Basis b(3);
    std::mt19937 rng(23);
    for (int i = 0; i < 60; ++i) {
        auto f = random_aut(rng, b, 6), g = random_aut(rng, b, 6);
        Word w = random_word(rng, b, 10);
        CHECK(compose(f, g).apply(w) == f.apply(g.apply(w)));
    }
}

TEST_CASE("abelianization") {
    auto phi = aut2("ab", "b");
    auto m = abelianize(phi);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(0, 1) == 0);
    CHECK(m.at(1, 0) == 1);
    CHECK(m.at(1, 1) == 1);
    CHECK(m.determinant() == 1);
    Basis b(2);
    CHECK(abelianize(Automorphism::identity(b)) == IntMatrix::identity(2));

    std::mt19937 rng(5);
    Basis b3(3);
    for (int i = 0; i < 40; ++i) {
        auto f = random_aut(rng, b3, 5), g = random_aut(rng, b3, 5);
        CHECK(abelianize(compose(f, g)) == abelianize(f) * abelianize(g));
        Integer det = abelianize(f).determinant();
        CHECK((det == 1 || det == -1));
    }
}

TEST_CASE("out_equal basics") {
    Basis b(2);
    auto phi = aut2("ab", "b");
    auto twisted = compose(Automorphism::inner(b, parse_word(b, "a")), phi);
    auto r = out_equal(phi, twisted);
    REQUIRE(r.equal);
    CHECK(word_to_string(b, *r.conjugator) == "a");

    auto r2 = out_equal(aut2("ab", "b"), aut2("ba", "b"));
    REQUIRE(r2.equal);
    CHECK(word_to_string(b, *r2.conjugator) == "b");

    CHECK_FALSE(out_equal(aut2("ab", "b"), Automorphism::identity(b)).equal);
}

TEST_CASE("out_equal witness definition") {
    Basis b(2);
    std::mt19937 rng(31);
    for (int i = 0; i < 40; ++i) {
        auto phi = random_aut(rng, b, 5);
        Word w = random_word(rng, b, 4);
        auto psi = compose(Automorphism::inner(b, w), phi);
        auto r = out_equal(phi, psi);
        REQUIRE(r.equal);
        // psi = inner(witness) . phi
        CHECK(compose(Automorphism::inner(b, *r.conjugator), phi) == psi);
    }
}

TEST_CASE("out_equal is an equivalence on a random sample") {
    Basis b(2);
    std::mt19937 rng(43);
    std::vector<Automorphism> sample;
    for (int i = 0; i < 10; ++i) sample.push_back(random_aut(rng, b, 4));
    for (const auto& f : sample) CHECK(out_equal(f, f).equal);
    for (size_t i = 0; i < sample.size(); ++i)
        for (size_t j = i + 1; j < sample.size(); ++j) {
            bool ij = out_equal(sample[i], sample[j]).equal;
            bool ji = out_equal(sample[j], sample[i]).equal;
            CHECK(ij == ji);
        }
}

TEST_CASE("conjugacy length depends only on Out class and conjugacy class") {
    Basis b(2);
    std::mt19937 rng(59);
    for (int i = 0; i < 80; ++i) {
        auto phi = random_aut(rng, b, 5);
        Word w = random_word(rng, b, 8);
        if (cyclic_reduce(w).empty()) continue;
        Word u = random_word(rng, b, 5), v = random_word(rng, b, 5);
        auto twisted = compose(Automorphism::inner(b, u), phi);
        CHECK(conjugacy_length(phi.apply(w)) == conjugacy_length(twisted.apply(conjugate(w, v))));
    }
}

TEST_CASE("automorphism text round trip") {
    auto phi = aut2("ab", "b");
    std::string text = automorphism_to_text(phi);
    CHECK(text == "a -> a b\nb -> b\n");
    auto back = parse_automorphism(text);
    CHECK(back == phi);
    auto with_comment = parse_automorphism("# twist\na -> a b\nb -> b\n");
    CHECK(with_comment == phi);
}

TEST_CASE("stallings graphs for subgroups") {
    Basis b(2);
    auto g1 = stallings_graph(b, {parse_word(b, "a")});
    CHECK(g1.num_vertices == 1);
    CHECK(g1.edges.size() == 1);

    // Conjugate generator folds to the same cyclic core as the plain one.
    auto g2 = cyclic_core(stallings_graph(b, {parse_word(b, "abA")}));
    auto g3 = cyclic_core(stallings_graph(b, {parse_word(b, "b")}));
    CHECK(canonical_signature(g2) == canonical_signature(g3));

    // Index-2 subgroup {aa, ab}: rank 2 core.
    auto g4 = cyclic_core(stallings_graph(b, {parse_word(b, "aa"), parse_word(b, "ab")}));
    CHECK(g4.rank() == 2);
    CHECK(g4.num_vertices == 2);

    CHECK_THROWS_AS(stallings_graph(b, {parse_word(b, "aA")}), Error);
}

TEST_CASE("membership walk") {
    Basis b(2);
    auto g = stallings_graph(b, {parse_word(b, "aa"), parse_word(b, "ab")});
    CHECK(traces_loop(g, parse_word(b, "aa")));
    CHECK(traces_loop(g, parse_word(b, "abab")));
    CHECK_FALSE(traces_loop(g, parse_word(b, "a")));
    CHECK_FALSE(traces_loop(g, parse_word(b, "b")));
}
