#include "fixtures.hpp"

#include <functional>

#include "ogt/stallings.hpp"

namespace ogt::testfix {

Word random_word(std::mt19937& rng, const Basis& b, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> gen(1, b.rank);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<Letter> raw;
    int n = len(rng);
    for (int i = 0; i < n; ++i) raw.push_back(gen(rng) * (sign(rng) ? 1 : -1));
    return reduce(raw);
}

Automorphism random_automorphism(std::mt19937& rng, const Basis& b, int moves) {
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

namespace {

MetricGraph shape_graph(std::mt19937& rng, int rank) {
    std::uniform_int_distribution<int> denom(3, 24);
    auto rnd_len = [&]() { return Rational(1 + denom(rng) % 7, denom(rng)); };
    std::uniform_int_distribution<int> pick(0, 2);
    MetricGraph g;
    int shape = pick(rng);
    if (rank == 2) {
        if (shape == 0) { // rose
            g.num_vertices = 1;
            g.edges = {{0, 0, rnd_len()}, {0, 0, rnd_len()}};
        } else if (shape == 1) { // theta
            g.num_vertices = 2;
            g.edges = {{0, 1, rnd_len()}, {0, 1, rnd_len()}, {0, 1, rnd_len()}};
        } else { // dumbbell
            g.num_vertices = 2;
            g.edges = {{0, 0, rnd_len()}, {0, 1, rnd_len()}, {1, 1, rnd_len()}};
        }
    } else if (rank == 3) {
        if (shape == 0) { // rose
            g.num_vertices = 1;
            g.edges = {{0, 0, rnd_len()}, {0, 0, rnd_len()}, {0, 0, rnd_len()}};
        } else if (shape == 1) { // theta plus loop
            g.num_vertices = 2;
            g.edges = {{0, 1, rnd_len()}, {0, 1, rnd_len()}, {0, 1, rnd_len()}, {0, 0, rnd_len()}};
        } else { // four parallel edges
            g.num_vertices = 2;
            g.edges = {{0, 1, rnd_len()}, {0, 1, rnd_len()}, {0, 1, rnd_len()}, {0, 1, rnd_len()}};
        }
    } else {
        g.num_vertices = 1;
        for (int i = 0; i < rank; ++i) g.edges.push_back({0, 0, rnd_len()});
    }
    return g;
}

} // namespace

MarkedGraph random_marked_graph(std::mt19937& rng, const Basis& b, int twist_moves) {
    MarkedGraph g = MarkedGraph::from_spanning_tree(b, shape_graph(rng, b.rank), true);
    if (twist_moves > 0) {
        Automorphism phi = random_automorphism(rng, b, twist_moves);
        return act(phi, g);
    }
    return g;
}

Rational brute_force_ratio(const MarkedGraph& g, const MarkedGraph& h, int max_len) {
    std::optional<Rational> best;
    enumerate_cyclic_words(g.basis, max_len, [&](const CyclicWord& alpha) {
        Rational r = loop_length(alpha, h) / loop_length(alpha, g);
        if (!best || r > *best) best = r;
    });
    return *best;
}

bool brute_force_conjugate_into(const Basis& b, const std::vector<Word>& a_gens,
                                const std::vector<Word>& b_gens, int cap) {
    LabeledGraph bg = stallings_graph(b, b_gens);
    std::vector<Word> conjugators{Word()};
    std::function<void(Word, int)> grow = [&](Word w, int depth) {
        if (depth == 0) return;
        for (int gidx = 1; gidx <= b.rank; ++gidx)
            for (int s : {1, -1}) {
                Letter l = gidx * s;
                if (!w.letters.empty() && w.letters.back() == inverse_letter(l)) continue;
                Word next = concat(w, Word({l}));
                conjugators.push_back(next);
                grow(next, depth - 1);
            }
    };
    grow(Word(), cap);
    for (const Word& w : conjugators) {
        bool ok = true;
        for (const Word& gen : a_gens)
            if (!traces_loop(bg, conjugate(gen, w))) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

} // namespace ogt::testfix
