#include "ogt/bundle.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ogt {

namespace {

std::string aut_key(const Automorphism& g) {
    std::ostringstream os;
    for (int j = 0; j < g.basis().rank; ++j) {
        for (Letter l : g.image(j).letters) os << l << ",";
        os << ";";
    }
    return os.str();
}

// Recovers alpha from an inner automorphism i_alpha.
Word inner_word(const Automorphism& g) {
    auto r = out_equal(Automorphism::identity(g.basis()), g);
    if (!r.equal) fail(ErrorCode::BadInput, "element is not inner");
    return *r.conjugator;
}

} // namespace

BundleSpec BundleSpec::from_group(SubgroupSpec group) {
    BundleSpec b{group, group.gens};
    return b;
}

bool BundleSpec::conjugation_identity_holds() const {
    const Basis& basis = group.basis;
    for (const auto& t : lifts)
        for (int g = 1; g <= basis.rank; ++g) {
            Word x({g});
            Automorphism lhs = compose(compose(t, Automorphism::inner(basis, x)), t.inverse());
            Automorphism rhs = Automorphism::inner(basis, t.apply(x));
            if (!(lhs == rhs)) return false;
        }
    return true;
}

int fiber_distance(const FiberPoint& u, const FiberPoint& v) {
    if (u.base_node != v.base_node) fail(ErrorCode::DifferentFibers, "points over distinct bases");
    return concat(u.coord.inverse(), v.coord).length();
}

std::optional<int> BundleBall::find(const Automorphism& g) const {
    auto it = index.find(aut_key(g));
    if (it == index.end()) return std::nullopt;
    return it->second;
}

BundleBall bundle_ball(const BundleSpec& bundle, int radius, std::uint64_t node_budget) {
    const Basis& basis = bundle.group.basis;
    std::vector<Automorphism> letters;
    for (int g = 1; g <= basis.rank; ++g) {
        letters.push_back(Automorphism::inner(basis, Word({g})));
        letters.push_back(Automorphism::inner(basis, Word({-g})));
    }
    for (const auto& t : bundle.lifts) letters.push_back(t);
    for (const auto& t : bundle.lifts) letters.push_back(t.inverse());

    BundleBall ball(basis);
    ball.radius = radius;
    ball.nodes.push_back({Automorphism::identity(basis), 0});
    ball.index[aut_key(ball.nodes[0].element)] = 0;
    std::deque<int> frontier{0};
    while (!frontier.empty()) {
        int at = frontier.front();
        frontier.pop_front();
        if (ball.nodes[at].dist == radius) continue;
        for (const auto& s : letters) {
            Automorphism next = compose(ball.nodes[at].element, s);
            std::string key = aut_key(next);
            if (ball.index.count(key)) continue;
            if (ball.nodes.size() >= node_budget) {
                ball.complete = false;
                return ball;
            }
            ball.index[key] = static_cast<int>(ball.nodes.size());
            ball.nodes.push_back({std::move(next), ball.nodes[at].dist + 1});
            frontier.push_back(static_cast<int>(ball.nodes.size()) - 1);
        }
    }
    return ball;
}

std::vector<int> properness_table(const BundleBall& ball, int up_to_radius) {
    if (!ball.complete || up_to_radius > ball.radius)
        fail(ErrorCode::BallTooSmall,
             "properness undetermined: explored ball smaller than requested radius");
    std::vector<int> f(up_to_radius + 1, 0);
    Automorphism id = Automorphism::identity(ball.basis);
    for (const auto& node : ball.nodes) {
        if (node.dist > up_to_radius) continue;
        auto r = out_equal(id, node.element);
        if (!r.equal) continue;
        int len = r.conjugator->length();
        for (int n = node.dist; n <= up_to_radius; ++n) f[n] = std::max(f[n], len);
    }
    return f;
}

CanonicalLift canonical_lift(const BundleSpec& bundle, const CayleyBall& base,
                             const std::vector<int>& path_letters, int zero_index,
                             const Word& start_coord) {
    const Basis& basis = bundle.group.basis;
    if (zero_index < 0 || zero_index > static_cast<int>(path_letters.size()))
        fail(ErrorCode::BadInput, "zero index outside the path");

    // Certify geodesy: the whole word must realize the ball distance.
    Automorphism total = Automorphism::identity(basis);
    for (int l : path_letters) total = compose(total, bundle.group.gens[l]);
    auto end = base.find(total);
    if (!end || base.nodes[*end].dist != static_cast<int>(path_letters.size()))
        fail(ErrorCode::NotGeodesic, "path is not a certified geodesic");

    // Section lift per base vertex: the lift product along the ball's BFS
    // word, so fiber coordinates depend only on the base vertex.
    auto section_of = [&](int node) {
        Automorphism s = Automorphism::identity(basis);
        for (int l : base.nodes[node].word) s = compose(s, bundle.lifts[l]);
        return s;
    };

    // gamma(zero_index) = identity; lift through identity * i_{start}.
    Automorphism z = Automorphism::inner(basis, start_coord);
    std::vector<Automorphism> points(path_letters.size() + 1, z);
    for (int j = zero_index - 1; j >= 0; --j)
        points[j] = compose(points[j + 1], bundle.lifts[path_letters[j]].inverse());
    for (int j = zero_index; j < static_cast<int>(path_letters.size()); ++j)
        points[j + 1] = compose(points[j], bundle.lifts[path_letters[j]]);

    CanonicalLift lift;
    lift.points = points;
    Automorphism at_base = Automorphism::identity(basis);
    std::vector<Automorphism> base_elems(path_letters.size() + 1, at_base);
    for (int j = zero_index - 1; j >= 0; --j)
        base_elems[j] = compose(base_elems[j + 1], bundle.group.gens[path_letters[j]].inverse());
    for (int j = zero_index; j < static_cast<int>(path_letters.size()); ++j)
        base_elems[j + 1] = compose(base_elems[j], bundle.group.gens[path_letters[j]]);
    for (size_t i = 0; i < points.size(); ++i) {
        auto node = base.find(base_elems[i]);
        if (!node) fail(ErrorCode::BallTooSmall, "lift vertex outside the base ball");
        FiberPoint fp;
        fp.base_node = *node;
        fp.coord = inner_word(compose(section_of(*node).inverse(), points[i]));
        lift.fiber.push_back(fp);
    }
    return lift;
}

BundleReport mj_sardar_sampler(const BundleSpec& bundle, int k, int n_k, int M_k, int samples,
                               std::uint64_t seed, double lambda_target,
                               const std::vector<Word>& central_family) {
    if (n_k < 1 || samples < 1) fail(ErrorCode::BadInput, "need n_k >= 1 and samples >= 1");
    if (M_k < 1) fail(ErrorCode::BadInput, "central distance filter M_k must be at least 1");
    const Basis& basis = bundle.group.basis;
    const int n_gens = static_cast<int>(bundle.group.gens.size());

    CayleyBall base = cayley_ball(bundle.group, 2 * n_k);
    bool any_geodesic = false;
    for (const auto& node : base.nodes)
        if (node.dist == 2 * n_k) any_geodesic = true;
    if (!any_geodesic) fail(ErrorCode::NoGeodesicOfLength, "base ball has no geodesic of length 2n");

    BundleReport report;
    report.qi_class = k;
    report.n_k = n_k;
    report.M_k = M_k;
    report.samples = samples;
    report.seed = seed;
    report.lambda_target = lambda_target;
    report.ball_complete = true;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n_gens - 1);
    std::uniform_int_distribution<int> gen(1, basis.rank);
    std::uniform_int_distribution<int> sign(0, 1);

    std::optional<Rational> min_lambda;
    int made = 0;
    int attempts = 0;
    size_t family_at = 0;
    while (made < samples) {
        if (++attempts > 100 * samples + 100)
            fail(ErrorCode::BudgetExceeded, "sampler could not draw enough geodesics");
        std::vector<int> letters;
        for (int i = 0; i < 2 * n_k; ++i) letters.push_back(pick(rng));
        Automorphism total = Automorphism::identity(basis);
        for (int l : letters) total = compose(total, bundle.group.gens[l]);
        auto end = base.find(total);
        if (!end || base.nodes[*end].dist != 2 * n_k) continue;

        Word alpha;
        if (!central_family.empty()) {
            alpha = central_family[family_at % central_family.size()];
            ++family_at;
        } else {
            std::vector<Letter> raw;
            int len = M_k + static_cast<int>(rng() % 4);
            while (static_cast<int>(raw.size()) < len) {
                Letter l = gen(rng) * (sign(rng) ? 1 : -1);
                if (!raw.empty() && raw.back() == inverse_letter(l)) continue;
                raw.push_back(l);
            }
            alpha = Word(raw);
        }
        if (alpha.length() < M_k) continue;

        // Endpoint fiber differences of the two canonical lifts through
        // z and z * i_alpha: i_{g(alpha)} backward and i_{h^{-1}(alpha)}
        // forward.
        Automorphism h = Automorphism::identity(basis);
        for (int j = n_k; j < 2 * n_k; ++j) h = compose(h, bundle.lifts[letters[j]]);
        Automorphism g = Automorphism::identity(basis);
        for (int j = 0; j < n_k; ++j) g = compose(g, bundle.lifts[letters[j]]);

        int central = alpha.length();
        int forward = h.inverse().apply(alpha).length();
        int backward = g.apply(alpha).length();
        Rational lambda(std::max(forward, backward), central);

        if (!min_lambda || lambda < *min_lambda) min_lambda = lambda;
        if (to_double(lambda) < lambda_target && report.below_target.size() < 32) {
            BundleWitness w;
            w.path_letters = letters;
            w.alpha_text = word_to_string(basis, alpha);
            w.central = central;
            w.forward = forward;
            w.backward = backward;
            w.lambda = lambda;
            report.below_target.push_back(std::move(w));
        }
        ++made;
    }
    report.min_lambda = *min_lambda;
    return report;
}

Prop81Constants prop81_constants(const Rational& lambda, int N, int k, const BundleSpec& bundle,
                                 std::uint64_t node_budget) {
    if (lambda <= 1) fail(ErrorCode::BadInput, "lambda must exceed 1");
    if (N < 1 || k < 1) fail(ErrorCode::BadInput, "need N >= 1 and k >= 1");
    Prop81Constants out;
    out.lambda_k = (lambda + 1) / 2;
    out.n_k = N;
    const int radius = N + 1 + k * N + k;
    BundleBall ball = bundle_ball(bundle, radius, node_budget);
    out.properness = properness_table(ball, radius);
    out.e_k = out.properness[radius];
    out.M_k = ceil_rational(2 * (lambda + 2 * Rational(out.e_k)) / (lambda - 1));
    return out;
}

} // namespace ogt
