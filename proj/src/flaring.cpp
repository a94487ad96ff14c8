#include "ogt/flaring.hpp"

#include "ogt/factors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace ogt {

SubgroupSpec SubgroupSpec::from_generators(std::vector<Automorphism> generators,
                                           std::vector<std::string> gen_names) {
    if (generators.empty()) fail(ErrorCode::BadInput, "empty generating set");
    Basis basis = generators.front().basis();
    if (gen_names.empty())
        for (size_t i = 0; i < generators.size(); ++i)
            gen_names.push_back("s" + std::to_string(i + 1));

    SubgroupSpec spec{basis, {}, {}, {}};
    Automorphism id = Automorphism::identity(basis);
    auto add = [&](const Automorphism& g, const std::string& name) {
        if (out_equal(g, id).equal)
            fail(ErrorCode::BadInput, "generator is the identity in Out");
        for (const auto& have : spec.gens)
            if (out_equal(g, have).equal) return;
        spec.gens.push_back(g);
        spec.names.push_back(name);
    };
    for (size_t i = 0; i < generators.size(); ++i) {
        add(generators[i], gen_names[i]);
        add(generators[i].inverse(), gen_names[i] + "^-1");
    }
    spec.inverse_index.assign(spec.gens.size(), -1);
    for (size_t i = 0; i < spec.gens.size(); ++i) {
        if (spec.inverse_index[i] >= 0) continue;
        Automorphism inv = spec.gens[i].inverse();
        for (size_t j = 0; j < spec.gens.size(); ++j)
            if (out_equal(inv, spec.gens[j]).equal) {
                spec.inverse_index[i] = static_cast<int>(j);
                spec.inverse_index[j] = static_cast<int>(i);
                break;
            }
        if (spec.inverse_index[i] < 0)
            fail(ErrorCode::BadInput, "internal: inverse closure failed");
    }
    return spec;
}

std::string SubgroupSpec::word_text(const std::vector<int>& word) const {
    if (word.empty()) return "e";
    std::string out;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i) out += ".";
        out += names[word[i]];
    }
    return out;
}

Automorphism SubgroupSpec::word_product(const std::vector<int>& word) const {
    Automorphism g = Automorphism::identity(basis);
    for (int i : word) g = compose(g, gens[i]);
    return g;
}

std::optional<int> CayleyBall::find(const Automorphism& g) const {
    auto it = buckets.find(out_class_key(g));
    if (it == buckets.end()) return std::nullopt;
    for (int idx : it->second)
        if (out_equal(g, nodes[idx].rep).equal) return idx;
    return std::nullopt;
}

CayleyBall cayley_ball(const SubgroupSpec& group, int radius, std::uint64_t node_budget) {
    if (radius < 0) fail(ErrorCode::BadInput, "negative radius");
    CayleyBall ball(group);
    ball.radius = radius;
    ball.nodes.push_back({Automorphism::identity(group.basis), 0, {}});
    ball.buckets[out_class_key(ball.nodes[0].rep)].push_back(0);
    std::deque<int> frontier{0};
    while (!frontier.empty()) {
        int at = frontier.front();
        frontier.pop_front();
        if (ball.nodes[at].dist == radius) continue;
        for (size_t gi = 0; gi < group.gens.size(); ++gi) {
            Automorphism next = compose(ball.nodes[at].rep, group.gens[gi]);
            if (ball.find(next)) continue;
            if (ball.nodes.size() >= node_budget)
                fail(ErrorCode::BudgetExceeded, "cayley ball node budget exceeded");
            CayleyBall::Node node{next, ball.nodes[at].dist + 1, ball.nodes[at].word};
            node.word.push_back(static_cast<int>(gi));
            ball.buckets[out_class_key(next)].push_back(static_cast<int>(ball.nodes.size()));
            ball.nodes.push_back(std::move(node));
            frontier.push_back(static_cast<int>(ball.nodes.size()) - 1);
        }
    }
    return ball;
}

FlaringReport conjugacy_flaring_check(const SubgroupSpec& group, const Rational& lambda, int M,
                                      int word_radius, int alpha_budget, std::uint64_t budget) {
    if (lambda <= 1) fail(ErrorCode::BadInput, "lambda must exceed 1");
    if (M < 1) fail(ErrorCode::BadInput, "M must be at least 1");

    FlaringReport report;
    report.lambda = lambda;
    report.M = M;
    report.word_radius = word_radius;
    report.alpha_budget = alpha_budget;
    report.m_breve = max_illegality_bound(group.basis.rank);
    report.illegal_threshold = illegal_segment_threshold(group.basis.rank);
    report.torsion_e_r = torsion_bound(group.basis.rank);

    CayleyBall ball = cayley_ball(group, word_radius, budget);
    std::vector<CyclicWord> alphas = all_cyclic_words(group.basis, alpha_budget, budget);
    report.alphas = alphas.size();

    // Geodesic-concatenation pairs ordered by (|g1|+|g2|, |g1|, BFS index).
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < ball.nodes.size(); ++i)
        for (size_t j = 0; j < ball.nodes.size(); ++j) {
            const auto& n1 = ball.nodes[i];
            const auto& n2 = ball.nodes[j];
            if (n1.dist < M || n2.dist < M) continue;
            if (n1.dist + n2.dist > word_radius) continue;
            auto prod = ball.find(compose(n1.rep, n2.rep));
            if (!prod || ball.nodes[*prod].dist != n1.dist + n2.dist) continue;
            pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
        int la = ball.nodes[a.first].dist + ball.nodes[a.second].dist;
        int lb = ball.nodes[b.first].dist + ball.nodes[b.second].dist;
        if (la != lb) return la < lb;
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    report.pairs = pairs.size();

    for (const auto& gens : group.gens)
        report.generator_growth.push_back(
            growth_fit(gens, CyclicWord(Word({1})), 8).exponent);

    for (auto [i, j] : pairs) {
        const Automorphism& g1 = ball.nodes[i].rep;
        Automorphism g2_inv = ball.nodes[j].rep.inverse();
        for (const auto& alpha : alphas) {
            ++report.checks;
            int base_len = alpha.length();
            int l1 = conjugacy_length(g1.apply(alpha.rep));
            int l2 = conjugacy_length(g2_inv.apply(alpha.rep));
            if (lambda * Rational(base_len) <= Rational(std::max(l1, l2))) continue;
            FlaringCounterexample ce;
            ce.g1_word = ball.nodes[i].word;
            ce.g2_word = ball.nodes[j].word;
            ce.g1_text = group.word_text(ce.g1_word);
            ce.g2_text = group.word_text(ce.g2_word);
            ce.alpha_text = cyclic_word_to_string(group.basis, alpha);
            ce.alpha_len = base_len;
            ce.g1_image_len = l1;
            ce.g2_inv_image_len = l2;
            report.counterexample = ce;
            report.holds_on_sample = false;
            return report;
        }
    }
    report.holds_on_sample = true;
    return report;
}

bool verify_counterexample(const SubgroupSpec& group, const FlaringCounterexample& ce,
                           const Rational& lambda) {
    Automorphism g1 = group.word_product(ce.g1_word);
    Automorphism g2 = group.word_product(ce.g2_word);
    Word alpha = parse_word(group.basis, ce.alpha_text);
    int base = conjugacy_length(alpha);
    int l1 = conjugacy_length(g1.apply(alpha));
    int l2 = conjugacy_length(g2.inverse().apply(alpha));
    if (base != ce.alpha_len || l1 != ce.g1_image_len || l2 != ce.g2_inv_image_len) return false;
    return lambda * Rational(base) > Rational(std::max(l1, l2));
}

ScreenVerdict screen_atoroidal(const Automorphism& phi, int len_cap, int pow_cap,
                               int orbit_length_ceiling) {
    if (len_cap < 1 || pow_cap < 1) fail(ErrorCode::BadInput, "caps must be at least 1");
    ScreenVerdict verdict;
    verdict.len_cap = len_cap;
    verdict.pow_cap = pow_cap;
    verdict.degenerate = out_equal(phi, Automorphism::identity(phi.basis())).equal;

    std::vector<CyclicWord> shorts = all_cyclic_words(phi.basis(), len_cap);
    for (const auto& alpha : shorts) {
        CyclicWord beta = alpha;
        for (int k = 1; k <= pow_cap; ++k) {
            beta = phi.apply_class(beta);
            if (beta == alpha) {
                verdict.periodic = {cyclic_word_to_string(phi.basis(), alpha), k};
                return verdict;
            }
            if (beta.length() > orbit_length_ceiling) {
                ++verdict.pruned;
                break;
            }
        }
    }
    return verdict;
}

std::vector<FlareProbeRow> folding_flare_probe(const FoldingPath& path,
                                               const std::vector<CyclicWord>& alphas, double gap,
                                               const Rational& short_l0) {
    if (path.events.size() < 2) fail(ErrorCode::SpanTooShort, "path has fewer than two events");
    std::vector<double> times;
    for (const auto& ev : path.events) times.push_back(std::log(to_double(ev.time.ratio)));
    double span = times.back() - times.front();
    if (span < 2 * gap) fail(ErrorCode::SpanTooShort, "path spans less than twice the gap");

    auto nearest = [&](double t) {
        size_t best = 0;
        for (size_t i = 1; i < times.size(); ++i)
            if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
        return best;
    };

    std::vector<FlareProbeRow> rows;
    for (const auto& alpha : alphas) {
        FlareProbeRow row;
        row.alpha_text = cyclic_word_to_string(path.target->basis, alpha);
        std::vector<Rational> lengths;
        for (const auto& ev : path.events) lengths.push_back(loop_length(alpha, *ev.graph));

        std::optional<Rational> min_ratio;
        for (size_t i = 0; i < times.size(); ++i) {
            if (times[i] - gap < times.front() || times[i] + gap > times.back()) continue;
            size_t lo = nearest(times[i] - gap), hi = nearest(times[i] + gap);
            if (lo == i || hi == i) continue;
            Rational ratio = std::max(lengths[lo], lengths[hi]) / lengths[i];
            row.ratios.emplace_back(i, ratio);
            if (!min_ratio || ratio < *min_ratio) min_ratio = ratio;
        }
        row.min_ratio = min_ratio ? *min_ratio : Rational(0);

        double best_interval = 0;
        size_t i = 0;
        while (i < times.size()) {
            if (lengths[i] > short_l0) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j + 1 < times.size() && lengths[j + 1] <= short_l0) ++j;
            best_interval = std::max(best_interval, times[j] - times[i]);
            i = j + 1;
        }
        row.longest_short_interval = best_interval;
        rows.push_back(std::move(row));
    }
    return rows;
}

GrowthFit growth_fit(const Automorphism& phi, const CyclicWord& alpha, int n_max) {
    if (n_max < 4) fail(ErrorCode::BadInput, "n_max must be at least 4");
    GrowthFit fit;
    CyclicWord beta = alpha;
    for (int n = 1; n <= n_max; ++n) {
        beta = phi.apply_class(beta);
        fit.lengths.push_back(beta.length());
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n = 1; n <= n_max; ++n) {
        double x = n, y = std::log(static_cast<double>(fit.lengths[n - 1]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.exponent = (n_max * sxy - sx * sy) / (n_max * sxx - sx * sx);
    fit.min_stretch = Rational(fit.lengths[1], fit.lengths[0]);
    fit.max_stretch = fit.min_stretch;
    for (size_t i = 2; i < fit.lengths.size(); ++i) {
        Rational s(fit.lengths[i], fit.lengths[i - 1]);
        fit.min_stretch = std::min(fit.min_stretch, s);
        fit.max_stretch = std::max(fit.max_stretch, s);
    }
    return fit;
}

Integer torsion_bound(int rank) {
    Integer total = 1;
    Integer p3r = 1;
    for (int i = 0; i < rank; ++i) p3r *= 3;
    Integer p3k = 1;
    for (int k = 0; k < rank; ++k) {
        total *= (p3r - p3k);
        p3k *= 3;
    }
    return total;
}

int certify_finite_order(const Automorphism& h, int order_cap) {
    Automorphism id = Automorphism::identity(h.basis());
    Automorphism g = h;
    for (int k = 1; k <= order_cap; ++k) {
        if (out_equal(g, id).equal) return k;
        g = compose(g, h);
    }
    fail(ErrorCode::NotFiniteOrder, "no power reached the identity within the cap");
}

bool projectively_good(const std::vector<Automorphism>& finite_subgroup,
                       std::uint64_t closure_budget) {
    if (finite_subgroup.empty()) fail(ErrorCode::BadInput, "empty subgroup sample");
    const int r = finite_subgroup.front().basis().rank;
    std::vector<IntMatrix> gens;
    for (const auto& h : finite_subgroup) {
        certify_finite_order(h);
        IntMatrix m = abelianize(h);
        Integer det = m.determinant();
        if (det != 1 && det != -1) fail(ErrorCode::NonUnimodular, "determinant is not a unit");
        gens.push_back(m);
    }
    std::set<std::string> seen;
    std::deque<IntMatrix> queue;
    IntMatrix id = IntMatrix::identity(r);
    seen.insert(id.to_string());
    queue.push_back(id);
    while (!queue.empty()) {
        IntMatrix m = queue.front();
        queue.pop_front();
        if (m.is_minus_identity()) return false;
        for (const auto& g : gens) {
            IntMatrix next = m * g;
            if (seen.insert(next.to_string()).second) {
                if (seen.size() > closure_budget)
                    fail(ErrorCode::BudgetExceeded, "matrix closure budget exceeded");
                queue.push_back(next);
            }
        }
    }
    return true;
}

SubgroupSpec pingpong_spec(const std::vector<Automorphism>& finite_subgroup,
                           const Automorphism& f, int power) {
    if (power < 1) fail(ErrorCode::BadInput, "power must be at least 1");
    std::vector<Automorphism> gens;
    std::vector<std::string> names;
    for (size_t i = 0; i < finite_subgroup.size(); ++i) {
        certify_finite_order(finite_subgroup[i]);
        gens.push_back(finite_subgroup[i]);
        names.push_back("h" + std::to_string(i + 1));
    }
    Automorphism fn = Automorphism::identity(f.basis());
    for (int i = 0; i < power; ++i) fn = compose(fn, f);
    gens.push_back(fn);
    names.push_back("f^" + std::to_string(power));
    return SubgroupSpec::from_generators(std::move(gens), std::move(names));
}

int stabilizer_census(const CayleyBall& ball, const CyclicWord& alpha) {
    int count = 0;
    for (const auto& node : ball.nodes)
        if (node.rep.apply_class(alpha) == alpha) ++count;
    return count;
}

} // namespace ogt
