#pragma once

// Shared test fixtures: random automorphisms, random marked graphs, and the
// brute-force oracles the unit and acceptance suites compare against.

#include <optional>
#include <random>
#include <vector>

#include "ogt/automorphism.hpp"
#include "ogt/marked_graph.hpp"

namespace ogt::testfix {

Word random_word(std::mt19937& rng, const Basis& b, int max_len);
Automorphism random_automorphism(std::mt19937& rng, const Basis& b, int moves);

// Random volume-1 marked graph: a base shape with random rational lengths,
// twisted by a random automorphism.
MarkedGraph random_marked_graph(std::mt19937& rng, const Basis& b, int twist_moves = 3);

// Brute-force distance oracle: max of l(alpha|H)/l(alpha|G) over every
// cyclic word of length <= max_len (independent of the candidate machinery).
Rational brute_force_ratio(const MarkedGraph& g, const MarkedGraph& h, int max_len);

// Brute-force conjugacy test for subgroup containment: exists |w| <= cap
// with w A w^{-1} inside B, membership checked on the folded graph of B.
bool brute_force_conjugate_into(const Basis& b, const std::vector<Word>& a_gens,
                                const std::vector<Word>& b_gens, int cap);

} // namespace ogt::testfix
