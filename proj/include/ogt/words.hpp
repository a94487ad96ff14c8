#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ogt/errors.hpp"

namespace ogt {

// A letter is a signed generator index: +g is generator g (1-based),
// -g its inverse.  Text form uses the lowercase/uppercase convention
// ('a' = x_1, 'A' = x_1^{-1}).
using Letter = int;

inline Letter inverse_letter(Letter l) { return -l; }

// Total order used for canonical rotations: a < A < b < B < ...
inline int letter_rank(Letter l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

struct Basis {
    int rank;

    explicit Basis(int r) : rank(r) {
        if (r < 2) fail(ErrorCode::BadInput, "basis rank must be at least 2");
    }

    bool valid_letter(Letter l) const { return l != 0 && std::abs(l) <= rank; }
    char letter_char(Letter l) const;
    Letter parse_letter(char c) const;

    friend bool operator==(const Basis& a, const Basis& b) { return a.rank == b.rank; }
};

// Freely reduced word over a fixed basis.
struct Word {
    std::vector<Letter> letters;

    Word() = default;
    explicit Word(std::vector<Letter> ls) : letters(std::move(ls)) {}

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }

    Word inverse() const;

    friend bool operator==(const Word& a, const Word& b) { return a.letters == b.letters; }
    friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }
    friend bool operator<(const Word& a, const Word& b);
};

// Free reduction of an arbitrary letter sequence.
Word reduce(const std::vector<Letter>& raw);

// Reduced concatenation.
Word concat(const Word& a, const Word& b);

// u w u^{-1}, reduced.
Word conjugate(const Word& w, const Word& u);

// Strips inverse first/last pairs from a reduced word.
Word cyclic_reduce(const Word& w);

bool is_cyclically_reduced(const Word& w);

// Cyclically reduced word stored in its lexicographically least rotation.
struct CyclicWord {
    Word rep;

    CyclicWord() = default;
    // Reduces cyclically and rotates to canonical form; trivial input throws.
    explicit CyclicWord(const Word& w);

    int length() const { return rep.length(); }

    CyclicWord inverse() const { return CyclicWord(rep.inverse()); }

    friend bool operator==(const CyclicWord& a, const CyclicWord& b) { return a.rep == b.rep; }
    friend bool operator!=(const CyclicWord& a, const CyclicWord& b) { return !(a == b); }
    friend bool operator<(const CyclicWord& a, const CyclicWord& b) { return a.rep < b.rep; }
};

// Length of the cyclic reduction; throws TrivialClass on the empty class.
int conjugacy_length(const Word& w);

// Serialization: whitespace-free letter strings like "abAB".
std::string word_to_string(const Basis& basis, const Word& w);
Word parse_word(const Basis& basis, const std::string& text);
std::string cyclic_word_to_string(const Basis& basis, const CyclicWord& w);

// Emits every cyclically reduced word of length in [1, max_len] exactly once
// up to rotation, ordered by length then lexicographically by letter rank.
// Throws BudgetExceeded once more than `budget` words have been emitted.
void enumerate_cyclic_words(const Basis& basis, int max_len,
                            const std::function<void(const CyclicWord&)>& sink,
                            std::uint64_t budget = 50'000'000);

// Convenience collector for small enumerations.
std::vector<CyclicWord> all_cyclic_words(const Basis& basis, int max_len,
                                         std::uint64_t budget = 50'000'000);

} // namespace ogt
