#include "ogt/words.hpp"

#include <algorithm>
#include <sstream>

namespace ogt {

char Basis::letter_char(Letter l) const {
    if (!valid_letter(l)) fail(ErrorCode::BadInput, "letter out of range for basis");
    int idx = std::abs(l) - 1;
    return static_cast<char>((l > 0 ? 'a' : 'A') + idx);
}

Letter Basis::parse_letter(char c) const {
    Letter l = 0;
    if (c >= 'a' && c <= 'z') l = c - 'a' + 1;
    else if (c >= 'A' && c <= 'Z') l = -(c - 'A' + 1);
    if (l == 0 || !valid_letter(l))
        fail(ErrorCode::BadInput, std::string("invalid letter '") + c + "'");
    return l;
}

Word Word::inverse() const {
    Word out;
    out.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        out.letters.push_back(inverse_letter(*it));
    return out;
}

bool operator<(const Word& a, const Word& b) {
    const size_t n = std::min(a.letters.size(), b.letters.size());
    for (size_t i = 0; i < n; ++i) {
        int ra = letter_rank(a.letters[i]), rb = letter_rank(b.letters[i]);
        if (ra != rb) return ra < rb;
    }
    return a.letters.size() < b.letters.size();
}

Word reduce(const std::vector<Letter>& raw) {
    Word out;
    out.letters.reserve(raw.size());
    for (Letter l : raw) {
        if (l == 0) fail(ErrorCode::BadInput, "zero letter");
        if (!out.letters.empty() && out.letters.back() == inverse_letter(l))
            out.letters.pop_back();
        else
            out.letters.push_back(l);
    }
    return out;
}

Word concat(const Word& a, const Word& b) {
    Word out = a;
    for (Letter l : b.letters) {
        if (!out.letters.empty() && out.letters.back() == inverse_letter(l))
            out.letters.pop_back();
        else
            out.letters.push_back(l);
    }
    return out;
}

Word conjugate(const Word& w, const Word& u) {
    return concat(concat(u, w), u.inverse());
}

Word cyclic_reduce(const Word& w) {
    size_t i = 0, j = w.letters.size();
    while (j > i + 1 && w.letters[i] == inverse_letter(w.letters[j - 1])) {
        ++i;
        --j;
    }
    return Word(std::vector<Letter>(w.letters.begin() + i, w.letters.begin() + j));
}

bool is_cyclically_reduced(const Word& w) {
    if (w.letters.size() < 2) return true;
    return w.letters.front() != inverse_letter(w.letters.back());
}

namespace {

// Booth's least-rotation algorithm on letter ranks.
size_t least_rotation(const std::vector<Letter>& s) {
    const size_t n = s.size();
    if (n <= 1) return 0;
    auto rank_at = [&](size_t i) { return letter_rank(s[i % n]); };
    size_t i = 0, j = 1, k = 0;
    while (i < n && j < n && k < n) {
        int ci = rank_at(i + k), cj = rank_at(j + k);
        if (ci == cj) {
            ++k;
            continue;
        }
        if (ci > cj) i += k + 1;
        else j += k + 1;
        if (i == j) ++j;
        k = 0;
    }
    return std::min(i, j);
}

} // namespace

CyclicWord::CyclicWord(const Word& w) {
    Word c = cyclic_reduce(reduce(w.letters));
    if (c.empty()) fail(ErrorCode::TrivialClass, "trivial conjugacy class");
    size_t r = least_rotation(c.letters);
    std::rotate(c.letters.begin(), c.letters.begin() + r, c.letters.end());
    rep = std::move(c);
}

int conjugacy_length(const Word& w) {
    Word c = cyclic_reduce(reduce(w.letters));
    if (c.empty()) fail(ErrorCode::TrivialClass, "trivial conjugacy class");
    return c.length();
}

std::string word_to_string(const Basis& basis, const Word& w) {
    std::string s;
    s.reserve(w.letters.size());
    for (Letter l : w.letters) s.push_back(basis.letter_char(l));
    return s;
}

Word parse_word(const Basis& basis, const std::string& text) {
    std::vector<Letter> raw;
    raw.reserve(text.size());
    for (char c : text) {
        if (c == ' ' || c == '\t') continue;
        if (c == '1') continue; // allows "1" for the empty word
        raw.push_back(basis.parse_letter(c));
    }
    return reduce(raw);
}

std::string cyclic_word_to_string(const Basis& basis, const CyclicWord& w) {
    return word_to_string(basis, w.rep);
}

void enumerate_cyclic_words(const Basis& basis, int max_len,
                            const std::function<void(const CyclicWord&)>& sink,
                            std::uint64_t budget) {
    if (max_len < 1) fail(ErrorCode::BudgetExceeded, "max_len must be at least 1");

    // Letters ordered by rank so the DFS emits in lexicographic order.
    std::vector<Letter> alphabet;
    for (int g = 1; g <= basis.rank; ++g) {
        alphabet.push_back(g);
        alphabet.push_back(-g);
    }

    std::uint64_t emitted = 0;
    std::vector<Letter> cur;

    auto is_canonical = [&](const std::vector<Letter>& s) {
        // Equal to its least rotation; O(n^2) on tiny n.
        const size_t n = s.size();
        for (size_t r = 1; r < n; ++r) {
            for (size_t k = 0; k < n; ++k) {
                int a = letter_rank(s[(r + k) % n]), b = letter_rank(s[k]);
                if (a != b) {
                    if (a < b) return false;
                    break;
                }
            }
        }
        return true;
    };

    // DFS over freely reduced strings of the target length; cyclic reduction
    // and canonicality are checked at the leaves.
    std::function<void(int)> grow = [&](int target) {
        if (static_cast<int>(cur.size()) == target) {
            if (cur.front() == inverse_letter(cur.back())) return;
            if (!is_canonical(cur)) return;
            if (++emitted > budget)
                fail(ErrorCode::BudgetExceeded, "cyclic word enumeration budget exceeded");
            CyclicWord cw;
            cw.rep = Word(cur);
            sink(cw);
            return;
        }
        for (Letter l : alphabet) {
            if (!cur.empty() && cur.back() == inverse_letter(l)) continue;
            // The least rotation starts with a minimal letter, so branches
            // containing anything below the current front can be pruned.
            if (!cur.empty() && letter_rank(l) < letter_rank(cur.front())) continue;
            cur.push_back(l);
            grow(target);
            cur.pop_back();
        }
    };

    for (int len = 1; len <= max_len; ++len) {
        cur.clear();
        grow(len);
    }
}

std::vector<CyclicWord> all_cyclic_words(const Basis& basis, int max_len, std::uint64_t budget) {
    std::vector<CyclicWord> out;
    enumerate_cyclic_words(basis, max_len, [&](const CyclicWord& w) { out.push_back(w); }, budget);
    return out;
}

} // namespace ogt
