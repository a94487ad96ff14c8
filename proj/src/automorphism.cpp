#include "ogt/automorphism.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ogt/stallings.hpp"

namespace ogt {

IntMatrix IntMatrix::identity(int size) {
    IntMatrix m(size);
    for (int i = 0; i < size; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    IntMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Integer& v = at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += v * o.at(k, j);
        }
    return out;
}

bool IntMatrix::is_minus_identity() const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (at(i, j) != (i == j ? -1 : 0)) return false;
    return true;
}

Integer IntMatrix::determinant() const {
    // Bareiss fraction-free elimination.
    IntMatrix m = *this;
    Integer denom = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(pivot, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Integer v = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = v / denom;
            }
        denom = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < n; ++i) {
        os << "[";
        for (int j = 0; j < n; ++j) os << at(i, j) << (j + 1 < n ? "," : "");
        os << "]" << (i + 1 < n ? "," : "");
    }
    os << "]";
    return os.str();
}

Automorphism::Automorphism(Basis basis, std::vector<Word> images)
    : basis_(basis), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != basis_.rank)
        fail(ErrorCode::BadInput, "need one image per generator");
    for (auto& w : images_) w = reduce(w.letters);
    inverse_images_ = std::make_shared<const std::vector<Word>>(invert_basis_map(basis_, images_));
}

Automorphism Automorphism::identity(const Basis& basis) {
    std::vector<Word> images;
    for (int g = 1; g <= basis.rank; ++g) images.push_back(Word({g}));
    return Automorphism(basis, std::move(images));
}

Automorphism Automorphism::inner(const Basis& basis, const Word& w) {
    std::vector<Word> images;
    for (int g = 1; g <= basis.rank; ++g) images.push_back(conjugate(Word({g}), w));
    return Automorphism(basis, std::move(images));
}

Word Automorphism::apply(const Word& w) const {
    std::vector<Letter> raw;
    for (Letter l : w.letters) {
        const Word& img = images_[std::abs(l) - 1];
        if (l > 0)
            raw.insert(raw.end(), img.letters.begin(), img.letters.end());
        else {
            for (auto it = img.letters.rbegin(); it != img.letters.rend(); ++it)
                raw.push_back(inverse_letter(*it));
        }
    }
    return reduce(raw);
}

CyclicWord Automorphism::apply_class(const CyclicWord& w) const { return CyclicWord(apply(w.rep)); }

Automorphism Automorphism::inverse() const { return Automorphism(basis_, *inverse_images_); }

bool Automorphism::is_identity() const {
    for (int g = 1; g <= basis_.rank; ++g)
        if (images_[g - 1].letters != std::vector<Letter>{g}) return false;
    return true;
}

int Automorphism::max_image_length() const {
    int m = 0;
    for (const auto& w : images_) m = std::max(m, w.length());
    return m;
}

Automorphism compose(const Automorphism& f, const Automorphism& g) {
    if (!(f.basis_ == g.basis_)) fail(ErrorCode::BadInput, "basis mismatch");
    std::vector<Word> images;
    images.reserve(g.images_.size());
    for (const auto& w : g.images_) images.push_back(f.apply(w));
    return Automorphism(f.basis_, std::move(images));
}

IntMatrix abelianize(const Automorphism& f) {
    const int r = f.basis().rank;
    IntMatrix m(r);
    for (int j = 0; j < r; ++j)
        for (Letter l : f.image(j).letters) m.at(std::abs(l) - 1, j) += (l > 0 ? 1 : -1);
    return m;
}

namespace {

// Primitive root of a cyclically reduced word: the word is root^(n/p) for
// the smallest period p.
Word primitive_root(const Word& w) {
    const int n = w.length();
    for (int p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int i = 0; ok && i + p < n; ++i)
            if (w.letters[i] != w.letters[i + p]) ok = false;
        if (ok) return Word(std::vector<Letter>(w.letters.begin(), w.letters.begin() + p));
    }
    return w;
}

// Splits w = p * c * p^{-1} with c cyclically reduced; returns (p, c).
std::pair<Word, Word> conjugation_split(const Word& w) {
    size_t i = 0, j = w.letters.size();
    while (j > i + 1 && w.letters[i] == inverse_letter(w.letters[j - 1])) {
        ++i;
        --j;
    }
    Word prefix(std::vector<Letter>(w.letters.begin(), w.letters.begin() + i));
    Word core(std::vector<Letter>(w.letters.begin() + i, w.letters.begin() + j));
    return {prefix, core};
}

bool verify_conjugator(const Automorphism& phi, const Automorphism& psi, const Word& w) {
    for (int j = 0; j < phi.basis().rank; ++j)
        if (conjugate(phi.image(j), w) != psi.image(j)) return false;
    return true;
}

} // namespace

OutEqualResult out_equal(const Automorphism& phi, const Automorphism& psi, int conjugator_cap) {
    if (!(phi.basis() == psi.basis())) fail(ErrorCode::BadInput, "basis mismatch");
    if (conjugator_cap < 0)
        conjugator_cap = 2 * std::max(phi.max_image_length(), psi.max_image_length()) + 4;

    if (!(abelianize(phi) == abelianize(psi))) return {false, std::nullopt};

    // Any witness satisfies w phi(x_1) w^{-1} = psi(x_1).  With
    // phi(x_1) = p u p^{-1} and psi(x_1) = q v q^{-1} (u, v cyclically
    // reduced), v must be a rotation of u and the solutions are exactly
    // w = q c_k^{-1} rho^m p^{-1}, rho the primitive root of u.
    auto [p, u] = conjugation_split(phi.image(0));
    auto [q, v] = conjugation_split(psi.image(0));
    if (u.length() != v.length()) return {false, std::nullopt};

    const int n = u.length();
    Word rho = primitive_root(u);
    const int period = rho.length();
    int k0 = -1;
    for (int k = 0; k < period; ++k) {
        bool match = true;
        for (int i = 0; match && i < n; ++i)
            if (u.letters[(k + i) % n] != v.letters[i]) match = false;
        if (match) {
            k0 = k;
            break;
        }
    }
    if (k0 < 0) return {false, std::nullopt};

    Word c_k(std::vector<Letter>(u.letters.begin(), u.letters.begin() + k0));
    Word base = concat(q, c_k.inverse());
    Word p_inv = p.inverse();

    // |rho^m| grows linearly, so the cap bounds the m range.
    const int m_range = conjugator_cap / period + 2;
    bool truncated = false;
    std::optional<Word> best;
    for (int m = -m_range; m <= m_range; ++m) {
        Word mid = base;
        Word step = (m >= 0) ? rho : rho.inverse();
        for (int i = 0; i < std::abs(m); ++i) mid = concat(mid, step);
        Word w = concat(mid, p_inv);
        if (w.length() > conjugator_cap) {
            truncated = true;
            continue;
        }
        if (verify_conjugator(phi, psi, w)) {
            if (!best || w.length() < best->length() || (w.length() == best->length() && w < *best))
                best = w;
        }
    }
    if (best) return {true, best};
    if (truncated)
        fail(ErrorCode::SearchBudgetExceeded,
             "conjugator family not exhausted within length cap " + std::to_string(conjugator_cap));
    return {false, std::nullopt};
}

std::string out_class_key(const Automorphism& f) {
    std::ostringstream os;
    for (int j = 0; j < f.basis().rank; ++j) {
        try {
            os << cyclic_word_to_string(f.basis(), CyclicWord(f.image(j))) << "|";
        } catch (const Error&) {
            os << "1|"; // trivial image cannot occur for automorphisms
        }
    }
    return os.str();
}

std::string automorphism_to_text(const Automorphism& f) {
    std::ostringstream os;
    for (int j = 0; j < f.basis().rank; ++j) {
        os << f.basis().letter_char(j + 1) << " ->";
        for (Letter l : f.image(j).letters) os << " " << f.basis().letter_char(l);
        os << "\n";
    }
    return os.str();
}

Automorphism parse_automorphism(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<char, std::string>> rows;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto arrow = line.find("->");
        if (arrow == std::string::npos) continue;
        std::string lhs = line.substr(0, arrow), rhs = line.substr(arrow + 2);
        char gen = 0;
        for (char c : lhs)
            if (!isspace(static_cast<unsigned char>(c))) {
                gen = c;
                break;
            }
        if (gen == 0) fail(ErrorCode::BadInput, "missing generator on line: " + line);
        std::string img;
        for (char c : rhs)
            if (!isspace(static_cast<unsigned char>(c))) img.push_back(c);
        rows.emplace_back(gen, img);
    }
    if (rows.size() < 2) fail(ErrorCode::BadInput, "automorphism file needs at least two generators");
    Basis basis(static_cast<int>(rows.size()));
    std::vector<Word> images(rows.size());
    std::vector<bool> seen(rows.size(), false);
    for (auto& [gen, img] : rows) {
        Letter l = basis.parse_letter(gen);
        if (l < 0 || seen[l - 1]) fail(ErrorCode::BadInput, "bad generator row");
        seen[l - 1] = true;
        images[l - 1] = parse_word(basis, img);
    }
    return Automorphism(basis, std::move(images));
}

Automorphism parse_automorphism_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_automorphism(ss.str());
}

} // namespace ogt
