#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ogt/rational.hpp"
#include "ogt/words.hpp"

namespace ogt {

// Small dense integer matrix (abelianized automorphisms live in GL_r(Z)).
struct IntMatrix {
    int n = 0;
    std::vector<Integer> a; // row-major

    IntMatrix() = default;
    explicit IntMatrix(int size) : n(size), a(static_cast<size_t>(size) * size, 0) {}

    Integer& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const Integer& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static IntMatrix identity(int size);
    IntMatrix operator*(const IntMatrix& o) const;
    bool operator==(const IntMatrix& o) const { return n == o.n && a == o.a; }
    bool is_minus_identity() const;
    Integer determinant() const; // fraction-free elimination
    std::string to_string() const;
};

// An element of Aut(F_r): reduced images of the fixed basis.  Construction
// inverts the map by folding, which doubles as the certificate that the
// images really form a basis (NotAnAutomorphism otherwise).
class Automorphism {
  public:
    Automorphism(Basis basis, std::vector<Word> images);

    static Automorphism identity(const Basis& basis);
    static Automorphism inner(const Basis& basis, const Word& w);

    const Basis& basis() const { return basis_; }
    const std::vector<Word>& images() const { return images_; }
    const Word& image(int generator_index) const { return images_[generator_index]; }

    Word apply(const Word& w) const;
    CyclicWord apply_class(const CyclicWord& w) const;

    Automorphism inverse() const;
    bool is_identity() const;
    int max_image_length() const;

    friend Automorphism compose(const Automorphism& f, const Automorphism& g); // x -> f(g(x))
    friend bool operator==(const Automorphism& f, const Automorphism& g) {
        return f.basis_ == g.basis_ && f.images_ == g.images_;
    }
    friend bool operator!=(const Automorphism& f, const Automorphism& g) { return !(f == g); }

  private:
    Basis basis_;
    std::vector<Word> images_;
    std::shared_ptr<const std::vector<Word>> inverse_images_; // certificate from construction
};

IntMatrix abelianize(const Automorphism& f);

struct OutEqualResult {
    bool equal = false;
    std::optional<Word> conjugator; // psi = inner(w) . phi when equal
};

// Equality in Out(F_r): true iff psi(x) = w phi(x) w^{-1} for a common w.
// Candidate conjugators are read off the phi(x_1)/psi(x_1) mismatch and
// verified on every generator; the length cap turns the unbounded family
// into an explicit SearchBudgetExceeded.
OutEqualResult out_equal(const Automorphism& phi, const Automorphism& psi, int conjugator_cap = -1);

// Invariant of the Out class used as a hash key: canonical cyclic reductions
// of the generator images (inner twists conjugate all images at once).
std::string out_class_key(const Automorphism& f);

// File format: one `a -> a b` line per generator, `#` comments.
std::string automorphism_to_text(const Automorphism& f);
Automorphism parse_automorphism(const std::string& text);
Automorphism parse_automorphism_file(const std::string& path);

} // namespace ogt
