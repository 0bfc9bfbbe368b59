#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace moqa {

// Variable set of a monomial, bit i set <=> variable x_i present.
// Caps the variable count at 64, which is far beyond what exhaustive
// enumeration can reach anyway.
using Mask = std::uint64_t;

// Coefficients with magnitude at or below this are dropped during
// canonicalization, so cancellation cannot leave zero-term clutter.
inline constexpr double kCoefEpsilon = 1e-12;

// Refuse symbolic expansions whose projected term count (or pairwise
// product work) exceeds this. Callers fall back to numeric evaluation.
inline constexpr std::size_t kDefaultTermBudget = 5'000'000;

struct Term {
    Mask vars = 0;  // empty set encodes the constant term
    double coef = 0.0;

    friend bool operator==(const Term&, const Term&) = default;
};

// One input term as supplied by callers; repeated indices collapse by
// idempotence (x*x = x over {0,1}).
struct RawTerm {
    std::vector<int> vars;
    double coef = 0.0;
};

/// Sparse multilinear polynomial over binary variables x_0..x_{n-1}.
///
/// Canonical form: terms sorted by variable mask ascending, no two terms
/// share a mask, no stored coefficient within kCoefEpsilon of zero.
/// Instances are immutable after construction and safe to share across
/// threads.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {}

    int n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Max monomial cardinality; 0 for constants and the zero polynomial.
    int degree() const;

    // Sum over terms of coef * prod_{i in vars} b_i, with the product
    // reduced to a mask containment test.
    double evaluate_mask(Mask assignment) const;

    // Same, for an explicit bit vector. Throws std::invalid_argument on
    // length mismatch.
    double evaluate(std::span<const int> bits) const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

  private:
    int n_ = 0;
    std::vector<Term> terms_;

    friend Polynomial make_canonical(int n, std::vector<Term> terms, double coef_eps);
};

// Builds the canonical polynomial from raw terms: repeated indices within a
// term are deduplicated, duplicate monomials merge by coefficient addition.
// Throws std::invalid_argument for indices out of range or n outside [0, 64].
Polynomial make_poly(int n, const std::vector<RawTerm>& raw_terms,
                     double coef_eps = kCoefEpsilon);

Polynomial constant_poly(int n, double value);

Polynomial add(const Polynomial& a, const Polynomial& b, double coef_eps = kCoefEpsilon);
Polynomial scale(const Polynomial& p, double s, double coef_eps = kCoefEpsilon);

// Product with idempotent reduction (monomial union of variable sets).
// Throws CapError when the projected pair count exceeds term_budget.
Polynomial multiply(const Polynomial& a, const Polynomial& b,
                    double coef_eps = kCoefEpsilon,
                    std::size_t term_budget = kDefaultTermBudget);

// p-th symbolic power by square-and-multiply, canonicalizing after each
// product. Requires p >= 1. Throws CapError when the projected term count
// min(term_count^p, 2^n) or any intermediate product exceeds term_budget.
Polynomial power(const Polynomial& base, int p,
                 double coef_eps = kCoefEpsilon,
                 std::size_t term_budget = kDefaultTermBudget);

inline int degree(const Polynomial& p) { return p.degree(); }
inline std::size_t term_count(const Polynomial& p) { return p.term_count(); }

inline Polynomial operator+(const Polynomial& a, const Polynomial& b) { return add(a, b); }
inline Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return add(a, scale(b, -1.0));
}
inline Polynomial operator*(const Polynomial& a, const Polynomial& b) { return multiply(a, b); }
inline Polynomial operator*(double s, const Polynomial& p) { return scale(p, s); }
inline Polynomial operator*(const Polynomial& p, double s) { return scale(p, s); }

/// The same function expressed over spin variables z_i in {-1, +1} with
/// z_i = 1 - 2 b_i. Terms are Pauli-Z supports with real coefficients,
/// canonical in the same sense as Polynomial.
class IsingPolynomial {
  public:
    IsingPolynomial() = default;

    int n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    int degree() const;

    // Evaluate at a spin vector (entries +1 / -1).
    double evaluate(std::span<const int> spins) const;

    // Evaluate at the spin vector induced by a binary assignment:
    // bit i set means b_i = 1, i.e. z_i = -1.
    double evaluate_bits(Mask assignment) const;

    friend bool operator==(const IsingPolynomial&, const IsingPolynomial&) = default;

  private:
    int n_ = 0;
    std::vector<Term> terms_;

    friend IsingPolynomial to_ising(const Polynomial&, double, std::size_t);
};

// Substitutes b_i = (1 - z_i)/2 and expands to canonical z-basis form.
// Each source term of degree k fans out into 2^k subsets; throws CapError
// when that projected work exceeds term_budget.
IsingPolynomial to_ising(const Polynomial& p, double coef_eps = kCoefEpsilon,
                         std::size_t term_budget = kDefaultTermBudget);

}  // namespace moqa
