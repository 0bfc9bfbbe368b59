#include "moqa/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "moqa/errors.hpp"

namespace moqa {

namespace {

void check_n(int n) {
    if (n < 0 || n > 64) {
        throw std::invalid_argument("variable count must be in [0, 64], got " +
                                    std::to_string(n));
    }
}

void check_same_n(const Polynomial& a, const Polynomial& b) {
    if (a.n() != b.n()) {
        throw std::invalid_argument("variable count mismatch: " + std::to_string(a.n()) +
                                    " vs " + std::to_string(b.n()));
    }
}

std::vector<Term> collect(std::unordered_map<Mask, double>&& acc, double coef_eps) {
    std::vector<Term> out;
    out.reserve(acc.size());
    for (const auto& [vars, coef] : acc) {
        if (std::abs(coef) > coef_eps) {
            out.push_back({vars, coef});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Term& a, const Term& b) { return a.vars < b.vars; });
    return out;
}

}  // namespace

Polynomial make_canonical(int n, std::vector<Term> terms, double coef_eps) {
    std::unordered_map<Mask, double> acc;
    acc.reserve(terms.size());
    for (const Term& t : terms) {
        acc[t.vars] += t.coef;
    }
    Polynomial p(n);
    p.terms_ = collect(std::move(acc), coef_eps);
    return p;
}

int Polynomial::degree() const {
    int d = 0;
    for (const Term& t : terms_) {
        d = std::max(d, std::popcount(t.vars));
    }
    return d;
}

double Polynomial::evaluate_mask(Mask assignment) const {
    double sum = 0.0;
    for (const Term& t : terms_) {
        if ((assignment & t.vars) == t.vars) {
            sum += t.coef;
        }
    }
    return sum;
}

double Polynomial::evaluate(std::span<const int> bits) const {
    if (static_cast<int>(bits.size()) != n_) {
        throw std::invalid_argument("assignment length " + std::to_string(bits.size()) +
                                    " does not match variable count " + std::to_string(n_));
    }
    Mask assignment = 0;
    for (int i = 0; i < n_; ++i) {
        if (bits[i] != 0) {
            assignment |= Mask{1} << i;
        }
    }
    return evaluate_mask(assignment);
}

Polynomial make_poly(int n, const std::vector<RawTerm>& raw_terms, double coef_eps) {
    check_n(n);
    std::vector<Term> terms;
    terms.reserve(raw_terms.size());
    for (const RawTerm& rt : raw_terms) {
        Mask vars = 0;
        for (int idx : rt.vars) {
            if (idx < 0 || idx >= n) {
                throw std::invalid_argument("variable index " + std::to_string(idx) +
                                            " out of range for n=" + std::to_string(n));
            }
            vars |= Mask{1} << idx;  // repeated indices collapse: b*b = b
        }
        terms.push_back({vars, rt.coef});
    }
    return make_canonical(n, std::move(terms), coef_eps);
}

Polynomial constant_poly(int n, double value) {
    check_n(n);
    return make_canonical(n, {{Mask{0}, value}}, kCoefEpsilon);
}

Polynomial add(const Polynomial& a, const Polynomial& b, double coef_eps) {
    check_same_n(a, b);
    std::vector<Term> terms;
    terms.reserve(a.term_count() + b.term_count());
    terms.insert(terms.end(), a.terms().begin(), a.terms().end());
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return make_canonical(a.n(), std::move(terms), coef_eps);
}

Polynomial scale(const Polynomial& p, double s, double coef_eps) {
    std::vector<Term> terms = p.terms();
    for (Term& t : terms) {
        t.coef *= s;
    }
    return make_canonical(p.n(), std::move(terms), coef_eps);
}

Polynomial multiply(const Polynomial& a, const Polynomial& b, double coef_eps,
                    std::size_t term_budget) {
    check_same_n(a, b);
    const double pairs = static_cast<double>(a.term_count()) * static_cast<double>(b.term_count());
    if (pairs > static_cast<double>(term_budget)) {
        throw CapError("symbolic product of " + std::to_string(a.term_count()) + " x " +
                       std::to_string(b.term_count()) + " terms exceeds budget " +
                       std::to_string(term_budget));
    }
    std::unordered_map<Mask, double> acc;
    acc.reserve(a.term_count() + b.term_count());
    for (const Term& ta : a.terms()) {
        for (const Term& tb : b.terms()) {
            acc[ta.vars | tb.vars] += ta.coef * tb.coef;
        }
    }
    return make_canonical(a.n(), collect(std::move(acc), coef_eps), coef_eps);
}

Polynomial power(const Polynomial& base, int p, double coef_eps, std::size_t term_budget) {
    if (p < 1) {
        throw std::invalid_argument("power exponent must be >= 1, got " + std::to_string(p));
    }
    // Projected final size: T^p terms, never more than the 2^n distinct
    // multilinear monomials.
    const double projected = std::min(
        std::pow(static_cast<double>(base.term_count()), static_cast<double>(p)),
        std::exp2(static_cast<double>(base.n())));
    if (projected > static_cast<double>(term_budget)) {
        throw CapError("projected term count for power " + std::to_string(p) +
                       " exceeds budget " + std::to_string(term_budget));
    }

    Polynomial result = constant_poly(base.n(), 1.0);
    Polynomial sq = base;
    int e = p;
    bool result_is_one = true;
    while (e > 0) {
        if (e & 1) {
            result = result_is_one ? sq : multiply(result, sq, coef_eps, term_budget);
            result_is_one = false;
        }
        e >>= 1;
        if (e > 0) {
            sq = multiply(sq, sq, coef_eps, term_budget);
        }
    }
    return result;
}

int IsingPolynomial::degree() const {
    int d = 0;
    for (const Term& t : terms_) {
        d = std::max(d, std::popcount(t.vars));
    }
    return d;
}

double IsingPolynomial::evaluate(std::span<const int> spins) const {
    if (static_cast<int>(spins.size()) != n_) {
        throw std::invalid_argument("spin vector length " + std::to_string(spins.size()) +
                                    " does not match variable count " + std::to_string(n_));
    }
    Mask negatives = 0;
    for (int i = 0; i < n_; ++i) {
        if (spins[i] == -1) {
            negatives |= Mask{1} << i;
        } else if (spins[i] != 1) {
            throw std::invalid_argument("spin entries must be +1 or -1");
        }
    }
    return evaluate_bits(negatives);
}

double IsingPolynomial::evaluate_bits(Mask assignment) const {
    // prod_{i in S} z_i with z_i = 1 - 2 b_i is (-1)^{|S & b|}
    double sum = 0.0;
    for (const Term& t : terms_) {
        const bool negative = std::popcount(t.vars & assignment) & 1;
        sum += negative ? -t.coef : t.coef;
    }
    return sum;
}

IsingPolynomial to_ising(const Polynomial& p, double coef_eps, std::size_t term_budget) {
    double work = 0.0;
    for (const Term& t : p.terms()) {
        work += std::exp2(static_cast<double>(std::popcount(t.vars)));
    }
    if (work > static_cast<double>(term_budget)) {
        throw CapError("Ising expansion work exceeds budget " + std::to_string(term_budget));
    }

    std::unordered_map<Mask, double> acc;
    acc.reserve(p.term_count());
    for (const Term& t : p.terms()) {
        // prod_{i in S} (1 - z_i)/2 = 2^{-|S|} sum_{T subseteq S} (-1)^{|T|} z_T
        const double scale = t.coef * std::exp2(-std::popcount(t.vars));
        Mask sub = t.vars;
        while (true) {
            const bool negative = std::popcount(sub) & 1;
            acc[sub] += negative ? -scale : scale;
            if (sub == 0) {
                break;
            }
            sub = (sub - 1) & t.vars;
        }
    }

    IsingPolynomial out;
    out.n_ = p.n();
    out.terms_ = collect(std::move(acc), coef_eps);
    return out;
}

}  // namespace moqa
