#include "moqa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "moqa/errors.hpp"

namespace moqa {

namespace {

void check_enum_cap(int n, int max_n) {
    if (n > max_n) {
        throw CapError("n=" + std::to_string(n) + " exceeds the enumeration cap of " +
                       std::to_string(max_n));
    }
}

double int_pow(double x, int p) {
    double result = 1.0;
    double sq = x;
    for (int e = p; e > 0; e >>= 1) {
        if (e & 1) {
            result *= sq;
        }
        sq *= sq;
    }
    return result;
}

}  // namespace

MultiObjective make_multi_objective(std::vector<Polynomial> objectives, double gamma,
                                    std::optional<Polynomial> constraint) {
    if (objectives.empty()) {
        throw std::invalid_argument("a multi-objective needs at least one objective");
    }
    const int n = objectives.front().n();
    for (const Polynomial& h : objectives) {
        if (h.n() != n) {
            throw std::invalid_argument("objectives must share the variable count");
        }
    }
    if (constraint && constraint->n() != n) {
        throw std::invalid_argument("constraint variable count mismatch");
    }
    MultiObjective mo;
    mo.n = n;
    mo.objectives = std::move(objectives);
    mo.gamma = gamma;
    mo.constraint = std::move(constraint);
    return mo;
}

Polynomial qubo_objective(int n, std::span<const double> upper_packed,
                          std::span<const double> linear, double constant) {
    const std::size_t expected = static_cast<std::size_t>(n) * (n + 1) / 2;
    if (upper_packed.size() != expected) {
        throw std::invalid_argument("packed upper triangle has size " +
                                    std::to_string(upper_packed.size()) + ", expected " +
                                    std::to_string(expected));
    }
    if (linear.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("linear vector length mismatch");
    }
    std::vector<RawTerm> terms;
    terms.reserve(expected + n + 1);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j, ++k) {
            terms.push_back({{i, j}, upper_packed[k]});  // i == j collapses to linear
        }
    }
    for (int i = 0; i < n; ++i) {
        terms.push_back({{i}, linear[i]});
    }
    terms.push_back({{}, constant});
    return make_poly(n, terms);
}

Polynomial penalize_equality(const Polynomial& h, const Polynomial& f, double gamma) {
    if (h.n() != f.n()) {
        throw std::invalid_argument("objective and equality constraint differ in n");
    }
    if (gamma < 0.0) {
        throw std::invalid_argument("penalty strength must be >= 0");
    }
    if (gamma == 0.0 || f.is_zero()) {
        return h;
    }
    return add(h, scale(power(f, 2), gamma));
}

MultiObjective inequality_to_objectives(const Polynomial& h, const Polynomial& g, double gamma) {
    if (h.n() != g.n()) {
        throw std::invalid_argument("objective and inequality constraint differ in n");
    }
    if (gamma <= 0.0) {
        throw std::invalid_argument("regularization strength must be > 0");
    }
    std::vector<Polynomial> objectives;
    objectives.push_back(h);
    objectives.push_back(add(h, scale(g, -gamma)));
    return make_multi_objective(std::move(objectives), gamma, g);
}

MultiObjective joint_shift_nonneg(const MultiObjective& mo, double eta, ShiftMode mode,
                                  int max_n) {
    if (eta <= 0.0) {
        throw std::invalid_argument("shift margin must be > 0");
    }
    double global_min = std::numeric_limits<double>::infinity();
    if (mode == ShiftMode::Exact) {
        check_enum_cap(mo.n, max_n);
        const Mask count = Mask{1} << mo.n;
        for (const Polynomial& h : mo.objectives) {
            for (Mask a = 0; a < count; ++a) {
                global_min = std::min(global_min, h.evaluate_mask(a));
            }
        }
    } else {
        // Each non-constant term contributes either 0 or its coefficient,
        // so the constant plus all negative coefficients bounds from below.
        for (const Polynomial& h : mo.objectives) {
            double bound = 0.0;
            for (const Term& t : h.terms()) {
                if (t.vars == 0) {
                    bound += t.coef;
                } else {
                    bound += std::min(0.0, t.coef);
                }
            }
            global_min = std::min(global_min, bound);
        }
    }

    const double c = eta - global_min;
    MultiObjective shifted = mo;
    const Polynomial offset = constant_poly(mo.n, c);
    for (Polynomial& h : shifted.objectives) {
        h = add(h, offset);
    }
    shifted.shift = mo.shift + c;
    return shifted;
}

double eval_max(const MultiObjective& mo, Mask assignment) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Polynomial& h : mo.objectives) {
        best = std::max(best, h.evaluate_mask(assignment));
    }
    return best;
}

double eval_max(const MultiObjective& mo, std::span<const int> bits) {
    if (static_cast<int>(bits.size()) != mo.n) {
        throw std::invalid_argument("assignment length does not match variable count");
    }
    Mask assignment = 0;
    for (int i = 0; i < mo.n; ++i) {
        if (bits[i] != 0) {
            assignment |= Mask{1} << i;
        }
    }
    return eval_max(mo, assignment);
}

double power_sum_value(const MultiObjective& mo, int p, Mask assignment, Normalization norm) {
    if (p < 1) {
        throw std::invalid_argument("approximation level p must be >= 1");
    }
    double sum = 0.0;
    for (const Polynomial& h : mo.objectives) {
        sum += int_pow(h.evaluate_mask(assignment), p);
    }
    if (norm == Normalization::Mean) {
        sum /= static_cast<double>(mo.num_objectives());
    }
    if (!std::isfinite(sum)) {
        throw DegeneracyError("power sum overflowed at p=" + std::to_string(p) +
                              "; the value scale is too large for this exponent");
    }
    return sum;
}

bool constraint_violated(const MultiObjective& mo, Mask assignment) {
    if (!mo.constraint) {
        throw ConfigError("no inequality constraint recorded on this instance");
    }
    return mo.constraint->evaluate_mask(assignment) < 0.0;
}

PowerSumEvaluator::PowerSumEvaluator(MultiObjective source, int p, Normalization norm,
                                     std::size_t term_budget)
    : source_(std::move(source)), p_(p), norm_(norm) {
    if (p < 1) {
        throw std::invalid_argument("approximation level p must be >= 1");
    }
    try {
        Polynomial acc = constant_poly(source_.n, 0.0);
        for (const Polynomial& h : source_.objectives) {
            acc = add(acc, power(h, p_, kCoefEpsilon, term_budget));
        }
        if (norm_ == Normalization::Mean) {
            acc = scale(acc, 1.0 / static_cast<double>(source_.num_objectives()));
        }
        symbolic_ = std::move(acc);
    } catch (const CapError&) {
        symbolic_.reset();  // numeric evaluation remains available
    }
}

double PowerSumEvaluator::direct_value(Mask assignment) const {
    return power_sum_value(source_, p_, assignment, norm_);
}

double PowerSumEvaluator::value(Mask assignment) const {
    if (symbolic_) {
        return symbolic_->evaluate_mask(assignment);
    }
    return direct_value(assignment);
}

PowerSumEvaluator build_power_sum(const MultiObjective& mo, int p, Normalization norm,
                                  std::size_t term_budget) {
    return PowerSumEvaluator(mo, p, norm, term_budget);
}

MultiObjective transform_instance(const ProblemInstance& inst, ShiftMode mode, int max_n) {
    Polynomial h = inst.objective;
    if (inst.equality) {
        h = penalize_equality(h, *inst.equality, inst.gamma);
    }
    MultiObjective mo;
    if (inst.constraint) {
        mo = inequality_to_objectives(h, *inst.constraint, inst.gamma);
    } else {
        mo = make_multi_objective({h}, inst.gamma);
    }
    return joint_shift_nonneg(mo, inst.shift_eta, mode, max_n);
}

}  // namespace moqa
