#pragma once

#include <optional>
#include <span>
#include <vector>

#include "moqa/poly.hpp"

namespace moqa {

// Exhaustive-enumeration cap: 2^n values is the cost of every exact
// operation below, so n is bounded here rather than at the 64-bit mask cap.
inline constexpr int kDefaultEnumCap = 26;

enum class Normalization { Sum, Mean };
enum class ShiftMode { Exact, Bound };

/// Ordered set of objectives sharing one variable space, minimized through
/// their pointwise maximum. `shift` records the joint additive constant
/// already folded into every objective; `constraint` keeps the inequality
/// polynomial g (feasible iff g(b) >= 0) for violation checks.
struct MultiObjective {
    int n = 0;
    std::vector<Polynomial> objectives;
    double shift = 0.0;
    double gamma = 0.0;
    std::optional<Polynomial> constraint;

    int num_objectives() const { return static_cast<int>(objectives.size()); }
};

// Validates that all objectives share n and M >= 1.
MultiObjective make_multi_objective(std::vector<Polynomial> objectives, double gamma = 0.0,
                                    std::optional<Polynomial> constraint = std::nullopt);

/// A problem statement before any transform: minimize `objective` subject
/// to `constraint`(b) >= 0 and `equality`(b) = 0 (either may be absent).
struct ProblemInstance {
    int n = 0;
    double gamma = 0.0;
    Polynomial objective;
    std::optional<Polynomial> constraint;
    std::optional<Polynomial> equality;
    double shift_eta = 1.0;
};

// Sum_{i<=j} Q_ij x_i x_j + sum_i c_i x_i + constant, with diagonal terms
// collapsed into linear ones by idempotence. `upper_packed` is the upper
// triangle including the diagonal, row-major, size n(n+1)/2.
Polynomial qubo_objective(int n, std::span<const double> upper_packed,
                          std::span<const double> linear, double constant);

// h + gamma * f^2. Requires gamma >= 0 and matching n.
Polynomial penalize_equality(const Polynomial& h, const Polynomial& f, double gamma);

// Recasts minimize h s.t. g >= 0 as the two-objective problem
// max{h, h - gamma*g}, which equals h + gamma*max{0, -g} pointwise.
// Returns the unshifted pair with g recorded; requires gamma > 0.
MultiObjective inequality_to_objectives(const Polynomial& h, const Polynomial& g, double gamma);

// Adds one constant c to every objective so that min over all assignments
// and objectives becomes exactly eta (Exact) or at least eta (Bound, using
// the sum of negative coefficients as a cheap lower bound). The argmin of
// the pointwise maximum is unchanged. Exact mode enumerates 2^n values.
MultiObjective joint_shift_nonneg(const MultiObjective& mo, double eta,
                                  ShiftMode mode = ShiftMode::Exact,
                                  int max_n = kDefaultEnumCap);

// Pointwise maximum of the objective evaluations.
double eval_max(const MultiObjective& mo, Mask assignment);
double eval_max(const MultiObjective& mo, std::span<const int> bits);

// Direct numeric sum of p-th powers of the objective values (divided by M
// in Mean mode), with no symbolic expansion. Throws DegeneracyError when
// the result overflows to a non-finite value.
double power_sum_value(const MultiObjective& mo, int p, Mask assignment,
                       Normalization norm = Normalization::Sum);

// True iff the recorded constraint evaluates negative. Throws ConfigError
// when no constraint was recorded.
bool constraint_violated(const MultiObjective& mo, Mask assignment);

/// Degree-p approximation of the max objective: the sum (or mean) of p-th
/// powers of the shifted objectives. Carries the symbolic expansion when it
/// fits within the term budget; evaluation falls back to the direct numeric
/// path otherwise.
class PowerSumEvaluator {
  public:
    PowerSumEvaluator(MultiObjective source, int p, Normalization norm,
                      std::size_t term_budget = kDefaultTermBudget);

    double value(Mask assignment) const;
    double direct_value(Mask assignment) const;

    const MultiObjective& source() const { return source_; }
    int p() const { return p_; }
    Normalization normalization() const { return norm_; }
    const std::optional<Polynomial>& symbolic() const { return symbolic_; }

  private:
    MultiObjective source_;
    int p_ = 1;
    Normalization norm_ = Normalization::Sum;
    std::optional<Polynomial> symbolic_;
};

PowerSumEvaluator build_power_sum(const MultiObjective& mo, int p,
                                  Normalization norm = Normalization::Sum,
                                  std::size_t term_budget = kDefaultTermBudget);

// Full pipeline from a problem statement to a shifted MultiObjective:
// equality penalty, then inequality-to-max recast, then the joint shift
// with margin shift_eta.
MultiObjective transform_instance(const ProblemInstance& inst,
                                  ShiftMode mode = ShiftMode::Exact,
                                  int max_n = kDefaultEnumCap);

}  // namespace moqa
