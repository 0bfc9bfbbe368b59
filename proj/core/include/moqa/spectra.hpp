#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "moqa/problem.hpp"

namespace moqa {

// Two landscape values count as equal iff |a-b| <= tol * max(1, |a|, |b|).
inline constexpr double kDegeneracyTolerance = 1e-9;

struct SpectrumOptions {
    double tolerance = kDegeneracyTolerance;
    int max_n = kDefaultEnumCap;
    bool keep_values = true;
    int workers = 0;  // 0 = available parallelism
};

bool nearly_equal(double a, double b, double tolerance = kDegeneracyTolerance);

/// Exact landscape summary over all 2^n assignments. Assignments are
/// encoded as integers with bit i holding b_i; `ground_set` lists every
/// assignment within tolerance of the minimum, ascending. `lambda2` is the
/// smallest value strictly above the minimum under the tolerance and is
/// absent for constant landscapes. `values` is retained only when
/// requested.
struct Spectrum {
    int n = 0;
    double lambda1 = 0.0;
    std::optional<double> lambda2;
    double lambda_max = 0.0;
    std::vector<Mask> ground_set;
    std::vector<double> values;
    double tolerance = kDegeneracyTolerance;  // the one used to build this summary
};

// Evaluates all 2^n assignments of `fn` and summarizes. The summary is a
// deterministic sequential scan over an index-addressed buffer, so worker
// count never changes the result. Throws CapError above options.max_n.
Spectrum enumerate_spectrum(const std::function<double(Mask)>& fn, int n,
                            const SpectrumOptions& options = {});

// Spectral gap ratio (lambda2 - lambda1) / lambda1. Requires a shifted
// landscape: throws DegeneracyError when lambda1 <= tolerance or the
// landscape is constant.
double gap_ratio(const Spectrum& s);

// (lambda2 - lambda1) / (lambda_max - lambda1), in (0, 1]; invariant under
// affine maps v -> a*v + c with a > 0. Throws DegeneracyError on constant
// landscapes.
double relative_gap(const Spectrum& s);

// The approximation-level threshold log(M) / log(r + 1): any integer
// p strictly above it guarantees exact ground-space recovery.
double recovery_threshold(int num_objectives, double r);

// Largest signed violation of the two-sided bound
//   M^{-1/p} * S_p(b)^{1/p}  <=  max_m h_m(b)  <=  S_p(b)^{1/p}
// over all assignments, where S_p is the sum of p-th powers. Normalized per
// assignment by max(1, |max value|); satisfaction means a result <= 0 up to
// rounding.
double max_sandwich_violation(const MultiObjective& mo, int p,
                              const SpectrumOptions& options = {});

/// Outcome of the ground-space recovery check on one instance. `r_max` and
/// `r_p` are the gap ratios of the max landscape and of its degree-p power
/// sum; `p0` the recovery threshold; `same_ground_space` compares ground
/// sets as sets and `ground_subset` checks containment of the power-sum
/// minima in the max minima (the meaningful direction once a degenerate
/// minimum is broken).
struct VerificationReport {
    double r_max = 0.0;
    double p0 = 0.0;
    int p_used = 0;
    bool same_ground_space = false;
    bool ground_subset = false;
    double r_p = 0.0;
    bool ratio_grew = false;
    double sandwich_max_violation = 0.0;
};

// Enumerates the max landscape and the degree-p power sum (sum
// normalization, direct numeric evaluation) and fills the report.
VerificationReport verify_recovery(const MultiObjective& mo, int p,
                                   const SpectrumOptions& options = {});

// CSV rows "assignment,value" with 17 significant digits.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace moqa
