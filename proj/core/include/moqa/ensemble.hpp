#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "moqa/problem.hpp"
#include "moqa/spectra.hpp"

namespace moqa {

struct EnsembleConfig {
    int n = 6;
    double gamma = 120.0;
    int num_instances = 1000;
    std::vector<int> p_values;
    std::uint64_t master_seed = 0;
    double shift_eta = 1.0;
    Normalization normalization = Normalization::Sum;
    std::vector<double> bin_edges;  // ascending; required by bin_by_ratio
    int workers = 0;
    double tolerance = kDegeneracyTolerance;
    int max_n = kDefaultEnumCap;
};

struct EnsembleRow {
    int n = 0;
    int p = 0;
    double epsilon = 0.0;         // fraction of instances whose recovered minimum differs
    double delta = 0.0;           // mean relative excess of the recovered minimum
    double violation_rate = 0.0;  // fraction of recovered minima violating the constraint
    double mean_r = 0.0;
    int count = 0;
};

struct BinRow {
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    int p = 0;
    double epsilon = 0.0;
    int count = 0;
    double r_star = 0.0;  // analytic guarantee threshold M^{1/p} - 1
};

struct InstanceComparison {
    int eps = 0;       // 1 iff the recovered minimum has a different max value
    double delta = 0;  // relative excess, 0 exactly when eps is 0
    int violated = 0;  // 1 iff the recovered minimizer violates the constraint
};

// Stateless, index-addressable seed derivation (splitmix64 finalizer), so
// instance i is identical whether the sweep runs serially or in parallel.
std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t index);

// Random problem statement: packed upper-triangular Q (diagonal included)
// and linear part both i.i.d. standard Gaussian, plus one linear inequality
// a^T b >= 0 with Gaussian a. Draw order: Q row-major upper triangle, then
// the linear part, then a.
ProblemInstance sample_problem(int n, double gamma, std::uint64_t seed, double eta = 1.0);

// sample_problem followed by the transform pipeline with an exact joint
// shift to margin eta; yields the shifted two-objective instance.
MultiObjective sample_instance(int n, double gamma, std::uint64_t seed, double eta = 1.0,
                               int max_n = kDefaultEnumCap);

// Compares the degree-p minimizer against the true max minimizer by their
// max-landscape values (tolerance-equal values count as recovered). Argmin
// ties break toward the smallest assignment integer. Throws DegeneracyError
// when the true minimum is within tolerance of zero.
InstanceComparison epsilon_delta(const MultiObjective& mo, int p,
                                 double tolerance = kDegeneracyTolerance,
                                 int max_n = kDefaultEnumCap);

// Aggregates epsilon/delta/violation over num_instances seeded instances
// for every requested p, rows in p order. Instance i is derived from
// split_seed(master_seed, i); output is identical for any worker count.
std::vector<EnsembleRow> sweep(const EnsembleConfig& config);

// Same ensemble, with per-instance 0-1 errors grouped into gap-ratio bins.
// Bins are [lo, hi) except the last, which includes its upper edge;
// instances outside the binned range are not counted. Rows ordered by
// (bin, p); empty bins are emitted with count 0.
std::vector<BinRow> bin_by_ratio(const EnsembleConfig& config);

// CSV, header "n,p,epsilon,delta,violation_rate,mean_r,count", floats with
// 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<EnsembleRow>& rows);

// CSV, header "bin_lo,bin_hi,p,epsilon,count,r_star".
void write_bin_csv(std::ostream& out, const std::vector<BinRow>& rows);

}  // namespace moqa
