#include "moqa/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "moqa/errors.hpp"
#include "parallel.hpp"

namespace moqa {

namespace {

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

// Everything sweep and bin_by_ratio need from one instance.
struct InstanceOutcome {
    double r = 0.0;
    std::vector<InstanceComparison> per_p;
};

// Single fused pass: the objective values are materialized once and every
// requested p is scanned from the same buffers, which keeps results
// bit-identical to per-p evaluation while avoiding repeated enumeration.
InstanceOutcome evaluate_instance(const MultiObjective& mo, const std::vector<int>& p_values,
                                  double tolerance, int max_n) {
    if (mo.n > max_n) {
        throw CapError("n=" + std::to_string(mo.n) + " exceeds the enumeration cap of " +
                       std::to_string(max_n));
    }
    const Mask count = Mask{1} << mo.n;
    const int m = mo.num_objectives();

    std::vector<double> values(static_cast<std::size_t>(m) * count);
    for (int k = 0; k < m; ++k) {
        const Polynomial& h = mo.objectives[k];
        double* row = values.data() + static_cast<std::size_t>(k) * count;
        for (Mask a = 0; a < count; ++a) {
            row[a] = h.evaluate_mask(a);
        }
    }

    std::vector<double> max_values(count);
    for (Mask a = 0; a < count; ++a) {
        double best = values[a];
        for (int k = 1; k < m; ++k) {
            best = std::max(best, values[static_cast<std::size_t>(k) * count + a]);
        }
        max_values[a] = best;
    }

    // The true minimum; its value is all the comparison needs, the argmin
    // tie-break (smallest assignment integer) matters only for argmin_p.
    double lambda1 = std::numeric_limits<double>::infinity();
    for (Mask a = 0; a < count; ++a) {
        lambda1 = std::min(lambda1, max_values[a]);
    }
    if (lambda1 <= tolerance) {
        throw DegeneracyError("true minimum is within tolerance of zero; increase the shift");
    }
    double lambda2 = std::numeric_limits<double>::infinity();
    for (Mask a = 0; a < count; ++a) {
        if (!nearly_equal(max_values[a], lambda1, tolerance)) {
            lambda2 = std::min(lambda2, max_values[a]);
        }
    }
    if (!std::isfinite(lambda2)) {
        throw DegeneracyError("constant max landscape: gap ratio undefined");
    }

    InstanceOutcome outcome;
    outcome.r = (lambda2 - lambda1) / lambda1;
    outcome.per_p.reserve(p_values.size());

    for (int p : p_values) {
        double best = std::numeric_limits<double>::infinity();
        Mask argmin_p = 0;
        for (Mask a = 0; a < count; ++a) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) {
                sum += int_pow(values[static_cast<std::size_t>(k) * count + a], p);
            }
            if (sum < best) {
                best = sum;
                argmin_p = a;
            }
        }
        if (!std::isfinite(best)) {
            throw DegeneracyError("power sum overflowed at p=" + std::to_string(p));
        }
        InstanceComparison cmp;
        const double recovered = max_values[argmin_p];
        if (nearly_equal(recovered, lambda1, tolerance)) {
            cmp.eps = 0;
            cmp.delta = 0.0;
        } else {
            cmp.eps = 1;
            cmp.delta = (recovered - lambda1) / lambda1;
        }
        if (mo.constraint) {
            cmp.violated = mo.constraint->evaluate_mask(argmin_p) < 0.0 ? 1 : 0;
        }
        outcome.per_p.push_back(cmp);
    }
    return outcome;
}

void validate(const EnsembleConfig& config) {
    if (config.num_instances < 1) {
        throw std::invalid_argument("num_instances must be >= 1");
    }
    if (config.p_values.empty()) {
        throw std::invalid_argument("at least one approximation level p is required");
    }
    for (int p : config.p_values) {
        if (p < 1) {
            throw std::invalid_argument("approximation levels must be >= 1");
        }
    }
}

// Per-instance results in index order; errors resurface with the instance
// index attached.
std::vector<InstanceOutcome> run_instances(const EnsembleConfig& config) {
    validate(config);
    std::vector<InstanceOutcome> outcomes(config.num_instances);
    detail::parallel_indexed(config.num_instances, config.workers, [&](std::uint64_t i) {
        try {
            const MultiObjective mo = sample_instance(
                config.n, config.gamma, split_seed(config.master_seed, i), config.shift_eta,
                config.max_n);
            outcomes[i] = evaluate_instance(mo, config.p_values, config.tolerance, config.max_n);
        } catch (const CapError& e) {
            throw CapError("instance " + std::to_string(i) + ": " + e.what());
        } catch (const DegeneracyError& e) {
            throw DegeneracyError("instance " + std::to_string(i) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError("instance " + std::to_string(i) + ": " + e.what());
        }
    });
    return outcomes;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ProblemInstance sample_problem(int n, double gamma, std::uint64_t seed, double eta) {
    if (n < 1) {
        throw std::invalid_argument("instance size must be >= 1");
    }
    if (gamma <= 0.0) {
        throw std::invalid_argument("regularization strength must be > 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> upper(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (double& q : upper) {
        q = gauss(rng);
    }
    std::vector<double> linear(n);
    for (double& c : linear) {
        c = gauss(rng);
    }
    std::vector<RawTerm> constraint_terms;
    constraint_terms.reserve(n);
    for (int i = 0; i < n; ++i) {
        constraint_terms.push_back({{i}, gauss(rng)});
    }

    ProblemInstance inst;
    inst.n = n;
    inst.gamma = gamma;
    inst.objective = qubo_objective(n, upper, linear, 0.0);
    inst.constraint = make_poly(n, constraint_terms);
    inst.shift_eta = eta;
    return inst;
}

MultiObjective sample_instance(int n, double gamma, std::uint64_t seed, double eta, int max_n) {
    return transform_instance(sample_problem(n, gamma, seed, eta), ShiftMode::Exact, max_n);
}

InstanceComparison epsilon_delta(const MultiObjective& mo, int p, double tolerance, int max_n) {
    if (p < 1) {
        throw std::invalid_argument("approximation level p must be >= 1");
    }
    return evaluate_instance(mo, {p}, tolerance, max_n).per_p.front();
}

std::vector<EnsembleRow> sweep(const EnsembleConfig& config) {
    const std::vector<InstanceOutcome> outcomes = run_instances(config);
    const double inv_count = 1.0 / static_cast<double>(config.num_instances);

    double r_sum = 0.0;
    for (const InstanceOutcome& o : outcomes) {
        r_sum += o.r;
    }

    std::vector<EnsembleRow> rows;
    rows.reserve(config.p_values.size());
    for (std::size_t pi = 0; pi < config.p_values.size(); ++pi) {
        EnsembleRow row;
        row.n = config.n;
        row.p = config.p_values[pi];
        double eps_sum = 0.0, delta_sum = 0.0, violated_sum = 0.0;
        for (const InstanceOutcome& o : outcomes) {
            eps_sum += o.per_p[pi].eps;
            delta_sum += o.per_p[pi].delta;
            violated_sum += o.per_p[pi].violated;
        }
        row.epsilon = eps_sum * inv_count;
        row.delta = delta_sum * inv_count;
        row.violation_rate = violated_sum * inv_count;
        row.mean_r = r_sum * inv_count;
        row.count = config.num_instances;
        rows.push_back(row);
    }
    return rows;
}

std::vector<BinRow> bin_by_ratio(const EnsembleConfig& config) {
    if (config.bin_edges.size() < 2) {
        throw ConfigError("bin_by_ratio needs at least two ascending bin edges");
    }
    if (!std::is_sorted(config.bin_edges.begin(), config.bin_edges.end())) {
        throw ConfigError("bin edges must be ascending");
    }
    const std::vector<InstanceOutcome> outcomes = run_instances(config);
    const std::size_t num_bins = config.bin_edges.size() - 1;

    // Two objectives by construction of the sampled instances.
    const int num_objectives = 2;

    std::vector<BinRow> rows;
    rows.reserve(num_bins * config.p_values.size());
    for (std::size_t b = 0; b < num_bins; ++b) {
        const double lo = config.bin_edges[b];
        const double hi = config.bin_edges[b + 1];
        const bool last = b + 1 == num_bins;
        for (std::size_t pi = 0; pi < config.p_values.size(); ++pi) {
            BinRow row;
            row.bin_lo = lo;
            row.bin_hi = hi;
            row.p = config.p_values[pi];
            row.r_star =
                std::pow(static_cast<double>(num_objectives), 1.0 / row.p) - 1.0;
            double eps_sum = 0.0;
            int count = 0;
            for (const InstanceOutcome& o : outcomes) {
                const bool inside = o.r >= lo && (o.r < hi || (last && o.r <= hi));
                if (inside) {
                    eps_sum += o.per_p[pi].eps;
                    ++count;
                }
            }
            row.count = count;
            row.epsilon = count > 0 ? eps_sum / count : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<EnsembleRow>& rows) {
    out << "n,p,epsilon,delta,violation_rate,mean_r,count\n";
    char buf[256];
    for (const EnsembleRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%d\n", r.n, r.p,
                      r.epsilon, r.delta, r.violation_rate, r.mean_r, r.count);
        out << buf;
    }
}

void write_bin_csv(std::ostream& out, const std::vector<BinRow>& rows) {
    out << "bin_lo,bin_hi,p,epsilon,count,r_star\n";
    char buf[256];
    for (const BinRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g,%d,%.17g\n", r.bin_lo, r.bin_hi,
                      r.p, r.epsilon, r.count, r.r_star);
        out << buf;
    }
}

}  // namespace moqa
