#include "moqa/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "moqa/errors.hpp"
#include "parallel.hpp"

namespace moqa {

namespace {

void check_cap(int n, int max_n) {
    if (n < 0 || n > max_n) {
        throw CapError("n=" + std::to_string(n) + " exceeds the enumeration cap of " +
                       std::to_string(max_n));
    }
}

std::vector<double> evaluate_all(const std::function<double(Mask)>& fn, int n, int workers) {
    const Mask count = Mask{1} << n;
    std::vector<double> values(count);
    detail::parallel_chunks(count, workers, [&](int, Mask first, Mask last) {
        for (Mask a = first; a < last; ++a) {
            values[a] = fn(a);
        }
    });
    return values;
}

Spectrum summarize(int n, std::vector<double> values, const SpectrumOptions& options) {
    Spectrum s;
    s.n = n;
    s.tolerance = options.tolerance;
    s.lambda1 = std::numeric_limits<double>::infinity();
    s.lambda_max = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        s.lambda1 = std::min(s.lambda1, v);
        s.lambda_max = std::max(s.lambda_max, v);
    }
    double second = std::numeric_limits<double>::infinity();
    for (Mask a = 0; a < values.size(); ++a) {
        const double v = values[a];
        if (nearly_equal(v, s.lambda1, options.tolerance)) {
            s.ground_set.push_back(a);
        } else {
            second = std::min(second, v);
        }
    }
    if (std::isfinite(second)) {
        s.lambda2 = second;
    }
    if (options.keep_values) {
        s.values = std::move(values);
    }
    return s;
}

double pth_root(double v, int p) { return std::pow(v, 1.0 / static_cast<double>(p)); }

}  // namespace

bool nearly_equal(double a, double b, double tolerance) {
    return std::abs(a - b) <= tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

Spectrum enumerate_spectrum(const std::function<double(Mask)>& fn, int n,
                            const SpectrumOptions& options) {
    check_cap(n, options.max_n);
    return summarize(n, evaluate_all(fn, n, options.workers), options);
}

double gap_ratio(const Spectrum& s) {
    if (!s.lambda2) {
        throw DegeneracyError("gap ratio undefined on a constant landscape");
    }
    if (s.lambda1 <= s.tolerance) {
        throw DegeneracyError("gap ratio undefined for lambda1 <= tolerance; shift first");
    }
    return (*s.lambda2 - s.lambda1) / s.lambda1;
}

double relative_gap(const Spectrum& s) {
    if (!s.lambda2) {
        throw DegeneracyError("relative gap undefined on a constant landscape");
    }
    return (*s.lambda2 - s.lambda1) / (s.lambda_max - s.lambda1);
}

double recovery_threshold(int num_objectives, double r) {
    if (num_objectives < 1) {
        throw std::invalid_argument("objective count must be >= 1");
    }
    if (r <= 0.0) {
        throw std::invalid_argument("gap ratio must be > 0");
    }
    return std::log(static_cast<double>(num_objectives)) / std::log1p(r);
}

double max_sandwich_violation(const MultiObjective& mo, int p, const SpectrumOptions& options) {
    check_cap(mo.n, options.max_n);
    if (p < 1) {
        throw std::invalid_argument("approximation level p must be >= 1");
    }
    const double m_factor =
        std::pow(static_cast<double>(mo.num_objectives()), -1.0 / static_cast<double>(p));
    const Mask count = Mask{1} << mo.n;

    // max() over chunks is associative, so the reduction order cannot matter
    std::vector<double> chunk_max(detail::resolve_workers(options.workers),
                                  -std::numeric_limits<double>::infinity());
    detail::parallel_chunks(count, options.workers, [&](int w, Mask first, Mask last) {
        double worst = -std::numeric_limits<double>::infinity();
        for (Mask a = first; a < last; ++a) {
            const double max_value = eval_max(mo, a);
            const double root = pth_root(power_sum_value(mo, p, a, Normalization::Sum), p);
            const double lower = m_factor * root - max_value;
            const double upper = max_value - root;
            const double scale = std::max(1.0, std::abs(max_value));
            worst = std::max(worst, std::max(lower, upper) / scale);
        }
        chunk_max[w] = std::max(chunk_max[w], worst);
    });
    return *std::max_element(chunk_max.begin(), chunk_max.end());
}

VerificationReport verify_recovery(const MultiObjective& mo, int p,
                                   const SpectrumOptions& options) {
    check_cap(mo.n, options.max_n);
    if (p < 1) {
        throw std::invalid_argument("approximation level p must be >= 1");
    }
    SpectrumOptions opts = options;
    opts.keep_values = true;

    const Spectrum s_max =
        enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, mo.n, opts);
    const Spectrum s_p = enumerate_spectrum(
        [&](Mask a) { return power_sum_value(mo, p, a, Normalization::Sum); }, mo.n, opts);

    VerificationReport report;
    report.p_used = p;
    report.r_max = gap_ratio(s_max);
    report.p0 = recovery_threshold(mo.num_objectives(), report.r_max);
    report.r_p = gap_ratio(s_p);
    report.ratio_grew = report.r_p >= report.r_max;
    report.same_ground_space = s_p.ground_set == s_max.ground_set;
    report.ground_subset = std::includes(s_max.ground_set.begin(), s_max.ground_set.end(),
                                         s_p.ground_set.begin(), s_p.ground_set.end());

    const double m_factor =
        std::pow(static_cast<double>(mo.num_objectives()), -1.0 / static_cast<double>(p));
    double worst = -std::numeric_limits<double>::infinity();
    for (Mask a = 0; a < s_max.values.size(); ++a) {
        const double max_value = s_max.values[a];
        const double root = pth_root(s_p.values[a], p);
        const double scale = std::max(1.0, std::abs(max_value));
        worst = std::max(worst, std::max(m_factor * root - max_value, max_value - root) / scale);
    }
    report.sandwich_max_violation = worst;
    return report;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "assignment,value\n";
    char buf[64];
    for (Mask a = 0; a < s.values.size(); ++a) {
        std::snprintf(buf, sizeof(buf), "%llu,%.17g\n", static_cast<unsigned long long>(a),
                      s.values[a]);
        out << buf;
    }
}

}  // namespace moqa
