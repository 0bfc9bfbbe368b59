#pragma once

#include <string>
#include <string_view>

#include "moqa/ensemble.hpp"
#include "moqa/problem.hpp"
#include "moqa/spectra.hpp"

namespace moqa {

// JSON forms. Serialization is deterministic: object keys keep schema
// order and polynomial terms are emitted by variable mask ascending.
// Parsers throw ConfigError on malformed input.

// {"n": int, "terms": [{"vars": [int, ...], "coef": float}, ...]};
// an empty vars list encodes the constant term.
std::string to_json(const Polynomial& p);
Polynomial polynomial_from_json(std::string_view text);

// {"n", "gamma", "objective", "constraint", "equality", "shift_eta"};
// absent constraints are null.
std::string to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(std::string_view text);

// {"n", "gamma", "shift", "objectives": [...], "constraint"}.
std::string to_json(const MultiObjective& mo);
MultiObjective multi_objective_from_json(std::string_view text);

std::string to_json(const VerificationReport& report);
VerificationReport report_from_json(std::string_view text);

// {"n", "lambda1", "lambda2" (null when absent), "lambda_max",
//  "ground_set", "values"}.
std::string to_json(const Spectrum& s);

// Sniffs whether `text` is a problem statement or an already-transformed
// multi-objective (by the "objective" vs "objectives" key) and returns the
// shifted MultiObjective either way.
MultiObjective load_multi_objective(std::string_view text, ShiftMode mode = ShiftMode::Exact,
                                    int max_n = kDefaultEnumCap);

}  // namespace moqa
