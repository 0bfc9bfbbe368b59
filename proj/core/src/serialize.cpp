#include "moqa/serialize.hpp"

#include <bit>
#include <exception>
#include <utility>

#include <json.hpp>

#include "moqa/errors.hpp"

namespace moqa {

namespace {

using Json = nlohmann::ordered_json;

Json poly_to_value(const Polynomial& p) {
    Json terms = Json::array();
    for (const Term& t : p.terms()) {
        Json vars = Json::array();
        for (int i = 0; i < 64; ++i) {
            if (t.vars & (Mask{1} << i)) {
                vars.push_back(i);
            }
        }
        terms.push_back({{"vars", std::move(vars)}, {"coef", t.coef}});
    }
    return Json{{"n", p.n()}, {"terms", std::move(terms)}};
}

Polynomial poly_from_value(const Json& value) {
    const int n = value.at("n").get<int>();
    std::vector<RawTerm> raw;
    for (const Json& term : value.at("terms")) {
        RawTerm rt;
        rt.vars = term.at("vars").get<std::vector<int>>();
        rt.coef = term.at("coef").get<double>();
        raw.push_back(std::move(rt));
    }
    return make_poly(n, raw);
}

Json parse(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const Json& value) { return value.dump(2) + "\n"; }

template <typename F>
auto translate_errors(F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const CapError&) {
        throw;
    } catch (const DegeneracyError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid document: ") + e.what());
    }
}

Json instance_to_value(const ProblemInstance& inst) {
    return Json{{"n", inst.n},
                {"gamma", inst.gamma},
                {"objective", poly_to_value(inst.objective)},
                {"constraint", inst.constraint ? poly_to_value(*inst.constraint) : Json()},
                {"equality", inst.equality ? poly_to_value(*inst.equality) : Json()},
                {"shift_eta", inst.shift_eta}};
}

ProblemInstance instance_from_value(const Json& value) {
    ProblemInstance inst;
    inst.n = value.at("n").get<int>();
    inst.gamma = value.at("gamma").get<double>();
    inst.objective = poly_from_value(value.at("objective"));
    if (!value.at("constraint").is_null()) {
        inst.constraint = poly_from_value(value.at("constraint"));
    }
    if (!value.at("equality").is_null()) {
        inst.equality = poly_from_value(value.at("equality"));
    }
    inst.shift_eta = value.at("shift_eta").get<double>();
    return inst;
}

Json mo_to_value(const MultiObjective& mo) {
    Json objectives = Json::array();
    for (const Polynomial& h : mo.objectives) {
        objectives.push_back(poly_to_value(h));
    }
    return Json{{"n", mo.n},
                {"gamma", mo.gamma},
                {"shift", mo.shift},
                {"objectives", std::move(objectives)},
                {"constraint", mo.constraint ? poly_to_value(*mo.constraint) : Json()}};
}

MultiObjective mo_from_value(const Json& value) {
    std::vector<Polynomial> objectives;
    for (const Json& h : value.at("objectives")) {
        objectives.push_back(poly_from_value(h));
    }
    std::optional<Polynomial> constraint;
    if (!value.at("constraint").is_null()) {
        constraint = poly_from_value(value.at("constraint"));
    }
    MultiObjective mo = make_multi_objective(std::move(objectives),
                                             value.at("gamma").get<double>(),
                                             std::move(constraint));
    mo.shift = value.at("shift").get<double>();
    return mo;
}

}  // namespace

std::string to_json(const Polynomial& p) { return dump(poly_to_value(p)); }

Polynomial polynomial_from_json(std::string_view text) {
    const Json value = parse(text);
    return translate_errors([&] { return poly_from_value(value); });
}

std::string to_json(const ProblemInstance& inst) { return dump(instance_to_value(inst)); }

ProblemInstance instance_from_json(std::string_view text) {
    const Json value = parse(text);
    return translate_errors([&] { return instance_from_value(value); });
}

std::string to_json(const MultiObjective& mo) { return dump(mo_to_value(mo)); }

MultiObjective multi_objective_from_json(std::string_view text) {
    const Json value = parse(text);
    return translate_errors([&] { return mo_from_value(value); });
}

std::string to_json(const VerificationReport& report) {
    return dump(Json{{"r_max", report.r_max},
                     {"p0", report.p0},
                     {"p_used", report.p_used},
                     {"same_ground_space", report.same_ground_space},
                     {"ground_subset", report.ground_subset},
                     {"r_p", report.r_p},
                     {"ratio_grew", report.ratio_grew},
                     {"sandwich_max_violation", report.sandwich_max_violation}});
}

VerificationReport report_from_json(std::string_view text) {
    const Json value = parse(text);
    return translate_errors([&] {
        VerificationReport report;
        report.r_max = value.at("r_max").get<double>();
        report.p0 = value.at("p0").get<double>();
        report.p_used = value.at("p_used").get<int>();
        report.same_ground_space = value.at("same_ground_space").get<bool>();
        report.ground_subset = value.at("ground_subset").get<bool>();
        report.r_p = value.at("r_p").get<double>();
        report.ratio_grew = value.at("ratio_grew").get<bool>();
        report.sandwich_max_violation = value.at("sandwich_max_violation").get<double>();
        return report;
    });
}

std::string to_json(const Spectrum& s) {
    Json ground = Json::array();
    for (Mask a : s.ground_set) {
        ground.push_back(a);
    }
    return dump(Json{{"n", s.n},
                     {"lambda1", s.lambda1},
                     {"lambda2", s.lambda2 ? Json(*s.lambda2) : Json()},
                     {"lambda_max", s.lambda_max},
                     {"ground_set", std::move(ground)},
                     {"values", Json(s.values)}});
}

MultiObjective load_multi_objective(std::string_view text, ShiftMode mode, int max_n) {
    const Json value = parse(text);
    return translate_errors([&] {
        if (value.contains("objectives")) {
            return mo_from_value(value);
        }
        if (value.contains("objective")) {
            return transform_instance(instance_from_value(value), mode, max_n);
        }
        throw ConfigError("document is neither a problem statement nor a multi-objective");
    });
}

}  // namespace moqa
