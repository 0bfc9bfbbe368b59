// moqa: command-line front end for the MOQA library. Subcommands generate
// random constrained instances, apply the multi-objective transforms, build
// degree-p approximations, enumerate landscapes, verify recovery, and run
// ensemble experiments. Every output file gets a sibling
// <out>.manifest.json; passing a manifest back through --config reruns the
// command with the identical resolved configuration.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "moqa/ensemble.hpp"
#include "moqa/errors.hpp"
#include "moqa/problem.hpp"
#include "moqa/serialize.hpp"
#include "moqa/spectra.hpp"
#include "moqa/version.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace moqa;

constexpr int kExitConfig = 1;
constexpr int kExitCap = 2;
constexpr int kExitDegenerate = 3;

std::string now_iso8601() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open input file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file: " + path);
    }
    out << content;
    if (!out) {
        throw ConfigError("write failed: " + path);
    }
}

void write_manifest(const std::string& out_path, const std::string& cmd, const Json& config,
                    std::uint64_t seed) {
    const Json manifest{{"cmd", cmd},
                        {"config", config},
                        {"version", std::string(kVersion)},
                        {"seed", seed},
                        {"timestamp", now_iso8601()}};
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

// Values resolved with precedence: explicit flag > config file > default.
// --config accepts either a bare config object or a manifest (the inner
// "config" object is used), so reruns are one flag away.
class ConfigLayer {
  public:
    void load(const std::string& path) {
        Json doc;
        try {
            doc = Json::parse(read_file(path));
        } catch (const Json::exception& e) {
            throw ConfigError("invalid config JSON: " + std::string(e.what()));
        }
        if (doc.contains("config") && doc["config"].is_object()) {
            doc = doc["config"];
        }
        if (!doc.is_object()) {
            throw ConfigError("config file must hold a JSON object");
        }
        cfg_ = doc;
    }

    template <typename T>
    T resolve(const CLI::Option* opt, const T& cli_value, const char* key, const T& def) const {
        if (opt != nullptr && opt->count() > 0) {
            return cli_value;
        }
        if (cfg_.contains(key)) {
            try {
                return cfg_.at(key).get<T>();
            } catch (const Json::exception& e) {
                throw ConfigError("config key '" + std::string(key) + "': " + e.what());
            }
        }
        return def;
    }

  private:
    Json cfg_ = Json::object();
};

Normalization parse_norm(const std::string& name) {
    if (name == "sum") {
        return Normalization::Sum;
    }
    if (name == "mean") {
        return Normalization::Mean;
    }
    throw ConfigError("--norm must be 'sum' or 'mean', got '" + name + "'");
}

ShiftMode parse_shift_mode(const std::string& name) {
    if (name == "exact") {
        return ShiftMode::Exact;
    }
    if (name == "bound") {
        return ShiftMode::Bound;
    }
    throw ConfigError("--shift-mode must be 'exact' or 'bound', got '" + name + "'");
}

std::string require_out(const std::string& out) {
    if (out.empty()) {
        throw ConfigError("--out is required");
    }
    return out;
}

// Shared options for the ensemble subcommands; the p list merges repeated
// --p flags with an optional [--p-min, --p-max] range.
struct EnsembleArgs {
    std::vector<int> p_list;
    int p_min = 0;
    int p_max = 0;
    int n = 0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    int num_instances = 0;
    double eta = 0.0;
    std::string norm;
    int workers = 0;
    std::vector<double> bins;
    std::string out;

    CLI::Option* opt_p = nullptr;
    CLI::Option* opt_p_min = nullptr;
    CLI::Option* opt_p_max = nullptr;
    CLI::Option* opt_n = nullptr;
    CLI::Option* opt_gamma = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_num = nullptr;
    CLI::Option* opt_eta = nullptr;
    CLI::Option* opt_norm = nullptr;
    CLI::Option* opt_workers = nullptr;
    CLI::Option* opt_bins = nullptr;
    CLI::Option* opt_out = nullptr;

    void attach(CLI::App* cmd, bool with_bins) {
        opt_n = cmd->add_option("--n", n, "Number of binary variables");
        opt_gamma = cmd->add_option("--gamma", gamma, "Constraint regularization strength");
        opt_seed = cmd->add_option("--seed", seed, "Master seed for the ensemble");
        opt_num = cmd->add_option("--num-instances", num_instances, "Instances to sample");
        opt_p = cmd->add_option("--p", p_list, "Approximation level(s); repeatable");
        opt_p_min = cmd->add_option("--p-min", p_min, "Start of an inclusive p range");
        opt_p_max = cmd->add_option("--p-max", p_max, "End of an inclusive p range");
        opt_eta = cmd->add_option("--eta", eta, "Joint shift margin");
        opt_norm = cmd->add_option("--norm", norm, "Power-sum normalization: sum|mean");
        opt_workers = cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
        if (with_bins) {
            opt_bins = cmd->add_option("--bins", bins, "Gap-ratio bin edges, ascending")
                           ->delimiter(',');
        }
        opt_out = cmd->add_option("--out", out, "Output CSV path");
    }

    EnsembleConfig resolve(const ConfigLayer& layer, bool with_bins) const {
        EnsembleConfig config;
        config.n = layer.resolve(opt_n, n, "n", 6);
        config.gamma = layer.resolve(opt_gamma, gamma, "gamma", 120.0);
        config.master_seed = layer.resolve(opt_seed, seed, "seed", std::uint64_t{0});
        config.num_instances = layer.resolve(opt_num, num_instances, "num_instances", 1000);
        config.shift_eta = layer.resolve(opt_eta, eta, "eta", 1.0);
        config.normalization = parse_norm(layer.resolve(opt_norm, norm, "norm",
                                                        std::string("sum")));
        config.workers = layer.resolve(opt_workers, workers, "workers", 0);
        if (with_bins) {
            config.bin_edges = layer.resolve(opt_bins, bins, "bins", std::vector<double>{});
        }

        config.p_values = layer.resolve(opt_p, p_list, "p", std::vector<int>{});
        const int lo = layer.resolve(opt_p_min, p_min, "p_min", 0);
        const int hi = layer.resolve(opt_p_max, p_max, "p_max", 0);
        if (lo > 0 || hi > 0) {
            if (lo < 1 || hi < lo) {
                throw ConfigError("--p-min/--p-max must satisfy 1 <= p-min <= p-max");
            }
            for (int p = lo; p <= hi; ++p) {
                config.p_values.push_back(p);
            }
        }
        std::sort(config.p_values.begin(), config.p_values.end());
        config.p_values.erase(
            std::unique(config.p_values.begin(), config.p_values.end()),
            config.p_values.end());
        if (config.p_values.empty()) {
            throw ConfigError("no approximation levels given; use --p or --p-min/--p-max");
        }
        return config;
    }

    Json manifest_config(const EnsembleConfig& config, const std::string& out_path,
                         bool with_bins) const {
        Json m{{"n", config.n},
               {"gamma", config.gamma},
               {"seed", config.master_seed},
               {"num_instances", config.num_instances},
               {"p", config.p_values},
               {"eta", config.shift_eta},
               {"norm", config.normalization == Normalization::Sum ? "sum" : "mean"},
               {"workers", config.workers},
               {"out", out_path}};
        if (with_bins) {
            m["bins"] = config.bin_edges;
        }
        return m;
    }
};

int run_gen(const ConfigLayer& layer, const CLI::Option* opt_n, int n,
            const CLI::Option* opt_gamma, double gamma, const CLI::Option* opt_seed,
            std::uint64_t seed, const CLI::Option* opt_eta, double eta,
            const CLI::Option* opt_out, const std::string& out) {
    const int r_n = layer.resolve(opt_n, n, "n", 6);
    const double r_gamma = layer.resolve(opt_gamma, gamma, "gamma", 120.0);
    const std::uint64_t r_seed = layer.resolve(opt_seed, seed, "seed", std::uint64_t{0});
    const double r_eta = layer.resolve(opt_eta, eta, "eta", 1.0);
    const std::string r_out = require_out(layer.resolve(opt_out, out, "out", std::string()));

    const ProblemInstance inst = sample_problem(r_n, r_gamma, r_seed, r_eta);
    write_file(r_out, to_json(inst));
    write_manifest(r_out, "gen",
                   Json{{"n", r_n}, {"gamma", r_gamma}, {"seed", r_seed}, {"eta", r_eta},
                        {"out", r_out}},
                   r_seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MOQA: max-of-objectives approximation toolkit for constrained binary "
                 "optimization"};
    app.require_subcommand(1);

    std::string config_path;

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Sample a random constrained QUBO instance");
    gen->add_option("--config", config_path, "JSON config or manifest to rerun");
    int gen_n = 0;
    double gen_gamma = 0.0, gen_eta = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen_opt_n = gen->add_option("--n", gen_n, "Number of binary variables");
    auto* gen_opt_gamma = gen->add_option("--gamma", gen_gamma, "Regularization strength");
    auto* gen_opt_seed = gen->add_option("--seed", gen_seed, "Instance seed");
    auto* gen_opt_eta = gen->add_option("--eta", gen_eta, "Joint shift margin");
    auto* gen_opt_out = gen->add_option("--out", gen_out, "Instance JSON path");

    // --- transform ---------------------------------------------------------
    auto* transform = app.add_subcommand(
        "transform", "Apply the equality/inequality transforms and the joint shift");
    transform->add_option("--config", config_path, "JSON config or manifest to rerun");
    std::string tr_in, tr_out, tr_mode;
    double tr_eta = 0.0;
    auto* tr_opt_in = transform->add_option("--in", tr_in, "Instance JSON");
    auto* tr_opt_eta =
        transform->add_option("--eta", tr_eta, "Override the instance shift margin");
    auto* tr_opt_mode =
        transform->add_option("--shift-mode", tr_mode, "Shift mode: exact|bound");
    auto* tr_opt_out = transform->add_option("--out", tr_out, "Multi-objective JSON path");

    // --- build -------------------------------------------------------------
    auto* build = app.add_subcommand(
        "build", "Emit the degree-p power sum symbolically (JSON or Ising CSV)");
    build->add_option("--config", config_path, "JSON config or manifest to rerun");
    std::string b_in, b_out, b_norm, b_format;
    int b_p = 0;
    std::uint64_t b_budget = 0;
    auto* b_opt_in = build->add_option("--in", b_in, "Instance or multi-objective JSON");
    auto* b_opt_p = build->add_option("--p", b_p, "Approximation level");
    auto* b_opt_norm = build->add_option("--norm", b_norm, "Normalization: sum|mean");
    auto* b_opt_format =
        build->add_option("--format", b_format, "json (binary basis) or csv (Ising terms)");
    auto* b_opt_budget =
        build->add_option("--term-budget", b_budget, "Symbolic term budget");
    auto* b_opt_out = build->add_option("--out", b_out, "Output path");

    // --- spectrum ----------------------------------------------------------
    auto* spectrum = app.add_subcommand(
        "spectrum", "Enumerate a landscape: the max objective, or its degree-p root");
    spectrum->add_option("--config", config_path, "JSON config or manifest to rerun");
    std::string s_in, s_out, s_norm, s_format;
    int s_p = 0, s_workers = 0;
    auto* s_opt_in = spectrum->add_option("--in", s_in, "Instance or multi-objective JSON");
    auto* s_opt_p =
        spectrum->add_option("--p", s_p, "Plot the p-th root of the power sum instead");
    auto* s_opt_norm = spectrum->add_option("--norm", s_norm, "Normalization: sum|mean");
    auto* s_opt_format = spectrum->add_option("--format", s_format, "csv or json");
    auto* s_opt_workers = spectrum->add_option("--workers", s_workers, "Worker threads");
    auto* s_opt_out = spectrum->add_option("--out", s_out, "Output path");

    // --- verify ------------------------------------------------------------
    auto* verify = app.add_subcommand(
        "verify", "Check ground-space recovery and the sandwich bound on one instance");
    verify->add_option("--config", config_path, "JSON config or manifest to rerun");
    std::string v_in, v_out;
    int v_p = 0, v_workers = 0;
    auto* v_opt_in = verify->add_option("--in", v_in, "Instance or multi-objective JSON");
    auto* v_opt_p = verify->add_option(
        "--p", v_p, "Approximation level (default: smallest integer above the threshold)");
    auto* v_opt_workers = verify->add_option("--workers", v_workers, "Worker threads");
    auto* v_opt_out = verify->add_option("--out", v_out, "Report JSON path");

    // --- sweep / bin ---------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Ensemble sweep: epsilon/delta/violation statistics per p");
    sweep_cmd->add_option("--config", config_path, "JSON config or manifest to rerun");
    EnsembleArgs sweep_args;
    sweep_args.attach(sweep_cmd, false);

    auto* bin_cmd = app.add_subcommand(
        "bin", "Ensemble binned by gap ratio: mean 0-1 error per (bin, p)");
    bin_cmd->add_option("--config", config_path, "JSON config or manifest to rerun");
    EnsembleArgs bin_args;
    bin_args.attach(bin_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        ConfigLayer layer;
        if (!config_path.empty()) {
            layer.load(config_path);
        }

        if (gen->parsed()) {
            return run_gen(layer, gen_opt_n, gen_n, gen_opt_gamma, gen_gamma, gen_opt_seed,
                           gen_seed, gen_opt_eta, gen_eta, gen_opt_out, gen_out);
        }

        if (transform->parsed()) {
            const std::string in = layer.resolve(tr_opt_in, tr_in, "in", std::string());
            if (in.empty()) {
                throw ConfigError("--in is required");
            }
            const std::string out =
                require_out(layer.resolve(tr_opt_out, tr_out, "out", std::string()));
            const ShiftMode mode = parse_shift_mode(
                layer.resolve(tr_opt_mode, tr_mode, "shift_mode", std::string("exact")));
            ProblemInstance inst = instance_from_json(read_file(in));
            if (tr_opt_eta->count() > 0) {
                inst.shift_eta = tr_eta;
            } else {
                inst.shift_eta = layer.resolve(tr_opt_eta, tr_eta, "eta", inst.shift_eta);
            }
            const MultiObjective mo = transform_instance(inst, mode);
            write_file(out, to_json(mo));
            write_manifest(out, "transform",
                           Json{{"in", in},
                                {"eta", inst.shift_eta},
                                {"shift_mode", mode == ShiftMode::Exact ? "exact" : "bound"},
                                {"out", out}},
                           0);
            return 0;
        }

        if (build->parsed()) {
            const std::string in = layer.resolve(b_opt_in, b_in, "in", std::string());
            if (in.empty()) {
                throw ConfigError("--in is required");
            }
            const std::string out =
                require_out(layer.resolve(b_opt_out, b_out, "out", std::string()));
            const int p = layer.resolve(b_opt_p, b_p, "p", 1);
            const Normalization norm =
                parse_norm(layer.resolve(b_opt_norm, b_norm, "norm", std::string("sum")));
            const std::string format =
                layer.resolve(b_opt_format, b_format, "format", std::string("json"));
            const std::uint64_t budget = layer.resolve(
                b_opt_budget, b_budget, "term_budget",
                static_cast<std::uint64_t>(kDefaultTermBudget));

            const MultiObjective mo = load_multi_objective(read_file(in));
            const PowerSumEvaluator eval =
                build_power_sum(mo, p, norm, static_cast<std::size_t>(budget));
            if (!eval.symbolic()) {
                throw CapError("symbolic expansion exceeds the term budget of " +
                               std::to_string(budget));
            }
            if (format == "json") {
                write_file(out, to_json(*eval.symbolic()));
            } else if (format == "csv") {
                const IsingPolynomial ising = to_ising(*eval.symbolic());
                std::ostringstream csv;
                csv << "mask,support,coef\n";
                char buf[128];
                for (const Term& t : ising.terms()) {
                    std::string support;
                    for (int i = 0; i < ising.n(); ++i) {
                        if (t.vars & (Mask{1} << i)) {
                            if (!support.empty()) {
                                support += ' ';
                            }
                            support += std::to_string(i);
                        }
                    }
                    std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g\n",
                                  static_cast<unsigned long long>(t.vars), support.c_str(),
                                  t.coef);
                    csv << buf;
                }
                write_file(out, csv.str());
            } else {
                throw ConfigError("--format must be json or csv");
            }
            write_manifest(out, "build",
                           Json{{"in", in},
                                {"p", p},
                                {"norm", norm == Normalization::Sum ? "sum" : "mean"},
                                {"format", format},
                                {"term_budget", budget},
                                {"out", out}},
                           0);
            return 0;
        }

        if (spectrum->parsed()) {
            const std::string in = layer.resolve(s_opt_in, s_in, "in", std::string());
            if (in.empty()) {
                throw ConfigError("--in is required");
            }
            const std::string out =
                require_out(layer.resolve(s_opt_out, s_out, "out", std::string()));
            const int p = layer.resolve(s_opt_p, s_p, "p", 0);
            const Normalization norm =
                parse_norm(layer.resolve(s_opt_norm, s_norm, "norm", std::string("sum")));
            const std::string format =
                layer.resolve(s_opt_format, s_format, "format", std::string("csv"));

            const MultiObjective mo = load_multi_objective(read_file(in));
            SpectrumOptions opts;
            opts.workers = layer.resolve(s_opt_workers, s_workers, "workers", 0);
            Spectrum s;
            if (p > 0) {
                const double inv_p = 1.0 / static_cast<double>(p);
                s = enumerate_spectrum(
                    [&](Mask a) { return std::pow(power_sum_value(mo, p, a, norm), inv_p); },
                    mo.n, opts);
            } else {
                s = enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, mo.n, opts);
            }
            if (format == "csv") {
                std::ostringstream csv;
                write_spectrum_csv(csv, s);
                write_file(out, csv.str());
            } else if (format == "json") {
                write_file(out, to_json(s));
            } else {
                throw ConfigError("--format must be json or csv");
            }
            write_manifest(out, "spectrum",
                           Json{{"in", in},
                                {"p", p},
                                {"norm", norm == Normalization::Sum ? "sum" : "mean"},
                                {"format", format},
                                {"workers", opts.workers},
                                {"out", out}},
                           0);
            return 0;
        }

        if (verify->parsed()) {
            const std::string in = layer.resolve(v_opt_in, v_in, "in", std::string());
            if (in.empty()) {
                throw ConfigError("--in is required");
            }
            const std::string out =
                require_out(layer.resolve(v_opt_out, v_out, "out", std::string()));
            const MultiObjective mo = load_multi_objective(read_file(in));
            SpectrumOptions opts;
            opts.workers = layer.resolve(v_opt_workers, v_workers, "workers", 0);

            int p = layer.resolve(v_opt_p, v_p, "p", 0);
            if (p <= 0) {
                const Spectrum s_max = enumerate_spectrum(
                    [&](Mask a) { return eval_max(mo, a); }, mo.n, opts);
                const double p0 = recovery_threshold(mo.num_objectives(), gap_ratio(s_max));
                if (p0 >= 1e6) {
                    throw ConfigError(
                        "recovery threshold too large for an automatic p; pass --p");
                }
                p = static_cast<int>(std::ceil(p0)) + 1;
            }
            const VerificationReport report = verify_recovery(mo, p, opts);
            write_file(out, to_json(report));
            write_manifest(out, "verify",
                           Json{{"in", in}, {"p", p}, {"workers", opts.workers}, {"out", out}},
                           0);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            const EnsembleConfig config = sweep_args.resolve(layer, false);
            const std::string out = require_out(
                layer.resolve(sweep_args.opt_out, sweep_args.out, "out", std::string()));
            std::ostringstream csv;
            write_sweep_csv(csv, sweep(config));
            write_file(out, csv.str());
            write_manifest(out, "sweep", sweep_args.manifest_config(config, out, false),
                           config.master_seed);
            return 0;
        }

        if (bin_cmd->parsed()) {
            const EnsembleConfig config = bin_args.resolve(layer, true);
            const std::string out = require_out(
                layer.resolve(bin_args.opt_out, bin_args.out, "out", std::string()));
            std::ostringstream csv;
            write_bin_csv(csv, bin_by_ratio(config));
            write_file(out, csv.str());
            write_manifest(out, "bin", bin_args.manifest_config(config, out, true),
                           config.master_seed);
            return 0;
        }

        throw ConfigError("no subcommand selected");
    } catch (const CapError& e) {
        std::cerr << "error (cap exceeded): " << e.what() << "\n";
        return kExitCap;
    } catch (const DegeneracyError& e) {
        std::cerr << "error (numeric degeneracy): " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ConfigError& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
