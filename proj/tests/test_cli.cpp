#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "moqa/ensemble.hpp"
#include "moqa/serialize.hpp"
#include "moqa/spectra.hpp"

using namespace moqa;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    const char* bin = std::getenv("MOQA_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "MOQA_BIN must point at the CLI binary");
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) {
        result.output.append(buf, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("moqa_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("gen is deterministic per seed and writes a manifest") {
    const fs::path a = work_dir() / "gen_a.json";
    const fs::path b = work_dir() / "gen_b.json";
    CHECK(run_cli("gen --n 6 --gamma 120 --seed 7 --out " + q(a)).exit_code == 0);
    CHECK(run_cli("gen --n 6 --gamma 120 --seed 7 --out " + q(b)).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(fs::exists(work_dir() / "gen_a.json.manifest.json"));

    const fs::path c = work_dir() / "gen_c.json";
    CHECK(run_cli("gen --n 6 --gamma 120 --seed 8 --out " + q(c)).exit_code == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("transform produces the library pipeline result") {
    const fs::path inst_path = work_dir() / "tr_instance.json";
    const fs::path mo_path = work_dir() / "tr_mo.json";
    REQUIRE(run_cli("gen --n 5 --gamma 6 --seed 3 --out " + q(inst_path)).exit_code == 0);
    REQUIRE(run_cli("transform --in " + q(inst_path) + " --out " + q(mo_path)).exit_code == 0);

    const MultiObjective expected =
        transform_instance(instance_from_json(slurp(inst_path)));
    CHECK(slurp(mo_path) == to_json(expected));
}

TEST_CASE("verify agrees with the library on 50 random instances") {
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MultiObjective mo = sample_instance(6, 120.0, seed);
        const Spectrum s_max =
            enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, 6);
        const double p0 = recovery_threshold(2, gap_ratio(s_max));
        // agreement must hold at any p; cap the exponent for huge thresholds
        const int p = p0 <= 40.0 ? static_cast<int>(std::ceil(p0)) + 1 : 8;
        const VerificationReport expected = verify_recovery(mo, p);

        const fs::path mo_path = work_dir() / ("verify_mo_" + std::to_string(seed) + ".json");
        const fs::path report_path =
            work_dir() / ("verify_report_" + std::to_string(seed) + ".json");
        std::ofstream(mo_path) << to_json(mo);
        REQUIRE(run_cli("verify --in " + q(mo_path) + " --p " + std::to_string(p) +
                        " --out " + q(report_path))
                    .exit_code == 0);
        const VerificationReport actual = report_from_json(slurp(report_path));
        CHECK(actual.r_max == expected.r_max);
        CHECK(actual.p0 == expected.p0);
        CHECK(actual.p_used == expected.p_used);
        CHECK(actual.same_ground_space == expected.same_ground_space);
        CHECK(actual.ground_subset == expected.ground_subset);
        CHECK(actual.r_p == expected.r_p);
        CHECK(actual.ratio_grew == expected.ratio_grew);
        CHECK(actual.sandwich_max_violation == expected.sandwich_max_violation);
        ++compared;
    }
    CHECK(compared == 50);
}

TEST_CASE("verify picks p automatically when omitted") {
    const fs::path inst_path = work_dir() / "auto_instance.json";
    const fs::path report_path = work_dir() / "auto_report.json";
    REQUIRE(run_cli("gen --n 6 --gamma 120 --seed 12 --out " + q(inst_path)).exit_code == 0);
    const CmdResult r = run_cli("verify --in " + q(inst_path) + " --out " + q(report_path));
    REQUIRE(r.exit_code == 0);
    const VerificationReport report = report_from_json(slurp(report_path));
    CHECK(report.p_used == static_cast<int>(std::ceil(report.p0)) + 1);
    CHECK(report.p_used > report.p0);
    CHECK(report.same_ground_space);
}

TEST_CASE("sweep emits one row per p and reruns from its manifest") {
    const fs::path out1 = work_dir() / "sweep1.csv";
    const fs::path out2 = work_dir() / "sweep2.csv";
    REQUIRE(run_cli("sweep --n 5 --gamma 120 --seed 11 --num-instances 40 "
                    "--p-min 1 --p-max 8 --out " +
                    q(out1))
                .exit_code == 0);
    const std::string csv = slurp(out1);
    CHECK(csv.starts_with("n,p,epsilon,delta,violation_rate,mean_r,count\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 rows

    // rerun from the manifest, overriding only the output path
    REQUIRE(run_cli("sweep --config " + q(work_dir() / "sweep1.csv.manifest.json") +
                    " --out " + q(out2))
                .exit_code == 0);
    CHECK(slurp(out2) == csv);
}

TEST_CASE("sweep output is independent of the worker count") {
    const fs::path w1 = work_dir() / "sweep_w1.csv";
    const fs::path w4 = work_dir() / "sweep_w4.csv";
    REQUIRE(run_cli("sweep --n 5 --gamma 6 --seed 5 --num-instances 32 --p 2 --p 5 "
                    "--workers 1 --out " +
                    q(w1))
                .exit_code == 0);
    REQUIRE(run_cli("sweep --n 5 --gamma 6 --seed 5 --num-instances 32 --p 2 --p 5 "
                    "--workers 4 --out " +
                    q(w4))
                .exit_code == 0);
    CHECK(slurp(w1) == slurp(w4));
}

TEST_CASE("bin emits the binned schema") {
    const fs::path out = work_dir() / "bin.csv";
    REQUIRE(run_cli("bin --n 5 --gamma 6 --seed 2 --num-instances 50 --p 2 --p 4 "
                    "--bins 0,0.1,0.5,2 --out " +
                    q(out))
                .exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.starts_with("bin_lo,bin_hi,p,epsilon,count,r_star\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
}

TEST_CASE("build emits polynomial JSON and Ising CSV") {
    const fs::path inst_path = work_dir() / "build_instance.json";
    const fs::path sym_path = work_dir() / "build_sym.json";
    const fs::path ising_path = work_dir() / "build_ising.csv";
    REQUIRE(run_cli("gen --n 4 --gamma 6 --seed 1 --out " + q(inst_path)).exit_code == 0);
    REQUIRE(run_cli("build --in " + q(inst_path) + " --p 2 --out " + q(sym_path))
                .exit_code == 0);

    const Polynomial symbolic = polynomial_from_json(slurp(sym_path));
    const MultiObjective mo = sample_instance(4, 6.0, 1);
    for (Mask a = 0; a < 16; ++a) {
        const double direct = power_sum_value(mo, 2, a);
        CHECK(std::abs(symbolic.evaluate_mask(a) - direct) <=
              1e-9 * std::max(1.0, std::abs(direct)));
    }

    REQUIRE(run_cli("build --in " + q(inst_path) + " --p 2 --format csv --out " +
                    q(ising_path))
                .exit_code == 0);
    CHECK(slurp(ising_path).starts_with("mask,support,coef\n"));
}

TEST_CASE("spectrum writes the landscape CSV") {
    const fs::path inst_path = work_dir() / "spec_instance.json";
    const fs::path max_path = work_dir() / "spec_max.csv";
    const fs::path p_path = work_dir() / "spec_p.csv";
    REQUIRE(run_cli("gen --n 4 --gamma 120 --seed 9 --out " + q(inst_path)).exit_code == 0);
    REQUIRE(run_cli("spectrum --in " + q(inst_path) + " --out " + q(max_path)).exit_code == 0);
    REQUIRE(run_cli("spectrum --in " + q(inst_path) + " --p 4 --out " + q(p_path))
                .exit_code == 0);

    const std::string max_csv = slurp(max_path);
    CHECK(max_csv.starts_with("assignment,value\n"));
    CHECK(std::count(max_csv.begin(), max_csv.end(), '\n') == 17);

    // the p-th root curve upper-bounds the max curve per assignment
    const std::string p_csv = slurp(p_path);
    std::istringstream max_rows(max_csv.substr(max_csv.find('\n') + 1));
    std::istringstream p_rows(p_csv.substr(p_csv.find('\n') + 1));
    std::string max_line, p_line;
    while (std::getline(max_rows, max_line) && std::getline(p_rows, p_line)) {
        const double max_v = std::stod(max_line.substr(max_line.find(',') + 1));
        const double p_v = std::stod(p_line.substr(p_line.find(',') + 1));
        CHECK(p_v >= max_v - 1e-9 * std::max(1.0, std::abs(max_v)));
    }
}

TEST_CASE("exit codes separate config, cap, and degeneracy failures") {
    // missing --out
    CHECK(run_cli("gen --n 4 --gamma 6 --seed 0").exit_code == 1);
    // unknown flag
    CHECK(run_cli("gen --wat 3").exit_code == 1);
    // enumeration cap: the exact shift inside transform needs 2^n values
    const fs::path big = work_dir() / "big_instance.json";
    REQUIRE(run_cli("gen --n 30 --gamma 6 --seed 0 --out " + q(big)).exit_code == 0);
    CHECK(run_cli("transform --in " + q(big) + " --out " +
                  q(work_dir() / "big_mo.json"))
              .exit_code == 2);
    // symbolic budget
    const fs::path inst = work_dir() / "budget_instance.json";
    REQUIRE(run_cli("gen --n 10 --gamma 6 --seed 0 --out " + q(inst)).exit_code == 0);
    CHECK(run_cli("build --in " + q(inst) + " --p 6 --term-budget 10 --out " +
                  q(work_dir() / "budget_out.json"))
              .exit_code == 2);
    // constant landscape: the gap ratio is undefined
    const fs::path flat = work_dir() / "flat_mo.json";
    std::ofstream(flat) << "{\"n\": 2, \"gamma\": 0.0, \"shift\": 0.0, \"objectives\": "
                           "[{\"n\": 2, \"terms\": [{\"vars\": [], \"coef\": 1.0}]}], "
                           "\"constraint\": null}";
    CHECK(run_cli("verify --in " + q(flat) + " --out " +
                  q(work_dir() / "flat_report.json"))
              .exit_code == 3);
}
