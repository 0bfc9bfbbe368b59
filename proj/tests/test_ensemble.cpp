#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "moqa/ensemble.hpp"
#include "moqa/errors.hpp"
#include "moqa/serialize.hpp"
#include "test_util.hpp"

using namespace moqa;
using namespace moqa::test;

TEST_CASE("split_seed is stateless and spreads indices") {
    CHECK(split_seed(1, 0) == split_seed(1, 0));
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
}

TEST_CASE("sample_instance is deterministic per seed") {
    const MultiObjective a = sample_instance(6, 120.0, 99);
    const MultiObjective b = sample_instance(6, 120.0, 99);
    const MultiObjective c = sample_instance(6, 120.0, 100);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a) != to_json(c));
}

TEST_CASE("sampled constraint keeps the all-zeros point feasible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MultiObjective mo = sample_instance(6, 120.0, seed);
        REQUIRE(mo.constraint.has_value());
        CHECK(mo.constraint->evaluate_mask(0) == 0.0);
        CHECK(!constraint_violated(mo, 0));
    }
}

TEST_CASE("sampled entries look standard Gaussian") {
    // pool entries that survive construction unmixed: off-diagonal Q terms
    // (the diagonal merges with the linear part by idempotence) and the
    // constraint vector, until 10^4 samples are collected
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; count < 10000; ++seed) {
        const ProblemInstance inst = sample_problem(8, 6.0, split_seed(7, seed));
        for (const Term& t : inst.objective.terms()) {
            if (std::popcount(t.vars) == 2) {
                sum += t.coef;
                sum_sq += t.coef * t.coef;
                ++count;
            }
        }
        for (const Term& t : inst.constraint->terms()) {
            sum += t.coef;
            sum_sq += t.coef * t.coef;
            ++count;
        }
    }
    const double mean = sum / count;
    const double variance = sum_sq / count - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(variance - 1.0) < 0.05);
}

TEST_CASE("epsilon_delta is zero above the recovery threshold") {
    int verified = 0;
    for (std::uint64_t seed = 0; verified < 20 && seed < 100; ++seed) {
        const MultiObjective mo = sample_instance(8, 6.0, seed);
        const Spectrum s_max =
            enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, 8);
        if (s_max.ground_set.size() != 1) {
            continue;
        }
        const double p0 = recovery_threshold(2, gap_ratio(s_max));
        if (p0 > 40.0) {
            continue;
        }
        const InstanceComparison cmp =
            epsilon_delta(mo, static_cast<int>(std::ceil(p0)) + 1);
        CHECK(cmp.eps == 0);
        CHECK(cmp.delta == 0.0);
        ++verified;
    }
    CHECK(verified == 20);
}

TEST_CASE("epsilon_delta on a hand-built two-point landscape") {
    // max values {1.0, 1.1}; the power sum prefers the worse point, so
    // eps = 1 and delta = 0.1
    const Polynomial h1 = poly_from_values(1, {1.0, 0.5});
    const Polynomial h2 = poly_from_values(1, {0.9, 1.1});
    const MultiObjective mo = make_multi_objective({h1, h2});
    const InstanceComparison cmp = epsilon_delta(mo, 1);
    CHECK(cmp.eps == 1);
    CHECK(cmp.delta == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("epsilon_delta agreement implies both metrics vanish") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const MultiObjective mo = sample_instance(6, 6.0, split_seed(11, seed));
        for (int p : {1, 2, 4, 8}) {
            const InstanceComparison cmp = epsilon_delta(mo, p);
            CHECK((cmp.eps == 0) == (cmp.delta == 0.0));
            CHECK(cmp.delta >= 0.0);
        }
    }
}

TEST_CASE("epsilon_delta rejects a vanishing denominator") {
    const Polynomial h = poly_from_values(1, {0.0, 1.0});
    const MultiObjective mo = make_multi_objective({h});
    CHECK_THROWS_AS(epsilon_delta(mo, 2), DegeneracyError);
}

TEST_CASE("sweep epsilon transitions to zero past the instance threshold") {
    // find a seed whose instance has a conveniently small threshold
    EnsembleConfig config;
    config.n = 8;
    config.gamma = 6.0;
    config.num_instances = 1;
    config.shift_eta = 1.0;
    for (std::uint64_t master = 0; master < 50; ++master) {
        const MultiObjective mo = sample_instance(8, 6.0, split_seed(master, 0));
        const Spectrum s_max =
            enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, 8);
        if (s_max.ground_set.size() != 1) {
            continue;
        }
        const double p0 = recovery_threshold(2, gap_ratio(s_max));
        if (p0 < 2.0 || p0 > 10.0) {
            continue;
        }
        config.master_seed = master;
        const int p_above = static_cast<int>(std::ceil(p0)) + 1;
        config.p_values = {1, p_above};
        const std::vector<EnsembleRow> rows = sweep(config);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].epsilon == 0.0);
        const VerificationReport report = verify_recovery(mo, p_above);
        CHECK(report.same_ground_space);
        return;
    }
    FAIL("no instance with a usable threshold found");
}

TEST_CASE("mean delta is non-increasing in p at ensemble scale") {
    EnsembleConfig config;
    config.n = 6;
    config.gamma = 120.0;
    config.num_instances = 500;
    config.p_values = {1, 2, 3, 4, 5, 6};
    config.master_seed = 20250101;
    const std::vector<EnsembleRow> rows = sweep(config);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].delta <= rows[i - 1].delta + 1e-3);
    }
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    EnsembleConfig config;
    config.n = 6;
    config.gamma = 6.0;
    config.num_instances = 64;
    config.p_values = {2, 4};
    config.master_seed = 777;

    config.workers = 1;
    std::ostringstream serial;
    write_sweep_csv(serial, sweep(config));

    config.workers = 7;
    std::ostringstream parallel;
    write_sweep_csv(parallel, sweep(config));

    CHECK(serial.str() == parallel.str());
    CHECK(serial.str().starts_with("n,p,epsilon,delta,violation_rate,mean_r,count\n"));
}

TEST_CASE("sweep attaches the instance index to per-instance errors") {
    EnsembleConfig config;
    config.n = 6;
    config.gamma = 6.0;
    config.num_instances = 3;
    config.p_values = {2};
    config.max_n = 4;  // every instance trips the enumeration cap
    try {
        sweep(config);
        FAIL("expected CapError");
    } catch (const CapError& e) {
        CHECK(std::string(e.what()).find("instance") != std::string::npos);
    }
}

TEST_CASE("sweep validates its config") {
    EnsembleConfig config;
    config.num_instances = 0;
    config.p_values = {1};
    CHECK_THROWS_AS(sweep(config), std::invalid_argument);
    config.num_instances = 1;
    config.p_values.clear();
    CHECK_THROWS_AS(sweep(config), std::invalid_argument);
    config.p_values = {0};
    CHECK_THROWS_AS(sweep(config), std::invalid_argument);
}

TEST_CASE("bin_by_ratio analytic threshold and guarantee") {
    EnsembleConfig config;
    config.n = 8;
    config.gamma = 6.0;
    config.num_instances = 300;
    config.p_values = {1, 3, 5};
    config.master_seed = 31337;
    config.bin_edges = {0.0, 0.01, 0.05, 0.1, 0.26, 1.0, 4.0};
    const std::vector<BinRow> rows = bin_by_ratio(config);
    REQUIRE(rows.size() == 6 * 3);

    for (const BinRow& row : rows) {
        CHECK(row.r_star == doctest::Approx(std::pow(2.0, 1.0 / row.p) - 1.0));
        // Theorem guarantee: bins entirely above the threshold have zero error
        if (row.bin_lo >= row.r_star && row.count > 0) {
            CHECK(row.epsilon == 0.0);
        }
    }
    // rows come out ordered by (bin, p)
    CHECK(rows[0].bin_lo == 0.0);
    CHECK(rows[0].p == 1);
    CHECK(rows[1].p == 3);
    CHECK(rows[3].bin_lo == 0.01);
}

TEST_CASE("bin_by_ratio requires edges and keeps empty bins") {
    EnsembleConfig config;
    config.n = 4;
    config.gamma = 6.0;
    config.num_instances = 10;
    config.p_values = {2};
    CHECK_THROWS_AS(bin_by_ratio(config), ConfigError);

    config.bin_edges = {1000.0, 2000.0};  // far above any realistic ratio
    const std::vector<BinRow> rows = bin_by_ratio(config);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].count == 0);
    CHECK(rows[0].epsilon == 0.0);
}

TEST_CASE("CSV writers format with 17 significant digits") {
    EnsembleRow row;
    row.n = 6;
    row.p = 3;
    row.epsilon = 1.0 / 3.0;
    row.delta = 0.1;
    row.violation_rate = 0.0;
    row.mean_r = 2.0;
    row.count = 3;
    std::ostringstream out;
    write_sweep_csv(out, {row});
    CHECK(out.str() ==
          "n,p,epsilon,delta,violation_rate,mean_r,count\n"
          "6,3,0.33333333333333331,0.10000000000000001,0,2,3\n");
}
