// Copyright 2026 The mfmoe Authors

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <cmath>
#include <omp.h>

#include "mfmoe/config.hpp"
#include "mfmoe/error.hpp"
#include "mfmoe/experiments.hpp"
#include "mfmoe/io.hpp"

using namespace mfmoe;

namespace {

std::vector<ResultRow> synthetic(const std::vector<double> &means,
                                 const std::vector<std::size_t> &ns) {
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            ResultRow start;
            start.n = ns[i];
            start.m = 4096;
            start.seed = seed;
            start.time = 0.0;
            start.w2_sq = 100.0; // must be ignored by the final-time fit
            rows.push_back(start);
            ResultRow r = start;
            r.time = 1.0;
            r.w2_sq = means[i];
            rows.push_back(r);
        }
    }
    return rows;
}

ExperimentConfig small_sweep() {
    ExperimentConfig cfg;
    cfg.expert.dim = 6;
    cfg.dynamics = {0.2, 0.02, 5};
    cfg.sweep.particle_counts = {4, 8, 16};
    cfg.sweep.reference_size = 128;
    cfg.sweep.seeds = {0, 1, 2};
    return cfg;
}

} // namespace

TEST_CASE("alpha_d examples") {
    CHECK(alpha_d(1, 6) == 2.0);
    CHECK(alpha_d(64, 6) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(alpha_d(16, 4) == 0.5);
    CHECK_THROWS_AS(alpha_d(0, 6), InvalidArgument);
}

TEST_CASE("exact synthetic table recovers C1") {
    const std::vector<std::size_t> ns{8, 16, 32, 64};
    std::vector<double> means;
    for (auto n : ns) {
        means.push_back(3.0 * alpha_d(n, 6));
    }
    const auto fit = fit_rate(synthetic(means, ns), 6);
    CHECK(fit.c1 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fit.residual_norm < 1e-14);
    CHECK(fit.c1_p95 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fit.envelope_holds);
    CHECK(fit.time == 1.0);
    CHECK(fit.n_values == ns);
}

TEST_CASE("constant table is flagged rate inconsistent") {
    const std::vector<std::size_t> ns{8, 16, 32, 64};
    const auto fit = fit_rate(synthetic({2.0, 2.0, 2.0, 2.0}, ns), 6);
    CHECK(std::abs(fit.slope) < 1e-12);
    CHECK_FALSE(fit.rate_consistent);
    const auto decaying =
        fit_rate(synthetic({8.0, 4.0, 2.0, 1.0}, ns), 6); // slope -1
    CHECK(decaying.slope == doctest::Approx(-1.0));
    CHECK(decaying.rate_consistent);
    CHECK(decaying.slope_stderr < 1e-12);
}

TEST_CASE("fit preconditions") {
    const auto two = synthetic({1.0, 0.5}, {8, 16});
    CHECK_THROWS_AS(fit_rate(two, 6), InvalidArgument);
    const auto three = synthetic({1.0, 0.5, 0.25}, {8, 16, 32});
    CHECK_THROWS_WITH_AS(fit_rate(three, 4), doctest::Contains("d > 4"),
                         InvalidArgument);
    CHECK_NOTHROW(fit_rate(three, 5));
    const auto at0 = fit_rate(three, 6, 0.0);
    CHECK(at0.means[0] == 100.0);
}

TEST_CASE("sweep config validation names the field") {
    auto cfg = small_sweep();
    cfg.sweep.particle_counts.clear();
    try {
        validate_sweep(cfg);
        FAIL("expected a config error");
    } catch (const ConfigError &e) {
        CHECK(e.field() == "sweep.N");
    }
    cfg = small_sweep();
    cfg.sweep.reference_size = 64;
    CHECK_THROWS_AS(validate_sweep(cfg), ConfigError);
    cfg.sweep.mode = SweepMode::Simulation;
    CHECK_NOTHROW(validate_sweep(cfg));
    cfg = small_sweep();
    cfg.expert.dim = 3;
    CHECK_THROWS_AS(validate_sweep(cfg), ConfigError);
    cfg.sweep.mode = SweepMode::Simulation;
    CHECK(validate_sweep(cfg).size() == 1);
}

TEST_CASE("M equal to N gives zero distances") {
    auto cfg = small_sweep();
    cfg.sweep.mode = SweepMode::Simulation;
    cfg.sweep.particle_counts = {16};
    cfg.sweep.reference_size = 16;
    cfg.sweep.seeds = {5};
    const auto p = build_problem(cfg);
    const auto res = run_sweep(cfg, p.model, p.data);
    REQUIRE(res.rows.size() == 3);
    for (const auto &r : res.rows) {
        CHECK(r.w2_sq <= 1e-20);
        CHECK(r.pathwise == 0.0);
        CHECK(r.loss_interacting == r.loss_reference);
    }
}

TEST_CASE("sweep output is independent of the thread count") {
    const auto cfg = small_sweep();
    const auto p = build_problem(cfg);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = run_sweep(cfg, p.model, p.data);
    omp_set_num_threads(3);
    const auto b = run_sweep(cfg, p.model, p.data);
    omp_set_num_threads(saved);
    CHECK(results_csv(a.rows) == results_csv(b.rows));
    CHECK(summary_csv(a.summary) == summary_csv(b.summary));
    CHECK(a.rows.size() == 3 * 3 * 3);
    for (const auto &r : a.rows) {
        CHECK(std::isfinite(r.w2_sq));
        CHECK(r.w2_sq >= 0.0);
        CHECK(r.pathwise >= r.pointwise);
    }
}

TEST_CASE("results csv round trip") {
    const auto cfg = small_sweep();
    const auto p = build_problem(cfg);
    const auto res = run_sweep(cfg, p.model, p.data);
    const auto path =
        std::filesystem::temp_directory_path() / "mfmoe_unit_results.csv";
    io::write_file(path, results_csv(res.rows));
    const auto back = parse_results_csv(path);
    CHECK(results_csv(back) == results_csv(res.rows));
}

TEST_CASE("verify bounds reports and catches mis-declared alpha") {
    ExperimentConfig cfg;
    cfg.verify.trials = 200;
    cfg.expert.kind = ExpertKind::Quantum;
    auto p = build_problem(cfg);
    const auto q = verify_bounds(cfg, p.model, p.data);
    CHECK(q.pass());
    CHECK(q.checks.size() == 6);

    cfg.expert.kind = ExpertKind::Fourier;
    cfg.expert.alpha = 0.5;
    p = build_problem(cfg);
    const auto bad = verify_bounds(cfg, p.model, p.data);
    CHECK_FALSE(bad.pass());
    const auto json = bounds_json(bad);
    bool found = false;
    for (const auto &c : json["checks"]) {
        if (c["name"] == "assumption1.grad") {
            CHECK(c["pass"] == false);
            CHECK(c["witness"]["theta"].size() == 6);
            found = true;
        }
    }
    CHECK(found);

    cfg.verify.trials = 0;
    CHECK_THROWS_WITH_AS(verify_bounds(cfg, p.model, p.data),
                         doctest::Contains("empty trials rejected"),
                         ConfigError);
}
