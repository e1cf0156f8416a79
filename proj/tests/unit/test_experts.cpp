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
#include <filesystem>
#include <numbers>

#include "mfmoe/dataset.hpp"
#include "mfmoe/error.hpp"
#include "mfmoe/experts.hpp"
#include "oracles.hpp"

using namespace mfmoe;
using std::numbers::pi;

namespace {

ExpertModel cos_expert(std::size_t d, std::size_t input_dim = 1) {
    std::vector<int> k(d, 0);
    k[0] = 1;
    return ExpertModel::fourier(FourierExpert::constant(k, 0.0, input_dim));
}

Dataset single_point(double y) {
    return Dataset(1, {0.0}, {y});
}

} // namespace

TEST_CASE("expert evaluation examples") {
    const auto model = cos_expert(3);
    const std::vector<double> x{0.3};
    CHECK(expert_eval(model, std::vector<double>{0, 0, 0}, x) == 1.0);
    CHECK(expert_eval(model, std::vector<double>{pi, 0, 0}, x) ==
          doctest::Approx(-1.0));
    const auto q = ExpertModel::quantum(qsim::make_cosine_circuit(), 0);
    CHECK(expert_eval(q, std::vector<double>{pi / 3}, {}) ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(expert_eval(model, std::vector<double>{0, 0}, x),
                    InvalidArgument);
    CHECK_THROWS_AS(expert_eval(model, std::vector<double>{0, 0, 0}, {}),
                    InvalidArgument);
}

TEST_CASE("expert gradient examples") {
    const auto model = cos_expert(2);
    const auto g = expert_grad(model, std::vector<double>{pi / 2, 1.234},
                               std::vector<double>{0.0});
    CHECK(g[0] == doctest::Approx(-1.0));
    CHECK(g[1] == 0.0);
    const auto q = ExpertModel::quantum(qsim::make_cosine_circuit(), 0);
    CHECK(std::abs(expert_grad(q, std::vector<double>{0.0}, {})[0]) < 1e-15);
}

TEST_CASE("random Fourier expert gradients match finite differences") {
    const auto model = ExpertModel::fourier(FourierExpert::random(6, 3, 17));
    Rng rng(4, 4);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> theta(6);
        std::vector<double> x(3);
        for (auto &v : theta) v = rng.uniform(0, 2 * pi);
        for (auto &v : x) v = rng.uniform(-pi, pi);
        const auto g = expert_grad(model, theta, x);
        for (std::size_t k = 0; k < 6; ++k) {
            const double fd = oracle::central_difference(
                [&](const std::vector<double> &th) {
                    return expert_eval(model, th, x);
                },
                theta, k, 1e-5);
            REQUIRE(std::abs(g[k] - fd) < 1e-9);
        }
    }
}

TEST_CASE("mixture examples") {
    const auto model = cos_expert(1);
    const std::vector<double> x{0.0};
    const ParticleSystem one(1, {0.4});
    CHECK(mixture_eval(model, one, x) == expert_eval(model, one.particle(0), x));
    const ParticleSystem same(1, {0.4, 0.4, 0.4});
    CHECK(mixture_eval(model, same, x) ==
          doctest::Approx(expert_eval(model, one.particle(0), x)));
    const ParticleSystem pair(1, {0.0, pi});
    CHECK(std::abs(mixture_eval(model, pair, x)) < 1e-15);
}

TEST_CASE("loss examples") {
    const auto model = cos_expert(1);
    const ParticleSystem sys(1, {pi / 2});
    CHECK(loss(model, sys, single_point(1.0)) == doctest::Approx(0.5));
    const double f = mixture_eval(model, sys, std::vector<double>{0.0});
    CHECK(loss(model, sys, single_point(f)) == 0.0);
    CHECK(loss_from_residuals(std::vector<double>{1.0, -2.0}) == 2.5);
}

TEST_CASE("drift examples") {
    const auto model = cos_expert(1);
    const auto data = single_point(1.0);
    CHECK(drift(model, std::vector<double>{pi / 2}, std::vector<double>{1.0},
                data)[0] == doctest::Approx(-1.0));
    CHECK(drift(model, std::vector<double>{pi / 2}, std::vector<double>{0.0},
                data)[0] == 0.0);
    const auto q = ExpertModel::quantum(qsim::make_cosine_circuit(), 1);
    CHECK(drift(q, std::vector<double>{pi / 2}, std::vector<double>{2.0},
                data)[0] == doctest::Approx(-2.0));
}

TEST_CASE("derivative bounds hold for unit Fourier and quantum experts") {
    Rng rng(1, 0);
    const auto f = ExpertModel::fourier(FourierExpert::random(6, 3, 5));
    const auto rf = verify_assumption1(f, rng, 300);
    CHECK(rf.ok());
    CHECK(rf.max_f <= 1.0);
    const auto q = ExpertModel::quantum(
        qsim::make_alternating_circuit(3, 6, 2), 3);
    const auto rq = verify_assumption1(q, rng, 300);
    CHECK(rq.ok());
    CHECK(rq.max_grad <= 1.0 + 1e-12);
    CHECK(rq.max_hess <= 1.0 + 1e-12);
    CHECK_THROWS_AS(verify_assumption1(q, rng, 0), InvalidArgument);
}

TEST_CASE("mis-declared alpha is caught with a witness") {
    Rng rng(2, 0);
    const auto f = ExpertModel::fourier(FourierExpert::random(6, 3, 5), 0.5);
    const auto r = verify_assumption1(f, rng, 300);
    CHECK_FALSE(r.grad_ok);
    CHECK(r.witness_bound == "grad");
    CHECK(r.witness_theta.size() == 6);
    CHECK(r.witness_x.size() == 3);
}

TEST_CASE("lipschitz constant examples") {
    CHECK(lipschitz_constant(6, 1, 1, 4, 1) == 48);
    CHECK(lipschitz_constant(1, 1, 1, 1, 0) == 1);
    CHECK(lipschitz_constant(3, 2, 0, 2, 5) == 24);
}

TEST_CASE("dataset generation and csv round trip") {
    const auto model = ExpertModel::fourier(FourierExpert::random(6, 3, 5));
    DatasetSpec spec;
    const auto a = generate_dataset(spec, model);
    const auto b = generate_dataset(spec, model);
    CHECK(a.data.size() == 4);
    CHECK(a.data.feature_dim() == 3);
    CHECK(std::equal(a.data.labels().begin(), a.data.labels().end(),
                     b.data.labels().begin()));
    for (double y : a.data.labels()) {
        CHECK(std::abs(y) <= a.data.label_bound());
    }
    const auto path = std::filesystem::temp_directory_path() /
                      "mfmoe_unit_dataset.csv";
    write_dataset_csv(a.data, path);
    const auto back = read_dataset_csv(path);
    CHECK(back.size() == a.data.size());
    for (std::size_t j = 0; j < back.size(); ++j) {
        CHECK(back.label(j) == a.data.label(j));
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back.input(j)[i] == a.data.input(j)[i]);
        }
    }
    spec.label_mode = LabelMode::Uniform;
    spec.label_bound = 0.5;
    const auto u = generate_dataset(spec, model);
    CHECK(u.data.label_bound() <= 0.5);
}
