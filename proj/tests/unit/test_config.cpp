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

#include "mfmoe/config.hpp"
#include "mfmoe/error.hpp"
#include "mfmoe/io.hpp"

using namespace mfmoe;

namespace {

std::string field_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<none>";
}

} // namespace

TEST_CASE("defaults and overrides") {
    const auto cfg = parse_config(R"({
        "expert": {"kind": "quantum", "dim": 5, "qubits": 2},
        "dynamics": {"T": 2.0, "h": 0.05, "record_every": 4},
        "sweep": {"N": [8, 16], "seeds": 3, "mode": "simulation"}
    })");
    CHECK(cfg.expert.kind == ExpertKind::Quantum);
    CHECK(cfg.expert.dim == 5);
    CHECK(cfg.expert.qubits == 2);
    CHECK(cfg.dynamics.horizon == 2.0);
    CHECK(cfg.sweep.particle_counts == std::vector<std::size_t>{8, 16});
    CHECK(cfg.sweep.seeds == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(cfg.sweep.mode == SweepMode::Simulation);
    CHECK(cfg.dataset.spec.n == 4);
}

TEST_CASE("errors name the offending field") {
    CHECK(field_of(R"({"bogus": 1})") == "bogus");
    CHECK(field_of(R"({"expert": {"dimm": 3}})") == "expert.dimm");
    CHECK(field_of(R"({"expert": {"kind": "neural"}})") == "expert.kind");
    CHECK(field_of(R"({"dynamics": {"h": "small"}})") == "dynamics.h");
    CHECK(field_of(R"({"sweep": {"N": [8, -1]}})") == "sweep.N");
    CHECK(field_of(R"({"sweep": {"seeds": "many"}})") == "sweep.seeds");
    CHECK(field_of(R"({"dataset": {"label_mode": "x"}})") ==
          "dataset.label_mode");
    CHECK(field_of("not json") == "");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("dynamics validation") {
    DynamicsConfig d;
    d.step = 0.0;
    CHECK_THROWS_WITH_AS(validate_dynamics(d),
                         doctest::Contains("step size must be positive"),
                         ConfigError);
    d = DynamicsConfig{};
    d.record_every = 0;
    CHECK_THROWS_AS(validate_dynamics(d), ConfigError);
}

TEST_CASE("canonical json round trips") {
    auto cfg = parse_config(R"({
        "expert": {"kind": "quantum", "dim": 4, "qubits": 2, "alpha": 0.75},
        "dataset": {"label_mode": "uniform", "label_bound": 0.3},
        "sweep": {"N": [8, 16, 32], "seeds": [4, 9], "base_seed": 77}
    })");
    const auto text = config_to_json(cfg).dump();
    const auto back = parse_config(text);
    CHECK(config_to_json(back).dump() == text);
}

TEST_CASE("inline circuits fix depth and qubits") {
    const auto circuit = qsim::to_text(qsim::make_alternating_circuit(2, 3, 1));
    const auto cfg = parse_config(R"({"expert": {"kind": "quantum", "circuit": )" +
                                  circuit + "}}");
    CHECK(cfg.expert.dim == 3);
    CHECK(cfg.expert.qubits == 2);
    const auto model = build_expert(cfg);
    CHECK(model.dim() == 3);
    CHECK(field_of(R"({"expert": {"circuit": {"qubits": 1}}})") ==
          "expert.circuit");
}

TEST_CASE("dataset file is resolved and checked") {
    const auto dir = std::filesystem::temp_directory_path() / "mfmoe_cfg";
    io::write_file(dir / "data.csv", "x_1,y\n0.5,0.25\n-1,0.75\n");
    auto cfg = load_config([&] {
        io::write_file(dir / "c.json",
                       R"({"dataset": {"features": 1, "file": "data.csv"}})");
        return dir / "c.json";
    }());
    const auto p = build_problem(cfg);
    CHECK(p.data.size() == 2);
    CHECK(p.data.label_bound() == 0.75);
    cfg.dataset.spec.features = 2;
    CHECK_THROWS_AS(build_problem(cfg), ConfigError);
}

TEST_CASE("doubles round trip through text") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.283185307179586}) {
        CHECK(io::parse_double(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK_THROWS_AS(io::parse_double("1.0x"), InvalidArgument);
}
