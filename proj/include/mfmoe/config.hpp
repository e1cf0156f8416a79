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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfmoe/dataset.hpp"
#include "mfmoe/experts.hpp"
#include "mfmoe/qsim.hpp"

namespace mfmoe {

struct ExpertConfig {
    ExpertKind kind = ExpertKind::Fourier;
    std::size_t dim = 6;
    std::uint64_t seed = 11;
    double alpha = 1.0;
    double beta = 1.0;
    // quantum only
    std::size_t qubits = 3;
    double feature_scale = 1.0;
    std::optional<qsim::CircuitSpec> circuit;
};

struct DatasetConfig {
    DatasetSpec spec;
    std::optional<std::filesystem::path> file;
};

struct DynamicsConfig {
    double horizon = 1.0;
    double step = 0.01;
    std::size_t record_every = 50;
};

struct SimulateConfig {
    std::size_t particles = 32;
    std::uint64_t seed = 0;
    bool record_particles = false;
};

enum class SweepMode { RateFit, Simulation };

struct SweepConfig {
    std::vector<std::size_t> particle_counts;
    std::size_t reference_size = 2048;
    std::vector<std::uint64_t> seeds;
    std::uint64_t base_seed = 2024;
    SweepMode mode = SweepMode::RateFit;
};

struct VerifyConfig {
    std::size_t trials = 1000;
    std::uint64_t seed = 5;
    std::size_t max_atoms = 32;
};

/**
 * Whole experiment description, read from a JSON document:
 *
 *   expert   { kind, dim, seed, alpha, beta, qubits, feature_scale, circuit }
 *   dataset  { n, features, pool_size, label_mode, label_bound,
 *              teacher_size, seed, file }
 *   dynamics { T, h, record_every }
 *   simulate { N, seed, record_particles }
 *   sweep    { N, reference_size, seeds, base_seed, mode }
 *   verify   { trials, seed, max_atoms }
 *   output_dir
 *
 * Every section and key is optional; unknown keys are rejected.
 */
struct ExperimentConfig {
    ExpertConfig expert;
    DatasetConfig dataset;
    DynamicsConfig dynamics;
    SimulateConfig simulate;
    SweepConfig sweep;
    VerifyConfig verify;
    std::filesystem::path output_dir = "out";
};

/// Relative dataset paths resolve against `base_dir`.
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path &base_dir = {});
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical JSON form (round-trips through parse_config).
nlohmann::ordered_json config_to_json(const ExperimentConfig &config);

/// Throws ConfigError naming the field; returns warnings for allowed but
/// unusual settings.
std::vector<std::string> validate_dynamics(const DynamicsConfig &dynamics);
std::vector<std::string> validate_sweep(const ExperimentConfig &config);

ExpertModel build_expert(const ExperimentConfig &config);

struct Problem {
    ExpertModel model;
    Dataset data;
    nlohmann::ordered_json provenance;
};

/// Expert plus dataset (generated or loaded).
Problem build_problem(const ExperimentConfig &config);

} // namespace mfmoe
