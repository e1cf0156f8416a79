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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfmoe/config.hpp"
#include "mfmoe/dataset.hpp"
#include "mfmoe/experts.hpp"

namespace mfmoe {

/// One results.csv row: a (N, seed) cell at one checkpoint.
struct ResultRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double time = 0.0;
    double w2_sq = 0.0;
    double pathwise = 0.0;  // (1/N) sum_i sup_{s<=t} d_i(s)^2, this seed
    double pointwise = 0.0; // (1/N) sum_i d_i(t)^2, this seed
    double loss_interacting = 0.0;
    double loss_reference = 0.0;
};

struct RunRecord {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double pathwise = 0.0;
    double pointwise = 0.0;
    double w2_sq_final = 0.0;
    double runtime_ms = 0.0;
};

/// Seed aggregates per N at the final time.
struct NSummary {
    std::size_t n = 0;
    std::size_t seeds = 0;
    double w2_sq_mean = 0.0;
    double w2_sq_stderr = 0.0;
    double pathwise = 0.0;       // mean over seeds of the per-seed value
    double pathwise_stderr = 0.0;
    double pointwise = 0.0;      // (1/N) sum_i sup_t mean_seeds d_i(t)^2
};

struct SweepResult {
    std::vector<ResultRow> rows;  // ordered by (N, seed, t)
    std::vector<RunRecord> runs;  // ordered by (N, seed)
    std::vector<NSummary> summary;
    std::vector<std::string> warnings;
};

/// Validates the sweep section, then runs every (N, seed) cell. Cells run
/// in parallel; every output is independent of the thread count.
SweepResult run_sweep(const ExperimentConfig &config, const ExpertModel &model,
                      const Dataset &data);

/// alpha_d(N) = N^(-2/d) + N^(-1/2).
double alpha_d(std::size_t n, std::size_t d);

struct RateFit {
    std::size_t dim = 0;
    double time = 0.0;
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> seed_counts;
    std::vector<double> means;
    std::vector<double> stderrs;
    double c1 = 0.0;          // least squares through the origin
    double c1_p95 = 0.0;      // 95th percentile of per-seed w2_sq / alpha_d
    double residual_norm = 0.0;
    double slope = 0.0;       // log mean vs log N
    double intercept = 0.0;
    double slope_stderr = 0.0;
    bool rate_consistent = false;
    bool envelope_holds = false; // c1_p95 * alpha_d >= every seed mean
};

/// Slopes at or below this multiple of -2/d count as rate consistent.
inline constexpr double kSlopeTolerance = 0.75;

/// Fits rows at `time` (default: each cell's last checkpoint). Throws
/// InvalidArgument for d <= 4, fewer than 3 distinct N, or nonpositive means.
RateFit fit_rate(std::span<const ResultRow> rows, std::size_t d,
                 std::optional<double> time = std::nullopt);

struct BoundCheck {
    std::string name;
    bool pass = true;
    double observed = 0.0;
    double bound = 0.0;
    nlohmann::ordered_json witness; // null when the bound holds
};

struct BoundsReport {
    std::size_t trials = 0;
    std::vector<BoundCheck> checks;

    [[nodiscard]] bool pass() const;
};

/// Expert derivative bound spot checks, the drift Lipschitz inequality on random
/// empirical measures and, for quantum experts, the unit bounds.
BoundsReport verify_bounds(const ExperimentConfig &config,
                           const ExpertModel &model, const Dataset &data);

std::string results_csv(std::span<const ResultRow> rows);
std::vector<ResultRow> parse_results_csv(const std::filesystem::path &path);
std::string runs_csv(std::span<const RunRecord> runs);
std::string summary_csv(std::span<const NSummary> summary);
nlohmann::ordered_json fit_json(const RateFit &fit);
nlohmann::ordered_json bounds_json(const BoundsReport &report);

} // namespace mfmoe
