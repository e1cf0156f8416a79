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
#include <span>
#include <string>
#include <vector>

#include "mfmoe/particles.hpp"

namespace mfmoe {

/// entries(i, j) = torus_l1_distance(a_i, b_j)^power.
class CostMatrix {
  public:
    CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static CostMatrix between(const EmpiricalMeasure &a,
                              const EmpiricalMeasure &b, int power = 2);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }
    [[nodiscard]] std::span<const double> entries() const noexcept {
        return entries_;
    }
    [[nodiscard]] double max_entry() const noexcept;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;
};

struct Transfer {
    std::size_t from = 0;
    std::size_t to = 0;
    double mass = 0.0;
    double cost = 0.0; // ground cost of the pair
};

/// Coupling of two uniform measures: row marginals 1/rows, column marginals
/// 1/cols.
struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Transfer> transfers;
    double total_cost = 0.0;

    /// Largest deviation of any marginal from its target.
    [[nodiscard]] double marginal_error() const;
};

/// Sum in ascending order, so relabeling atoms leaves totals bit-identical.
double sorted_sum(std::vector<double> terms);

/// Min-cost perfect matching (Hungarian method with potentials, O(n^3)).
/// Returns the column matched to each row; ties go to the lowest index.
std::vector<std::size_t> solve_assignment(const CostMatrix &cost);

/// Optimal plan between uniform marginals of any sizes (transportation
/// network simplex on integer-scaled masses).
TransportPlan solve_transport(const CostMatrix &cost);

/// W_2^2 for equal atom counts via the assignment fast path. Throws on a
/// size mismatch.
double w2_squared_equal(const EmpiricalMeasure &a, const EmpiricalMeasure &b);
/// W_2^2 for arbitrary atom counts via network simplex.
double w2_squared_general(const EmpiricalMeasure &a, const EmpiricalMeasure &b);
/// W_2^2, choosing the solver by size.
double w2_squared(const EmpiricalMeasure &a, const EmpiricalMeasure &b);
double w2(const EmpiricalMeasure &a, const EmpiricalMeasure &b);
/// W_1 with the same solvers and cost exponent 1.
double w1(const EmpiricalMeasure &a, const EmpiricalMeasure &b);

/// Optimal plan for cost exponent `power` in {1, 2}.
TransportPlan optimal_plan(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                           int power = 2);

/// CSV dump "i,j,mass,cost" with one row per transfer.
std::string plan_csv(const TransportPlan &plan);

} // namespace mfmoe
