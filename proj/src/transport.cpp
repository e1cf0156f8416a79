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
#include "mfmoe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfmoe/error.hpp"
#include "mfmoe/io.hpp"

namespace mfmoe {

double sorted_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (double t : terms) {
        total += t;
    }
    return total;
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0 || entries_.size() != rows_ * cols_) {
        throw InvalidArgument("cost matrix shape mismatch");
    }
}

CostMatrix CostMatrix::between(const EmpiricalMeasure &a,
                               const EmpiricalMeasure &b, int power) {
    if (a.size() == 0 || b.size() == 0) {
        throw InvalidArgument("measures must be nonempty");
    }
    if (a.dim() != b.dim()) {
        throw InvalidArgument("dimension mismatch between measures");
    }
    if (power != 1 && power != 2) {
        throw InvalidArgument("cost exponent must be 1 or 2");
    }
    const std::size_t rows = a.size();
    const std::size_t cols = b.size();
    std::vector<double> entries(rows * cols);
    const auto count = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= 65536)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < cols; ++j) {
            const double dist = torus_l1_distance(a.atom(i), b.atom(j));
            entries[i * cols + j] = power == 2 ? dist * dist : dist;
        }
    }
    return CostMatrix(rows, cols, std::move(entries));
}

double CostMatrix::max_entry() const noexcept {
    return *std::max_element(entries_.begin(), entries_.end());
}

double TransportPlan::marginal_error() const {
    std::vector<double> row_mass(rows, 0.0), col_mass(cols, 0.0);
    for (const auto &t : transfers) {
        row_mass[t.from] += t.mass;
        col_mass[t.to] += t.mass;
    }
    double worst = 0.0;
    for (double m : row_mass) {
        worst = std::max(worst, std::abs(m - 1.0 / static_cast<double>(rows)));
    }
    for (double m : col_mass) {
        worst = std::max(worst, std::abs(m - 1.0 / static_cast<double>(cols)));
    }
    return worst;
}

std::vector<std::size_t> solve_assignment(const CostMatrix &cost) {
    if (cost.rows() != cost.cols()) {
        throw InvalidArgument("assignment needs a square cost matrix");
    }
    const std::size_t n = cost.rows();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-based shortest augmenting path formulation; column 0 is a sentinel.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) {
        row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

namespace {

TransportPlan assignment_plan(const CostMatrix &cost) {
    const auto match = solve_assignment(cost);
    TransportPlan plan;
    plan.rows = plan.cols = cost.rows();
    const double mass = 1.0 / static_cast<double>(cost.rows());
    std::vector<double> terms;
    for (std::size_t i = 0; i < match.size(); ++i) {
        const double c = cost(i, match[i]);
        plan.transfers.push_back({i, match[i], mass, c});
        terms.push_back(c);
    }
    plan.total_cost = sorted_sum(terms) * mass;
    return plan;
}

} // namespace

double w2_squared_equal(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("size mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) +
                              "): use w2_squared_general");
    }
    return assignment_plan(CostMatrix::between(a, b, 2)).total_cost;
}

double w2_squared_general(const EmpiricalMeasure &a,
                          const EmpiricalMeasure &b) {
    return solve_transport(CostMatrix::between(a, b, 2)).total_cost;
}

TransportPlan optimal_plan(const EmpiricalMeasure &a, const EmpiricalMeasure &b,
                           int power) {
    const CostMatrix cost = CostMatrix::between(a, b, power);
    return a.size() == b.size() ? assignment_plan(cost) : solve_transport(cost);
}

double w2_squared(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
    return optimal_plan(a, b, 2).total_cost;
}

double w2(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
    return std::sqrt(std::max(0.0, w2_squared(a, b)));
}

double w1(const EmpiricalMeasure &a, const EmpiricalMeasure &b) {
    return optimal_plan(a, b, 1).total_cost;
}

std::string plan_csv(const TransportPlan &plan) {
    std::ostringstream out;
    out << "i,j,mass,cost\n";
    for (const auto &t : plan.transfers) {
        out << t.from << ',' << t.to << ',' << io::format_double(t.mass) << ','
            << io::format_double(t.cost) << '\n';
    }
    return out.str();
}

} // namespace mfmoe
