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
// Primal network simplex for the balanced transportation problem between two
// uniform measures. Masses are scaled to integers (each source supplies
// cols/g units, each sink demands rows/g units, g = gcd) so flows are exact.
// The basis is kept as a strongly feasible spanning tree rooted at an
// artificial node; leaving arcs follow the usual last-blocking-arc rule,
// which rules out cycling under degeneracy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mfmoe/error.hpp"
#include "mfmoe/transport.hpp"

namespace mfmoe {

namespace {

class TransportSimplex {
  public:
    explicit TransportSimplex(const CostMatrix &cost)
        : cost_(cost), rows_(cost.rows()), cols_(cost.cols()),
          real_arcs_(rows_ * cols_), nodes_(rows_ + cols_ + 1),
          root_(rows_ + cols_) {
        const std::size_t arcs = real_arcs_ + rows_ + cols_;
        flow_.assign(arcs, 0);
        parent_.assign(nodes_, kNone);
        pred_.assign(nodes_, kNone);
        up_.assign(nodes_, 0);
        depth_.assign(nodes_, 0);
        pi_.assign(nodes_, 0.0);
        first_child_.assign(nodes_, kNone);
        next_sibling_.assign(nodes_, kNone);
        prev_sibling_.assign(nodes_, kNone);

        const auto g = std::gcd(rows_, cols_);
        supply_ = static_cast<std::int64_t>(cols_ / g);
        demand_ = static_cast<std::int64_t>(rows_ / g);
        total_ = static_cast<double>(supply_) * static_cast<double>(rows_);

        const double max_cost = cost.max_entry();
        art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_);
        eps_ = 1e-14 * art_cost_;
        block_ = std::max<std::size_t>(
            16, static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs))));

        // Initial tree: every node hangs off the root by its artificial arc.
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t e = real_arcs_ + i;
            flow_[e] = supply_;
            attach(i, root_, e, true);
            pi_[i] = -art_cost_;
            depth_[i] = 1;
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            const std::size_t node = rows_ + j;
            const std::size_t e = real_arcs_ + rows_ + j;
            flow_[e] = demand_;
            attach(node, root_, e, false);
            pi_[node] = art_cost_;
            depth_[node] = 1;
        }
    }

    TransportPlan solve() {
        const std::size_t arcs = flow_.size();
        const std::size_t max_pivots = 1000 * arcs + 100000;
        std::size_t pivots = 0;
        while (true) {
            const std::size_t entering = find_entering();
            if (entering == kNone) {
                break;
            }
            pivot(entering);
            if (++pivots > max_pivots) {
                throw NumericalError("network simplex exceeded pivot limit");
            }
        }
        for (std::size_t e = real_arcs_; e < arcs; ++e) {
            if (flow_[e] != 0) {
                throw NumericalError("network simplex left flow on an "
                                     "artificial arc");
            }
        }
        TransportPlan plan;
        plan.rows = rows_;
        plan.cols = cols_;
        std::vector<double> terms;
        for (std::size_t e = 0; e < real_arcs_; ++e) {
            if (flow_[e] == 0) {
                continue;
            }
            const std::size_t i = e / cols_;
            const std::size_t j = e % cols_;
            const double mass = static_cast<double>(flow_[e]) / total_;
            plan.transfers.push_back({i, j, mass, cost_(i, j)});
            terms.push_back(static_cast<double>(flow_[e]) * cost_(i, j));
        }
        plan.total_cost = sorted_sum(terms) / total_;
        return plan;
    }

  private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    [[nodiscard]] std::size_t source(std::size_t e) const {
        if (e < real_arcs_) {
            return e / cols_;
        }
        const std::size_t k = e - real_arcs_;
        return k < rows_ ? k : root_;
    }
    [[nodiscard]] std::size_t target(std::size_t e) const {
        if (e < real_arcs_) {
            return rows_ + e % cols_;
        }
        const std::size_t k = e - real_arcs_;
        return k < rows_ ? root_ : rows_ + (k - rows_);
    }
    [[nodiscard]] double arc_cost(std::size_t e) const {
        return e < real_arcs_ ? cost_.entries()[e] : art_cost_;
    }
    [[nodiscard]] double reduced_cost(std::size_t e) const {
        return arc_cost(e) + pi_[source(e)] - pi_[target(e)];
    }

    void attach(std::size_t child, std::size_t parent, std::size_t arc,
                bool up) {
        parent_[child] = parent;
        pred_[child] = arc;
        up_[child] = up ? 1 : 0;
        prev_sibling_[child] = kNone;
        next_sibling_[child] = first_child_[parent];
        if (first_child_[parent] != kNone) {
            prev_sibling_[first_child_[parent]] = child;
        }
        first_child_[parent] = child;
    }

    void detach(std::size_t child) {
        const std::size_t p = parent_[child];
        if (prev_sibling_[child] != kNone) {
            next_sibling_[prev_sibling_[child]] = next_sibling_[child];
        } else {
            first_child_[p] = next_sibling_[child];
        }
        if (next_sibling_[child] != kNone) {
            prev_sibling_[next_sibling_[child]] = prev_sibling_[child];
        }
        prev_sibling_[child] = next_sibling_[child] = kNone;
        parent_[child] = kNone;
    }

    // Block search pricing: scan arcs cyclically, return the most negative
    // reduced cost within the first block that has one.
    std::size_t find_entering() {
        const std::size_t arcs = flow_.size();
        double best = -eps_;
        std::size_t best_arc = kNone;
        std::size_t scanned_in_block = 0;
        for (std::size_t count = 0; count < arcs; ++count) {
            const std::size_t e = next_arc_;
            next_arc_ = next_arc_ + 1 == arcs ? 0 : next_arc_ + 1;
            const double rc = reduced_cost(e);
            if (rc < best) {
                best = rc;
                best_arc = e;
            }
            if (++scanned_in_block == block_) {
                if (best_arc != kNone) {
                    return best_arc;
                }
                scanned_in_block = 0;
            }
        }
        return best_arc;
    }

    void pivot(std::size_t entering) {
        const std::size_t first = source(entering);
        const std::size_t second = target(entering);

        std::size_t a = first;
        std::size_t b = second;
        while (depth_[a] > depth_[b]) {
            a = parent_[a];
        }
        while (depth_[b] > depth_[a]) {
            b = parent_[b];
        }
        while (a != b) {
            a = parent_[a];
            b = parent_[b];
        }
        const std::size_t join = a;

        // Flow moves join -> ... -> first -> second -> ... -> join.
        constexpr std::int64_t kInfFlow = std::numeric_limits<std::int64_t>::max();
        std::int64_t delta = kInfFlow;
        std::size_t leave = kNone;
        bool leave_on_first = true;
        for (std::size_t w = first; w != join; w = parent_[w]) {
            if (up_[w] && flow_[pred_[w]] < delta) {
                delta = flow_[pred_[w]];
                leave = w;
                leave_on_first = true;
            }
        }
        for (std::size_t w = second; w != join; w = parent_[w]) {
            if (!up_[w] && flow_[pred_[w]] <= delta) {
                delta = flow_[pred_[w]];
                leave = w;
                leave_on_first = false;
            }
        }
        if (leave == kNone) {
            throw NumericalError("transportation problem is unbounded");
        }

        if (delta > 0) {
            for (std::size_t w = first; w != join; w = parent_[w]) {
                flow_[pred_[w]] += up_[w] ? -delta : delta;
            }
            for (std::size_t w = second; w != join; w = parent_[w]) {
                flow_[pred_[w]] += up_[w] ? delta : -delta;
            }
        }
        flow_[entering] = delta;

        // Re-hang the subtree cut off by the leaving arc under the entering
        // arc, reversing the path from the entering endpoint to `leave`.
        const std::size_t u_in = leave_on_first ? first : second;
        const std::size_t v_in = leave_on_first ? second : first;

        path_.clear();
        for (std::size_t w = u_in;; w = parent_[w]) {
            path_.push_back(w);
            if (w == leave) {
                break;
            }
        }
        old_pred_.resize(path_.size());
        old_up_.resize(path_.size());
        for (std::size_t k = 0; k < path_.size(); ++k) {
            old_pred_[k] = pred_[path_[k]];
            old_up_[k] = up_[path_[k]];
        }
        for (std::size_t w : path_) {
            detach(w);
        }
        attach(u_in, v_in, entering, u_in == first);
        for (std::size_t k = 1; k < path_.size(); ++k) {
            attach(path_[k], path_[k - 1], old_pred_[k - 1], !old_up_[k - 1]);
        }

        refresh_subtree(u_in);
    }

    /// Recomputes depth and potentials below `top` from its parent.
    void refresh_subtree(std::size_t top) {
        stack_.clear();
        stack_.push_back(top);
        while (!stack_.empty()) {
            const std::size_t w = stack_.back();
            stack_.pop_back();
            const std::size_t p = parent_[w];
            depth_[w] = depth_[p] + 1;
            const double c = arc_cost(pred_[w]);
            // Tree arcs have zero reduced cost c + pi[src] - pi[tgt].
            pi_[w] = up_[w] ? pi_[p] - c : pi_[p] + c;
            for (std::size_t ch = first_child_[w]; ch != kNone;
                 ch = next_sibling_[ch]) {
                stack_.push_back(ch);
            }
        }
    }

    const CostMatrix &cost_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t real_arcs_;
    std::size_t nodes_;
    std::size_t root_;

    std::int64_t supply_ = 0;
    std::int64_t demand_ = 0;
    double total_ = 0.0;
    double art_cost_ = 0.0;
    double eps_ = 0.0;
    std::size_t block_ = 16;
    std::size_t next_arc_ = 0;

    std::vector<std::int64_t> flow_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> pred_;
    std::vector<char> up_;
    std::vector<std::size_t> depth_;
    std::vector<double> pi_;
    std::vector<std::size_t> first_child_;
    std::vector<std::size_t> next_sibling_;
    std::vector<std::size_t> prev_sibling_;

    std::vector<std::size_t> path_;
    std::vector<std::size_t> old_pred_;
    std::vector<char> old_up_;
    std::vector<std::size_t> stack_;
};

} // namespace

TransportPlan solve_transport(const CostMatrix &cost) {
    return TransportSimplex(cost).solve();
}

} // namespace mfmoe
