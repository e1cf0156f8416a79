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
#include <vector>

#include "mfmoe/dataset.hpp"
#include "mfmoe/experts.hpp"
#include "mfmoe/particles.hpp"

namespace mfmoe {

struct Checkpoint {
    double time = 0.0;
    ParticleSystem system;
    double loss = 0.0;
};

/// Recorded gradient-flow run on [0, T].
struct Trajectory {
    double step_size = 0.0;
    double horizon = 0.0;
    std::size_t record_every = 1;
    std::vector<Checkpoint> checkpoints;
    /// Loss before every step plus the loss of the final state.
    std::vector<double> step_losses;

    [[nodiscard]] const Checkpoint &final() const { return checkpoints.back(); }
    /// Checkpoint times in order.
    [[nodiscard]] std::vector<double> times() const;
};

/**
 * Evaluates the drift b(theta^i, mu_Theta) of every particle in one pass.
 *
 * F(Theta, x_j) is computed once per call from the N x n table of expert
 * values and summed in particle order, so the result does not depend on the
 * number of threads.
 */
class DriftField {
  public:
    DriftField(const ExpertModel &model, const Dataset &data);

    /// `coords` holds N*d raw (possibly unwrapped) coordinates; writes N*d
    /// drift components. Throws NumericalError on non-finite output.
    void evaluate(std::span<const double> coords, std::span<double> out);

    /// Residuals y_j - F(Theta, x_j) of the last evaluate() call.
    [[nodiscard]] std::span<const double> residuals() const noexcept {
        return residuals_;
    }

    /// Residuals only (no gradients).
    std::span<const double> compute_residuals(std::span<const double> coords);

  private:
    void resize(std::size_t particles);

    const ExpertModel &model_;
    const Dataset &data_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<double> residuals_;
};

/// One classical RK4 step of the coupled system, rewrapped; time += h.
ParticleSystem step(const ExpertModel &model, const Dataset &data,
                    const ParticleSystem &system, double h);

/// Fixed-step RK4 on [0, T] with round(T/h) steps. Checkpoints at t = 0,
/// every `record_every` steps, and at the final step.
Trajectory integrate(const ExpertModel &model, const Dataset &data,
                     const ParticleSystem &init, double horizon, double h,
                     std::size_t record_every = 1);

/// Largest per-step loss increase beyond rel_tol * (1 + L_0); <= 0 means
/// the run descends.
double descent_violation(const Trajectory &trajectory, double rel_tol = 1e-9);

} // namespace mfmoe
