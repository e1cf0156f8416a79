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
#include <memory>
#include <span>
#include <vector>

#include "mfmoe/dynamics.hpp"

namespace mfmoe {

/**
 * An interacting N-particle run paired with an M-particle reference run
 * (M >= N) whose first N particles start at the interacting particles'
 * initial positions. The reference ensemble stands in for i.i.d. McKean
 * processes driven by the limit law.
 */
struct CoupledRun {
    Trajectory interacting;
    std::shared_ptr<const Trajectory> reference;

    [[nodiscard]] std::size_t particles() const {
        return interacting.checkpoints.front().system.size();
    }
    /// Throws InvalidArgument if schedules differ or the initial conditions
    /// of the coupled pairs are not identical.
    void validate() const;
};

/// Same integrator contract as `integrate`; the reference drift uses the
/// reference ensemble's own empirical measure.
Trajectory integrate_reference(const ExpertModel &model, const Dataset &data,
                               const ParticleSystem &init, double horizon,
                               double h, std::size_t record_every = 1);

CoupledRun make_coupled_run(Trajectory interacting,
                            std::shared_ptr<const Trajectory> reference);

/// Squared torus-l1 displacement of coupled pair i at checkpoint c.
double pair_displacement_sq(const CoupledRun &run, std::size_t checkpoint,
                            std::size_t i);

/// (1/N) sum_i E[ sup_t |theta_t^i - bar theta_t^i|_1^2 ], the expectation
/// taken as the mean over the given runs (one per seed).
double pathwise_chaos_metric(std::span<const CoupledRun> runs);
double pathwise_chaos_metric(const CoupledRun &run);

/// (1/N) sum_i sup_t E[ |theta_t^i - bar theta_t^i|_1^2 ].
double pointwise_chaos_metric(std::span<const CoupledRun> runs);
double pointwise_chaos_metric(const CoupledRun &run);

/// Same quantities restricted to checkpoints with index <= last.
double pathwise_chaos_metric_until(const CoupledRun &run, std::size_t last);
/// (1/N) sum_i |theta_t^i - bar theta_t^i|^2 at one checkpoint.
double mean_displacement_sq(const CoupledRun &run, std::size_t checkpoint);

} // namespace mfmoe
