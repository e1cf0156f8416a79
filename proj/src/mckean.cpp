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
#include "mfmoe/mckean.hpp"

#include <algorithm>
#include <cmath>

#include "mfmoe/error.hpp"

namespace mfmoe {

namespace {

void check_runs(std::span<const CoupledRun> runs) {
    if (runs.empty()) {
        throw InvalidArgument("need at least one coupled run");
    }
    const std::size_t n = runs.front().particles();
    const auto times = runs.front().interacting.times();
    for (const auto &run : runs) {
        run.validate();
        if (run.particles() != n) {
            throw InvalidArgument("coupled runs differ in particle count");
        }
        if (run.interacting.times() != times) {
            throw InvalidArgument("schedule mismatch between seeds");
        }
    }
}

} // namespace

void CoupledRun::validate() const {
    if (!reference) {
        throw InvalidArgument("coupled run has no reference trajectory");
    }
    if (interacting.checkpoints.empty()) {
        throw InvalidArgument("empty interacting trajectory");
    }
    if (interacting.step_size != reference->step_size ||
        interacting.horizon != reference->horizon ||
        interacting.times() != reference->times()) {
        throw InvalidArgument("schedule mismatch between interacting and "
                              "reference trajectories");
    }
    const auto &a = interacting.checkpoints.front().system;
    const auto &b = reference->checkpoints.front().system;
    if (b.size() < a.size() || a.dim() != b.dim()) {
        throw InvalidArgument("reference ensemble smaller than the "
                              "interacting system");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto pa = a.particle(i);
        const auto pb = b.particle(i);
        if (!std::equal(pa.begin(), pa.end(), pb.begin())) {
            throw InvalidArgument("coupled particles do not share initial "
                                  "conditions");
        }
    }
}

Trajectory integrate_reference(const ExpertModel &model, const Dataset &data,
                               const ParticleSystem &init, double horizon,
                               double h, std::size_t record_every) {
    return integrate(model, data, init, horizon, h, record_every);
}

CoupledRun make_coupled_run(Trajectory interacting,
                            std::shared_ptr<const Trajectory> reference) {
    CoupledRun run{std::move(interacting), std::move(reference)};
    run.validate();
    return run;
}

double pair_displacement_sq(const CoupledRun &run, std::size_t checkpoint,
                            std::size_t i) {
    const double dist = torus_l1_distance(
        run.interacting.checkpoints[checkpoint].system.particle(i),
        run.reference->checkpoints[checkpoint].system.particle(i));
    return dist * dist;
}

double mean_displacement_sq(const CoupledRun &run, std::size_t checkpoint) {
    const std::size_t n = run.particles();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += pair_displacement_sq(run, checkpoint, i);
    }
    return acc / static_cast<double>(n);
}

double pathwise_chaos_metric_until(const CoupledRun &run, std::size_t last) {
    const std::size_t n = run.particles();
    last = std::min(last, run.interacting.checkpoints.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sup = 0.0;
        for (std::size_t c = 0; c <= last; ++c) {
            sup = std::max(sup, pair_displacement_sq(run, c, i));
        }
        acc += sup;
    }
    return acc / static_cast<double>(n);
}

double pathwise_chaos_metric(std::span<const CoupledRun> runs) {
    check_runs(runs);
    double acc = 0.0;
    for (const auto &run : runs) {
        acc += pathwise_chaos_metric_until(
            run, run.interacting.checkpoints.size() - 1);
    }
    return acc / static_cast<double>(runs.size());
}

double pathwise_chaos_metric(const CoupledRun &run) {
    return pathwise_chaos_metric(std::span<const CoupledRun>(&run, 1));
}

double pointwise_chaos_metric(std::span<const CoupledRun> runs) {
    check_runs(runs);
    const std::size_t n = runs.front().particles();
    const std::size_t checkpoints = runs.front().interacting.checkpoints.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sup = 0.0;
        for (std::size_t c = 0; c < checkpoints; ++c) {
            double mean = 0.0;
            for (const auto &run : runs) {
                mean += pair_displacement_sq(run, c, i);
            }
            sup = std::max(sup, mean / static_cast<double>(runs.size()));
        }
        acc += sup;
    }
    return acc / static_cast<double>(n);
}

double pointwise_chaos_metric(const CoupledRun &run) {
    return pointwise_chaos_metric(std::span<const CoupledRun>(&run, 1));
}

} // namespace mfmoe
