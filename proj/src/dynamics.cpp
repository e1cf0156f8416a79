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
#include "mfmoe/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mfmoe/error.hpp"

namespace mfmoe {

namespace {

// Below this many (particle, datum) pairs threading costs more than it saves.
constexpr std::size_t kParallelThreshold = 256;

void check_model(const ExpertModel &model, const Dataset &data,
                 const ParticleSystem &system) {
    if (system.size() == 0) {
        throw InvalidArgument("particle system is empty");
    }
    if (system.dim() != model.dim()) {
        throw InvalidArgument("particle dimension does not match the model");
    }
    if (model.input_dim() != data.feature_dim()) {
        throw InvalidArgument("dataset feature dimension does not match the "
                              "model");
    }
}

void check_step(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument("step size must be positive");
    }
}

/// One RK4 step from `coords`; returns unwrapped new coordinates.
std::vector<double> rk4(DriftField &field, std::span<const double> coords,
                        double h, double *start_loss) {
    const std::size_t len = coords.size();
    std::vector<double> k1(len), k2(len), k3(len), k4(len), stage(len);

    field.evaluate(coords, k1);
    if (start_loss != nullptr) {
        *start_loss = loss_from_residuals(field.residuals());
    }
    for (std::size_t i = 0; i < len; ++i) {
        stage[i] = coords[i] + 0.5 * h * k1[i];
    }
    field.evaluate(stage, k2);
    for (std::size_t i = 0; i < len; ++i) {
        stage[i] = coords[i] + 0.5 * h * k2[i];
    }
    field.evaluate(stage, k3);
    for (std::size_t i = 0; i < len; ++i) {
        stage[i] = coords[i] + h * k3[i];
    }
    field.evaluate(stage, k4);
    std::vector<double> next(len);
    for (std::size_t i = 0; i < len; ++i) {
        next[i] = coords[i] +
                  (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return next;
}

} // namespace

std::vector<double> Trajectory::times() const {
    std::vector<double> out;
    out.reserve(checkpoints.size());
    for (const auto &c : checkpoints) {
        out.push_back(c.time);
    }
    return out;
}

DriftField::DriftField(const ExpertModel &model, const Dataset &data)
    : model_(model), data_(data), residuals_(data.size()) {}

void DriftField::resize(std::size_t particles) {
    const std::size_t n = data_.size();
    values_.resize(particles * n);
    grads_.resize(particles * n * model_.dim());
}

std::span<const double>
DriftField::compute_residuals(std::span<const double> coords) {
    const std::size_t d = model_.dim();
    const std::size_t n = data_.size();
    const std::size_t particles = coords.size() / d;
    resize(particles);
    const auto count = static_cast<std::ptrdiff_t>(particles);
#pragma omp parallel for schedule(static) if (particles * n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto theta = coords.subspan(static_cast<std::size_t>(i) * d, d);
        for (std::size_t j = 0; j < n; ++j) {
            values_[static_cast<std::size_t>(i) * n + j] =
                model_.value(theta, data_.input(j));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < particles; ++i) {
            acc += values_[i * n + j];
        }
        residuals_[j] = data_.label(j) - acc / static_cast<double>(particles);
    }
    return residuals_;
}

void DriftField::evaluate(std::span<const double> coords,
                          std::span<double> out) {
    const std::size_t d = model_.dim();
    const std::size_t n = data_.size();
    const std::size_t particles = coords.size() / d;
    resize(particles);
    const auto count = static_cast<std::ptrdiff_t>(particles);
    const bool parallel = particles * n >= kParallelThreshold;

#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto theta = coords.subspan(i * d, d);
        for (std::size_t j = 0; j < n; ++j) {
            values_[i * n + j] = model_.value_and_gradient(
                theta, data_.input(j),
                std::span<double>(grads_.data() + (i * n + j) * d, d));
        }
    }

    // Fixed particle order keeps F bit-identical for any thread count.
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < particles; ++i) {
            acc += values_[i * n + j];
        }
        residuals_[j] = data_.label(j) - acc / static_cast<double>(particles);
    }

    bool finite = true;
#pragma omp parallel for schedule(static) if (parallel) reduction(&& : finite)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double *b = out.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) {
            b[k] = 0.0;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double *g = grads_.data() + (i * n + j) * d;
            for (std::size_t k = 0; k < d; ++k) {
                b[k] += g[k] * residuals_[j];
            }
        }
        for (std::size_t k = 0; k < d; ++k) {
            finite = finite && std::isfinite(b[k]);
        }
    }
    if (!finite) {
        throw NumericalError("dynamics blow-up: non-finite drift");
    }
}

ParticleSystem step(const ExpertModel &model, const Dataset &data,
                    const ParticleSystem &system, double h) {
    check_step(h);
    check_model(model, data, system);
    DriftField field(model, data);
    auto next = rk4(field, system.flat(), h, nullptr);
    return ParticleSystem(system.dim(), std::move(next), system.time() + h);
}

Trajectory integrate(const ExpertModel &model, const Dataset &data,
                     const ParticleSystem &init, double horizon, double h,
                     std::size_t record_every) {
    check_step(h);
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("horizon must be positive");
    }
    if (h > horizon) {
        throw InvalidArgument("step size must not exceed the horizon");
    }
    if (record_every == 0) {
        throw InvalidArgument("record_every must be at least 1");
    }
    check_model(model, data, init);

    const auto steps = static_cast<std::size_t>(std::llround(horizon / h));
    Trajectory traj;
    traj.step_size = h;
    traj.horizon = horizon;
    traj.record_every = record_every;
    traj.step_losses.reserve(steps + 1);

    DriftField field(model, data);
    ParticleSystem current(init.dim(),
                           std::vector<double>(init.flat().begin(),
                                               init.flat().end()),
                           0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        double start_loss = 0.0;
        auto next = rk4(field, current.flat(), h, &start_loss);
        traj.step_losses.push_back(start_loss);
        if (k % record_every == 0) {
            traj.checkpoints.push_back({current.time(), current, start_loss});
        }
        current = ParticleSystem(current.dim(), std::move(next),
                                 static_cast<double>(k + 1) * h);
    }
    const double final_loss =
        loss_from_residuals(field.compute_residuals(current.flat()));
    traj.step_losses.push_back(final_loss);
    traj.checkpoints.push_back({current.time(), std::move(current), final_loss});
    return traj;
}

double descent_violation(const Trajectory &trajectory, double rel_tol) {
    const auto &losses = trajectory.step_losses;
    if (losses.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double tol = rel_tol * (1.0 + losses.front());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < losses.size(); ++k) {
        worst = std::max(worst, losses[k] - losses[k - 1] - tol);
    }
    return worst;
}

} // namespace mfmoe
