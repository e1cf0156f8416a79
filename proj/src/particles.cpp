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
#include "mfmoe/particles.hpp"

#include "mfmoe/error.hpp"

namespace mfmoe {

ParticleSystem::ParticleSystem(std::size_t dim, std::vector<double> coords,
                               double time)
    : dim_(dim), coords_(std::move(coords)), time_(time) {
    if (dim_ == 0) {
        throw InvalidArgument("particle dimension must be at least 1");
    }
    if (coords_.size() % dim_ != 0) {
        throw InvalidArgument("coordinate count is not a multiple of dim");
    }
    if (!(time_ >= 0.0)) {
        throw InvalidArgument("time must be nonnegative");
    }
    for (double &c : coords_) {
        c = wrap_angle(c);
    }
}

ParticleSystem ParticleSystem::from_points(std::span<const TorusPoint> points,
                                           double time) {
    if (points.empty()) {
        throw InvalidArgument("particle system needs at least one particle");
    }
    const std::size_t d = points.front().dim();
    std::vector<double> coords;
    coords.reserve(points.size() * d);
    for (const auto &p : points) {
        if (p.dim() != d) {
            throw InvalidArgument("particles differ in dimension");
        }
        coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    }
    return ParticleSystem(d, std::move(coords), time);
}

TorusPoint ParticleSystem::point(std::size_t i) const {
    const auto c = particle(i);
    return TorusPoint(std::vector<double>(c.begin(), c.end()));
}

ParticleSystem ParticleSystem::prefix(std::size_t n) const {
    if (n == 0 || n > size()) {
        throw InvalidArgument("prefix length out of range");
    }
    return ParticleSystem(
        dim_, std::vector<double>(coords_.begin(), coords_.begin() + n * dim_),
        time_);
}

ParticleSystem
ParticleSystem::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != size()) {
        throw InvalidArgument("permutation length mismatch");
    }
    std::vector<double> out;
    out.reserve(coords_.size());
    for (std::size_t src : perm) {
        const auto p = particle(src);
        out.insert(out.end(), p.begin(), p.end());
    }
    return ParticleSystem(dim_, std::move(out), time_);
}

ParticleSystem sample_particles(const Rng &rng, std::size_t n,
                                std::size_t dim) {
    if (n == 0 || dim == 0) {
        throw InvalidArgument("need n >= 1 and dim >= 1");
    }
    std::vector<double> coords(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        Rng stream = rng.derive(i);
        fill_uniform(stream, std::span<double>(coords.data() + i * dim, dim));
    }
    return ParticleSystem(dim, std::move(coords));
}

EmpiricalMeasure::EmpiricalMeasure(std::size_t dim, std::vector<double> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
    if (dim_ == 0 || atoms_.empty() || atoms_.size() % dim_ != 0) {
        throw InvalidArgument("empirical measure needs at least one atom");
    }
}

EmpiricalMeasure
EmpiricalMeasure::from_points(std::span<const TorusPoint> points) {
    const auto system = ParticleSystem::from_points(points);
    return empirical_measure(system);
}

EmpiricalMeasure empirical_measure(const ParticleSystem &system) {
    return EmpiricalMeasure(
        system.dim(),
        std::vector<double>(system.flat().begin(), system.flat().end()));
}

} // namespace mfmoe
