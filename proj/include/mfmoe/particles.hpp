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

#include "mfmoe/torus.hpp"

namespace mfmoe {

/**
 * The parameter vectors of N experts, stored contiguously (row i holds
 * particle i). Coordinates are kept in the canonical chart.
 */
class ParticleSystem {
  public:
    ParticleSystem() = default;
    /// `coords` has N*dim entries; wrapped on construction.
    ParticleSystem(std::size_t dim, std::vector<double> coords,
                   double time = 0.0);

    static ParticleSystem from_points(std::span<const TorusPoint> points,
                                      double time = 0.0);

    [[nodiscard]] std::size_t size() const noexcept {
        return dim_ == 0 ? 0 : coords_.size() / dim_;
    }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double time() const noexcept { return time_; }

    [[nodiscard]] std::span<const double> particle(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    [[nodiscard]] TorusPoint point(std::size_t i) const;
    [[nodiscard]] std::span<const double> flat() const noexcept {
        return coords_;
    }

    /// First n particles, same time.
    [[nodiscard]] ParticleSystem prefix(std::size_t n) const;
    /// Particles reordered so that output i is input perm[i].
    [[nodiscard]] ParticleSystem permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const ParticleSystem &,
                           const ParticleSystem &) = default;

  private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    double time_ = 0.0;
};

/// N i.i.d. uniform particles; particle i is drawn from `rng.derive(i)`, so
/// the first k particles do not depend on N.
ParticleSystem sample_particles(const Rng &rng, std::size_t n, std::size_t dim);

/// Uniform atomic probability measure (1/N) sum_i delta_{atom_i}.
class EmpiricalMeasure {
  public:
    EmpiricalMeasure() = default;
    EmpiricalMeasure(std::size_t dim, std::vector<double> atoms);

    static EmpiricalMeasure from_points(std::span<const TorusPoint> points);

    [[nodiscard]] std::size_t size() const noexcept {
        return dim_ == 0 ? 0 : atoms_.size() / dim_;
    }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double weight() const noexcept {
        return 1.0 / static_cast<double>(size());
    }
    [[nodiscard]] std::span<const double> atom(std::size_t i) const {
        return {atoms_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::span<const double> flat() const noexcept {
        return atoms_;
    }

  private:
    std::size_t dim_ = 0;
    std::vector<double> atoms_;
};

EmpiricalMeasure empirical_measure(const ParticleSystem &system);

} // namespace mfmoe
