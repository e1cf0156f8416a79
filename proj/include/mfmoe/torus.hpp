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
#include <numbers>
#include <span>
#include <vector>

#include "mfmoe/rng.hpp"

namespace mfmoe {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to the canonical chart [0, 2pi). Throws on non-finite input.
double wrap_angle(double raw);

/**
 * A point of the d-dimensional torus with period 2pi.
 *
 * Coordinates are always held in the canonical chart [0, 2pi); the
 * constructor wraps whatever it is given.
 */
class TorusPoint {
  public:
    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> raw);

    [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
    [[nodiscard]] std::span<const double> coords() const noexcept {
        return coords_;
    }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }

    friend bool operator==(const TorusPoint &, const TorusPoint &) = default;

  private:
    std::vector<double> coords_;
};

TorusPoint wrap(std::span<const double> raw);

/// Geodesic l1 distance: sum_i min(|a_i - b_i|, 2pi - |a_i - b_i|).
/// Accepts raw (unwrapped) coordinates; each term lies in [0, pi].
double torus_l1_distance(std::span<const double> a, std::span<const double> b);
double torus_l1_distance(const TorusPoint &a, const TorusPoint &b);

/// Coordinatewise addition mod 2pi.
TorusPoint translate(const TorusPoint &p, std::span<const double> shift);

/// d i.i.d. coordinates uniform on [0, 2pi).
TorusPoint sample_uniform(Rng &rng, std::size_t d);

/// Writes `out.size()` i.i.d. uniform coordinates.
void fill_uniform(Rng &rng, std::span<double> out);

} // namespace mfmoe
