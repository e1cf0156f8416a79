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
#include "mfmoe/torus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfmoe/error.hpp"

namespace mfmoe {

double wrap_angle(double raw) {
    if (!std::isfinite(raw)) {
        throw InvalidArgument("non-finite coordinate");
    }
    double r = std::fmod(raw, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    // r + 2pi can round up to exactly 2pi for tiny negative r.
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

TorusPoint::TorusPoint(std::vector<double> raw) : coords_(std::move(raw)) {
    if (coords_.empty()) {
        throw InvalidArgument("torus dimension must be at least 1");
    }
    for (double &c : coords_) {
        c = wrap_angle(c);
    }
}

TorusPoint wrap(std::span<const double> raw) {
    return TorusPoint(std::vector<double>(raw.begin(), raw.end()));
}

double torus_l1_distance(std::span<const double> a,
                         std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dimension mismatch: " +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double delta = std::abs(a[i] - b[i]);
        if (delta >= kTwoPi) {
            delta = std::fmod(delta, kTwoPi);
        }
        total += std::min(delta, kTwoPi - delta);
    }
    return total;
}

double torus_l1_distance(const TorusPoint &a, const TorusPoint &b) {
    return torus_l1_distance(a.coords(), b.coords());
}

TorusPoint translate(const TorusPoint &p, std::span<const double> shift) {
    if (shift.size() != p.dim()) {
        throw InvalidArgument("dimension mismatch in translate");
    }
    std::vector<double> out(p.coords().begin(), p.coords().end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += shift[i];
    }
    return TorusPoint(std::move(out));
}

TorusPoint sample_uniform(Rng &rng, std::size_t d) {
    std::vector<double> coords(d);
    fill_uniform(rng, coords);
    return TorusPoint(std::move(coords));
}

void fill_uniform(Rng &rng, std::span<double> out) {
    for (double &c : out) {
        c = wrap_angle(kTwoPi * rng.uniform());
    }
}

} // namespace mfmoe
