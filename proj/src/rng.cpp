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
#include "mfmoe/rng.hpp"

#include <cmath>
#include <numbers>

namespace mfmoe {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ull;
} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed + kGamma) ^ mix64((stream + 1) * kStreamSalt))) {}

Rng::result_type Rng::operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double Rng::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() noexcept {
    // 1 - u keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r = (*this)();
    while (r >= limit) {
        r = (*this)();
    }
    return r % n;
}

Rng Rng::derive(std::uint64_t id) const noexcept {
    return Rng(FromKey{}, mix64(key_ ^ mix64((id + 1) * kStreamSalt + kGamma)));
}

} // namespace mfmoe
