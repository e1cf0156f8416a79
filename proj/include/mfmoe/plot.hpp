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
#include <string>
#include <vector>

#include "mfmoe/experiments.hpp"

namespace mfmoe {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Self-contained SVG; identical input gives identical bytes.
std::string render_svg(const Chart &chart);

/// Seed-mean W2^2 at the final time against N on log-log axes, with the
/// C1 * alpha_d(N) overlay evaluated at the same N when a fit is possible.
Chart rate_chart(std::span<const ResultRow> rows, std::size_t d);

/// Seed-mean pathwise chaos metric against t, one line per N.
Chart chaos_chart(std::span<const ResultRow> rows);

} // namespace mfmoe
