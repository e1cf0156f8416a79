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
#include <doctest.h>

#include <regex>

#include "mfmoe/error.hpp"
#include "mfmoe/plot.hpp"

using namespace mfmoe;

namespace {

std::string points_of(const std::string &svg, int series) {
    const std::regex re("class=\"series-" + std::to_string(series) +
                        "\"[^>]*points=\"([^\"]*)\"");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, re));
    return m[1];
}

std::vector<ResultRow> exact_rows(std::size_t d) {
    std::vector<ResultRow> rows;
    for (std::size_t n : {8, 16, 32, 64, 128}) {
        ResultRow r;
        r.n = n;
        r.m = 1024;
        r.time = 1.0;
        r.w2_sq = 2.5 * alpha_d(n, d);
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_CASE("exact fit overlay passes through every point") {
    const auto svg = render_svg(rate_chart(exact_rows(6), 6));
    CHECK(points_of(svg, 0) == points_of(svg, 1));
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("rendering is deterministic") {
    const auto rows = exact_rows(6);
    CHECK(render_svg(rate_chart(rows, 6)) == render_svg(rate_chart(rows, 6)));
    CHECK(render_svg(chaos_chart(rows)) == render_svg(chaos_chart(rows)));
}

TEST_CASE("no overlay outside the rate hypotheses") {
    const auto chart = rate_chart(exact_rows(4), 4);
    CHECK(chart.series.size() == 1);
}

TEST_CASE("empty tables are rejected") {
    CHECK_THROWS_AS(rate_chart({}, 6), InvalidArgument);
    CHECK_THROWS_AS(chaos_chart({}), InvalidArgument);
    CHECK_THROWS_AS(render_svg(Chart{}), InvalidArgument);
}

TEST_CASE("labels are escaped") {
    Chart c{"a<b & c", "x", "y", false, false, {{"s", {1, 2}, {3, 4}, true}}};
    const auto svg = render_svg(c);
    CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);
}
