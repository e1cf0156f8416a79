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
#include "mfmoe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "mfmoe/error.hpp"

namespace mfmoe {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 440;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char *const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;
    double hi = 1.0;

    [[nodiscard]] double t(double v) const {
        const double u = log ? std::log10(v) : v;
        return (u - lo) / (hi - lo);
    }
};

Axis make_axis(const std::vector<double> &values, bool log) {
    Axis a{log, std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
    for (double v : values) {
        const double u = log ? std::log10(v) : v;
        a.lo = std::min(a.lo, u);
        a.hi = std::max(a.hi, u);
    }
    if (a.hi - a.lo < 1e-12) {
        a.lo -= 0.5;
        a.hi += 0.5;
    } else {
        const double pad = 0.05 * (a.hi - a.lo);
        a.lo -= pad;
        a.hi += pad;
    }
    return a;
}

} // namespace

std::string render_svg(const Chart &chart) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto &s : chart.series) {
        if (s.x.size() != s.y.size()) {
            throw InvalidArgument("series has mismatched x and y");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) ||
                (chart.log_x && !(s.x[i] > 0)) ||
                (chart.log_y && !(s.y[i] > 0))) {
                throw InvalidArgument("value cannot be drawn on this axis");
            }
            xs.push_back(s.x[i]);
            ys.push_back(s.y[i]);
        }
    }
    if (xs.empty()) {
        throw InvalidArgument("nothing to plot");
    }
    const Axis ax = make_axis(xs, chart.log_x);
    const Axis ay = make_axis(ys, chart.log_y);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.t(v) * pw; };
    auto py = [&](double v) { return kTop + (1.0 - ay.t(v)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"24\" "
      << "text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
      << "</text>\n";
    o << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop)
      << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Five evenly spaced ticks per axis in plot units.
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double ux = ax.lo + f * (ax.hi - ax.lo);
        const double uy = ay.lo + f * (ay.hi - ay.lo);
        const double vx = chart.log_x ? std::pow(10.0, ux) : ux;
        const double vy = chart.log_y ? std::pow(10.0, uy) : uy;
        const double gx = kLeft + f * pw;
        const double gy = kTop + (1.0 - f) * ph;
        o << "<line x1=\"" << fixed(gx) << "\" y1=\"" << fixed(kTop + ph)
          << "\" x2=\"" << fixed(gx) << "\" y2=\"" << fixed(kTop + ph + 5)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fixed(gx) << "\" y=\"" << fixed(kTop + ph + 18)
          << "\" text-anchor=\"middle\">" << tick(vx) << "</text>\n";
        o << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(gy)
          << "\" x2=\"" << fixed(kLeft) << "\" y2=\"" << fixed(gy)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(gy + 4)
          << "\" text-anchor=\"end\">" << tick(vy) << "</text>\n";
    }
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\""
      << fixed(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << fixed(kTop + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed(kTop + ph / 2) << ")\">" << escape(chart.y_label)
      << "</text>\n";

    for (std::size_t si = 0; si < chart.series.size(); ++si) {
        const auto &s = chart.series[si];
        const char *color = kColors[si % std::size(kColors)];
        o << "<polyline class=\"series-" << si << "\" fill=\"none\" stroke=\""
          << color << "\" stroke-width=\"1.5\""
          << (s.markers ? "" : " stroke-dasharray=\"6 4\"") << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            o << (i ? " " : "") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
        }
        o << "\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                o << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\""
                  << fixed(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
                  << "\"/>\n";
            }
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(si);
        o << "<line x1=\"" << fixed(kLeft + pw + 12) << "\" y1=\"" << fixed(ly)
          << "\" x2=\"" << fixed(kLeft + pw + 32) << "\" y2=\"" << fixed(ly)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << fixed(kLeft + pw + 38) << "\" y=\""
          << fixed(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Chart rate_chart(std::span<const ResultRow> rows, std::size_t d) {
    if (rows.empty()) {
        throw InvalidArgument("results table is empty");
    }
    // Final time per (N, seed), then the mean over seeds.
    std::map<std::size_t, std::map<std::uint64_t, const ResultRow *>> last;
    for (const auto &r : rows) {
        auto &slot = last[r.n][r.seed];
        if (slot == nullptr || r.time >= slot->time) {
            slot = &r;
        }
    }
    Series data{"mean W2^2", {}, {}, true};
    for (const auto &[n, by_seed] : last) {
        double sum = 0.0;
        for (const auto &[seed, r] : by_seed) {
            sum += r->w2_sq;
        }
        data.x.push_back(static_cast<double>(n));
        data.y.push_back(sum / static_cast<double>(by_seed.size()));
    }
    Chart chart{"Mean W2^2 vs N", "N", "mean W2^2", true, true, {}};
    const bool positive = std::all_of(data.y.begin(), data.y.end(),
                                      [](double y) { return y > 0; });
    chart.log_y = positive;
    chart.series.push_back(data);
    if (d > 4 && data.x.size() >= 3 && positive) {
        const RateFit fit = fit_rate(rows, d);
        Series overlay{"C1 alpha_d(N)", {}, {}, false};
        for (std::size_t n : fit.n_values) {
            overlay.x.push_back(static_cast<double>(n));
            overlay.y.push_back(fit.c1 * alpha_d(n, d));
        }
        chart.series.push_back(std::move(overlay));
    }
    return chart;
}

Chart chaos_chart(std::span<const ResultRow> rows) {
    if (rows.empty()) {
        throw InvalidArgument("results table is empty");
    }
    std::map<std::size_t, std::map<double, std::pair<double, std::size_t>>>
        acc;
    for (const auto &r : rows) {
        auto &cell = acc[r.n][r.time];
        cell.first += r.pathwise;
        cell.second += 1;
    }
    Chart chart{"Pathwise chaos metric vs t", "t", "pathwise", false, false,
                {}};
    for (const auto &[n, by_t] : acc) {
        Series s{"N=" + std::to_string(n), {}, {}, true};
        for (const auto &[t, sum] : by_t) {
            s.x.push_back(t);
            s.y.push_back(sum.first / static_cast<double>(sum.second));
        }
        chart.series.push_back(std::move(s));
    }
    return chart;
}

} // namespace mfmoe
