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
#include "mfmoe/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mfmoe/error.hpp"
#include "mfmoe/io.hpp"
#include "mfmoe/mckean.hpp"
#include "mfmoe/rng.hpp"
#include "mfmoe/torus.hpp"
#include "mfmoe/transport.hpp"

namespace mfmoe {

using Json = nlohmann::ordered_json;

namespace {

struct Cell {
    std::vector<ResultRow> rows;
    RunRecord record;
    CoupledRun run;
};

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

double stderr_of(std::span<const double> v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    const double k = static_cast<double>(v.size());
    return std::sqrt(ss / (k - 1.0) / k);
}

// Linear-interpolation percentile of a sorted sample.
double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Json vec_json(std::span<const double> v) {
    return Json(std::vector<double>(v.begin(), v.end()));
}

} // namespace

double alpha_d(std::size_t n, std::size_t d) {
    if (n == 0 || d == 0) {
        throw InvalidArgument("alpha_d needs N >= 1 and d >= 1");
    }
    const double nn = static_cast<double>(n);
    return std::pow(nn, -2.0 / static_cast<double>(d)) + 1.0 / std::sqrt(nn);
}

SweepResult run_sweep(const ExperimentConfig &config, const ExpertModel &model,
                      const Dataset &data) {
    SweepResult result;
    result.warnings = validate_sweep(config);
    for (const auto &w : result.warnings) {
        spdlog::warn("{}", w);
    }
    const auto &sweep = config.sweep;
    const auto &dyn = config.dynamics;
    const std::size_t d = model.dim();
    const std::size_t m = sweep.reference_size;
    const std::size_t seeds = sweep.seeds.size();
    const std::size_t ns = sweep.particle_counts.size();

    // One reference ensemble per seed, shared by every N.
    std::vector<std::shared_ptr<const Trajectory>> refs(seeds);
    std::vector<std::string> errors(std::max(seeds, ns * seeds));
#pragma omp parallel for schedule(dynamic)
    for (std::size_t s = 0; s < seeds; ++s) {
        try {
            const Rng init_rng(sweep.base_seed, sweep.seeds[s]);
            const auto init = sample_particles(init_rng, m, d);
            refs[s] = std::make_shared<const Trajectory>(integrate_reference(
                model, data, init, dyn.horizon, dyn.step, dyn.record_every));
        } catch (const std::exception &e) {
            errors[s] = e.what();
        }
    }
    for (const auto &e : errors) {
        if (!e.empty()) {
            throw NumericalError(e);
        }
    }
    spdlog::info("reference ensembles done (M={}, {} seeds)", m, seeds);

    std::vector<std::optional<Cell>> cells(ns * seeds);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < cells.size(); ++c) {
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const std::size_t n = sweep.particle_counts[c / seeds];
            const std::size_t s = c % seeds;
            const auto &ref = refs[s];
            const auto init = ref->checkpoints.front().system.prefix(n);
            auto traj =
                integrate(model, data, init, dyn.horizon, dyn.step,
                          dyn.record_every);
            CoupledRun run = make_coupled_run(std::move(traj), ref);

            Cell cell{{}, {}, std::move(run)};
            const auto &cps = cell.run.interacting.checkpoints;
            for (std::size_t k = 0; k < cps.size(); ++k) {
                const auto &ref_cp = ref->checkpoints[k];
                ResultRow row;
                row.n = n;
                row.m = m;
                row.seed = sweep.seeds[s];
                row.time = cps[k].time;
                row.w2_sq = w2_squared(empirical_measure(cps[k].system),
                                       empirical_measure(ref_cp.system));
                row.pathwise = pathwise_chaos_metric_until(cell.run, k);
                row.pointwise = mean_displacement_sq(cell.run, k);
                row.loss_interacting = cps[k].loss;
                row.loss_reference = ref_cp.loss;
                cell.rows.push_back(row);
            }
            const auto &last = cell.rows.back();
            const auto t1 = std::chrono::steady_clock::now();
            cell.record = {
                n,
                m,
                last.seed,
                last.pathwise,
                pointwise_chaos_metric(cell.run),
                last.w2_sq,
                std::chrono::duration<double, std::milli>(t1 - t0).count()};
            cells[c] = std::move(cell);
        } catch (const std::exception &e) {
            errors[c] = e.what();
        }
    }
    for (const auto &e : errors) {
        if (!e.empty()) {
            throw NumericalError(e);
        }
    }

    // Deterministic fold in (N, seed) order.
    for (std::size_t i = 0; i < ns; ++i) {
        std::vector<double> w2s;
        std::vector<double> paths;
        std::vector<CoupledRun> runs;
        for (std::size_t s = 0; s < seeds; ++s) {
            Cell &cell = *cells[i * seeds + s];
            result.rows.insert(result.rows.end(), cell.rows.begin(),
                               cell.rows.end());
            result.runs.push_back(cell.record);
            w2s.push_back(cell.record.w2_sq_final);
            paths.push_back(cell.record.pathwise);
            runs.push_back(std::move(cell.run));
        }
        NSummary sum;
        sum.n = sweep.particle_counts[i];
        sum.seeds = seeds;
        sum.w2_sq_mean = mean_of(w2s);
        sum.w2_sq_stderr = stderr_of(w2s);
        sum.pathwise = mean_of(paths);
        sum.pathwise_stderr = stderr_of(paths);
        sum.pointwise = pointwise_chaos_metric(runs);
        spdlog::info("N={}: mean W2^2 = {:.6g} +- {:.2g}", sum.n,
                     sum.w2_sq_mean, sum.w2_sq_stderr);
        result.summary.push_back(sum);
        cells[i * seeds].reset();
    }
    return result;
}

RateFit fit_rate(std::span<const ResultRow> rows, std::size_t d,
                 std::optional<double> time) {
    if (d <= 4) {
        throw InvalidArgument("rate fit requires dimension d > 4");
    }
    // Select one row per (N, seed): the requested time or the last one.
    std::map<std::size_t, std::map<std::uint64_t, const ResultRow *>> picked;
    for (const auto &row : rows) {
        auto &slot = picked[row.n][row.seed];
        if (time) {
            if (row.time == *time) {
                slot = &row;
            }
        } else if (slot == nullptr || row.time >= slot->time) {
            slot = &row;
        }
    }
    RateFit fit;
    fit.dim = d;
    fit.time = time.value_or(0.0);
    std::vector<double> ratios;
    for (const auto &[n, by_seed] : picked) {
        std::vector<double> values;
        for (const auto &[seed, row] : by_seed) {
            if (row == nullptr) {
                continue;
            }
            values.push_back(row->w2_sq);
            ratios.push_back(row->w2_sq / alpha_d(n, d));
            if (!time) {
                fit.time = std::max(fit.time, row->time);
            }
        }
        if (values.empty()) {
            continue;
        }
        fit.n_values.push_back(n);
        fit.seed_counts.push_back(values.size());
        fit.means.push_back(mean_of(values));
        fit.stderrs.push_back(stderr_of(values));
    }
    const std::size_t k = fit.n_values.size();
    if (k < 3) {
        throw InvalidArgument("rate fit needs at least 3 distinct N values");
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double a = alpha_d(fit.n_values[i], d);
        num += fit.means[i] * a;
        den += a * a;
    }
    fit.c1 = num / den;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = fit.means[i] - fit.c1 * alpha_d(fit.n_values[i], d);
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    fit.c1_p95 = percentile(ratios, 0.95);

    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(fit.means[i] > 0.0)) {
            throw InvalidArgument("log-log fit needs positive means");
        }
        lx.push_back(std::log(static_cast<double>(fit.n_values[i])));
        ly.push_back(std::log(fit.means[i]));
    }
    const double mx = mean_of(lx);
    const double my = mean_of(ly);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ly[i] - fit.intercept - fit.slope * lx[i];
        sse += r * r;
    }
    fit.slope_stderr =
        k > 2 ? std::sqrt(sse / static_cast<double>(k - 2) / sxx) : 0.0;
    fit.rate_consistent =
        fit.slope <= -kSlopeTolerance * 2.0 / static_cast<double>(d);
    fit.envelope_holds = true;
    for (std::size_t i = 0; i < k; ++i) {
        if (fit.means[i] > fit.c1_p95 * alpha_d(fit.n_values[i], d)) {
            fit.envelope_holds = false;
        }
    }
    return fit;
}

bool BoundsReport::pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundCheck &c) { return c.pass; });
}

BoundsReport verify_bounds(const ExperimentConfig &config,
                           const ExpertModel &model, const Dataset &data) {
    const auto &ver = config.verify;
    if (ver.trials == 0) {
        throw ConfigError("verify.trials", "empty trials rejected");
    }
    if (ver.max_atoms == 0) {
        throw ConfigError("verify.max_atoms", "must be at least 1");
    }
    BoundsReport report;
    report.trials = ver.trials;
    const std::size_t d = model.dim();

    Rng a1_rng(ver.seed, 0);
    const auto a1 = verify_assumption1(model, a1_rng, ver.trials);
    auto a1_check = [&](std::string name, bool ok, double observed,
                        double bound) {
        BoundCheck c{std::move(name), ok, observed, bound, nullptr};
        if (!ok) {
            c.witness = {{"bound", a1.witness_bound},
                         {"theta", a1.witness_theta},
                         {"x", a1.witness_x}};
        }
        report.checks.push_back(std::move(c));
    };
    a1_check("assumption1.f", a1.f_ok, a1.max_f, 1.0);
    a1_check("assumption1.grad", a1.grad_ok, a1.max_grad, model.alpha());
    a1_check("assumption1.hess", a1.hess_ok, a1.max_hess, model.beta());

    if (model.kind() == ExpertKind::Quantum) {
        // Unit generator norm gives alpha = beta = 1 whatever was declared.
        constexpr double slack = 1e-12;
        report.checks.push_back({"quantum.grad_unit", a1.max_grad <= 1 + slack,
                                 a1.max_grad, 1.0, nullptr});
        report.checks.push_back({"quantum.hess_unit", a1.max_hess <= 1 + slack,
                                 a1.max_hess, 1.0, nullptr});
    }

    // |b(z1,mu) - b(z2,nu)|_1 <= C (|z1 - z2|_1 + W2(mu, nu)).
    const double lip = lipschitz_constant(model, data);
    Rng rng(ver.seed, 1);
    BoundCheck lc{"drift.lipschitz", true, 0.0, lip, nullptr};
    double worst = -1.0;
    for (std::size_t t = 0; t < ver.trials; ++t) {
        Rng trng = rng.derive(t);
        const std::size_t na = 1 + trng.below(ver.max_atoms);
        const std::size_t nb = 1 + trng.below(ver.max_atoms);
        std::vector<double> mu(na * d);
        std::vector<double> z1(d);
        fill_uniform(trng, mu);
        fill_uniform(trng, z1);
        std::vector<double> nu(nb * d);
        std::vector<double> z2(d);
        // Half the trials perturb locally, where the ratio is largest.
        const bool local = t % 2 == 1;
        const double scale = std::pow(10.0, -trng.uniform(0.0, 4.0));
        if (local) {
            for (std::size_t i = 0; i < nb * d; ++i) {
                nu[i] = mu[i % (na * d)] + scale * trng.uniform(-1.0, 1.0);
            }
            for (std::size_t i = 0; i < d; ++i) {
                z2[i] = z1[i] + scale * trng.uniform(-1.0, 1.0);
            }
        } else {
            fill_uniform(trng, nu);
            fill_uniform(trng, z2);
        }
        for (auto *v : {&nu, &z2}) {
            std::transform(v->begin(), v->end(), v->begin(), wrap_angle);
        }
        const EmpiricalMeasure mmu(d, mu);
        const EmpiricalMeasure mnu(d, nu);
        const auto bz1 = drift(model, z1, residuals(model, mmu, data), data);
        const auto bz2 = drift(model, z2, residuals(model, mnu, data), data);
        double lhs = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            lhs += std::abs(bz1[i] - bz2[i]);
        }
        const double dist = torus_l1_distance(z1, z2) + w2(mmu, mnu);
        if (dist <= 0.0) {
            continue;
        }
        const double ratio = lhs / (lip * dist);
        if (ratio > worst) {
            worst = ratio;
            lc.observed = lhs / dist;
        }
        if (lhs > lip * dist) {
            if (lc.pass) {
                lc.witness = {{"trial", t},
                              {"z1", z1},
                              {"z2", z2},
                              {"lhs", lhs},
                              {"rhs", lip * dist}};
            }
            lc.pass = false;
        }
    }
    report.checks.push_back(std::move(lc));
    return report;
}

std::string results_csv(std::span<const ResultRow> rows) {
    std::ostringstream out;
    out << "N,M,seed,t,w2_sq,pathwise,pointwise,loss_interacting,"
           "loss_reference\n";
    for (const auto &r : rows) {
        out << r.n << ',' << r.m << ',' << r.seed << ','
            << io::format_double(r.time) << ',' << io::format_double(r.w2_sq)
            << ',' << io::format_double(r.pathwise) << ','
            << io::format_double(r.pointwise) << ','
            << io::format_double(r.loss_interacting) << ','
            << io::format_double(r.loss_reference) << '\n';
    }
    return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::filesystem::path &path) {
    const auto table = io::read_csv(path);
    const char *names[] = {"N",        "M",         "seed",
                           "t",        "w2_sq",     "pathwise",
                           "pointwise", "loss_interacting", "loss_reference"};
    std::size_t col[9];
    for (std::size_t i = 0; i < 9; ++i) {
        col[i] = table.column(names[i]);
    }
    std::vector<ResultRow> rows;
    for (const auto &cells : table.rows) {
        if (cells.size() != table.header.size()) {
            throw InvalidArgument("results table row has wrong column count");
        }
        auto count = [&](std::size_t i) {
            const double v = io::parse_double(cells[col[i]]);
            if (!(v >= 0.0) || v != std::floor(v)) {
                throw InvalidArgument(std::string("column ") + names[i] +
                                      " must hold nonnegative integers");
            }
            return static_cast<std::uint64_t>(v);
        };
        ResultRow r;
        r.n = count(0);
        r.m = count(1);
        r.seed = count(2);
        r.time = io::parse_double(cells[col[3]]);
        r.w2_sq = io::parse_double(cells[col[4]]);
        r.pathwise = io::parse_double(cells[col[5]]);
        r.pointwise = io::parse_double(cells[col[6]]);
        r.loss_interacting = io::parse_double(cells[col[7]]);
        r.loss_reference = io::parse_double(cells[col[8]]);
        if (r.n == 0) {
            throw InvalidArgument("column N must be positive");
        }
        rows.push_back(r);
    }
    return rows;
}

std::string runs_csv(std::span<const RunRecord> runs) {
    std::ostringstream out;
    out << "N,M,seed,pathwise,pointwise,w2_sq_final,runtime_ms\n";
    for (const auto &r : runs) {
        out << r.n << ',' << r.m << ',' << r.seed << ','
            << io::format_double(r.pathwise) << ','
            << io::format_double(r.pointwise) << ','
            << io::format_double(r.w2_sq_final) << ','
            << io::format_double(std::round(r.runtime_ms * 1000.0) / 1000.0)
            << '\n';
    }
    return out.str();
}

std::string summary_csv(std::span<const NSummary> summary) {
    std::ostringstream out;
    out << "N,seeds,w2_sq_mean,w2_sq_stderr,pathwise,pathwise_stderr,"
           "pointwise\n";
    for (const auto &s : summary) {
        out << s.n << ',' << s.seeds << ',' << io::format_double(s.w2_sq_mean)
            << ',' << io::format_double(s.w2_sq_stderr) << ','
            << io::format_double(s.pathwise) << ','
            << io::format_double(s.pathwise_stderr) << ','
            << io::format_double(s.pointwise) << '\n';
    }
    return out.str();
}

Json fit_json(const RateFit &fit) {
    Json j;
    j["C1"] = fit.c1;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["stderr"] = fit.slope_stderr;
    j["C1_p95"] = fit.c1_p95;
    j["residual_norm"] = fit.residual_norm;
    j["rate_consistent"] = fit.rate_consistent;
    j["envelope_holds"] = fit.envelope_holds;
    j["d"] = fit.dim;
    j["t"] = fit.time;
    j["N"] = fit.n_values;
    j["seeds"] = fit.seed_counts;
    j["mean_w2_sq"] = vec_json(fit.means);
    j["stderr_w2_sq"] = vec_json(fit.stderrs);
    return j;
}

Json bounds_json(const BoundsReport &report) {
    Json j;
    j["pass"] = report.pass();
    j["trials"] = report.trials;
    Json checks = Json::array();
    for (const auto &c : report.checks) {
        Json e{{"name", c.name},
               {"pass", c.pass},
               {"observed", c.observed},
               {"bound", c.bound},
               {"margin", c.bound - c.observed}};
        if (!c.witness.is_null()) {
            e["witness"] = c.witness;
        }
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    return j;
}

} // namespace mfmoe
