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
// Command-line front end: simulate, sweep, fit-rate, verify-bounds,
// wasserstein and plot. Exit codes: 0 success, 2 usage or configuration,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mfmoe/config.hpp"
#include "mfmoe/dynamics.hpp"
#include "mfmoe/error.hpp"
#include "mfmoe/experiments.hpp"
#include "mfmoe/io.hpp"
#include "mfmoe/particles.hpp"
#include "mfmoe/plot.hpp"
#include "mfmoe/transport.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace mfmoe;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string log_level = "warn";
};

ExperimentConfig load(const Globals &g, bool required = true) {
    ExperimentConfig cfg;
    if (!g.config.empty()) {
        cfg = load_config(g.config);
    } else if (required) {
        throw ConfigError("--config", "a config file is required");
    }
    if (!g.out.empty()) {
        cfg.output_dir = g.out;
    }
    return cfg;
}

fs::path out_dir(const Globals &g, const ExperimentConfig &cfg) {
    return g.out.empty() ? cfg.output_dir : fs::path(g.out);
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

int cmd_simulate(const Globals &g) {
    ExperimentConfig cfg = load(g);
    if (g.seed) {
        cfg.simulate.seed = *g.seed;
    }
    validate_dynamics(cfg.dynamics);
    if (cfg.simulate.particles == 0) {
        throw ConfigError("simulate.N", "must be at least 1");
    }
    const Problem p = build_problem(cfg);
    const auto init = sample_particles(Rng(cfg.simulate.seed, 0),
                                       cfg.simulate.particles, p.model.dim());
    const auto traj = integrate(p.model, p.data, init, cfg.dynamics.horizon,
                                cfg.dynamics.step, cfg.dynamics.record_every);

    std::string lines;
    for (const auto &cp : traj.checkpoints) {
        Json line{{"t", cp.time}, {"loss", cp.loss}};
        if (cfg.simulate.record_particles) {
            Json parts = Json::array();
            for (std::size_t i = 0; i < cp.system.size(); ++i) {
                const auto q = cp.system.particle(i);
                parts.push_back(std::vector<double>(q.begin(), q.end()));
            }
            line["particles"] = std::move(parts);
        }
        lines += line.dump() + "\n";
    }
    const fs::path dir = out_dir(g, cfg);
    io::write_file(dir / "trajectory.jsonl", lines);
    const Json summary{
        {"N", cfg.simulate.particles},
        {"d", p.model.dim()},
        {"seed", cfg.simulate.seed},
        {"T", cfg.dynamics.horizon},
        {"h", cfg.dynamics.step},
        {"steps", traj.step_losses.size() - 1},
        {"loss_initial", traj.step_losses.front()},
        {"loss_final", traj.step_losses.back()},
        {"descent_violation", std::max(0.0, descent_violation(traj))},
        {"lipschitz_constant", lipschitz_constant(p.model, p.data)},
        {"dataset", p.provenance}};
    io::write_file(dir / "summary.json", dump(summary));
    write_dataset_csv(p.data, dir / "dataset.csv");
    spdlog::info("simulate: loss {} -> {}", traj.step_losses.front(),
                 traj.step_losses.back());
    return 0;
}

int cmd_sweep(const Globals &g) {
    ExperimentConfig cfg = load(g);
    if (g.seed) {
        cfg.sweep.base_seed = *g.seed;
    }
    const Problem p = build_problem(cfg);
    const SweepResult res = run_sweep(cfg, p.model, p.data);
    const fs::path dir = out_dir(g, cfg);
    io::write_file(dir / "results.csv", results_csv(res.rows));
    io::write_file(dir / "runs.csv", runs_csv(res.runs));
    io::write_file(dir / "summary.csv", summary_csv(res.summary));
    write_dataset_csv(p.data, dir / "dataset.csv");
    io::write_file(dir / "config.json", dump(config_to_json(cfg)));
    if (cfg.sweep.mode == SweepMode::RateFit &&
        cfg.sweep.particle_counts.size() >= 3) {
        try {
            const RateFit fit = fit_rate(res.rows, p.model.dim());
            io::write_file(dir / "fit.json", dump(fit_json(fit)));
        } catch (const InvalidArgument &e) {
            spdlog::warn("rate fit skipped: {}", e.what());
        }
    }
    return 0;
}

int cmd_fit_rate(const Globals &g, const std::string &results,
                 std::optional<std::size_t> dim, std::optional<double> time) {
    ExperimentConfig cfg = load(g, false);
    const std::size_t d = dim.value_or(cfg.expert.dim);
    const auto rows = parse_results_csv(results);
    const RateFit fit = fit_rate(rows, d, time);
    if (!fit.rate_consistent) {
        spdlog::warn("rate inconsistent: slope {} above {}", fit.slope,
                     -kSlopeTolerance * 2.0 / static_cast<double>(d));
    }
    io::write_file(out_dir(g, cfg) / "fit.json", dump(fit_json(fit)));
    return 0;
}

int cmd_verify(const Globals &g) {
    ExperimentConfig cfg = load(g);
    if (g.seed) {
        cfg.verify.seed = *g.seed;
    }
    const Problem p = build_problem(cfg);
    const BoundsReport report = verify_bounds(cfg, p.model, p.data);
    io::write_file(out_dir(g, cfg) / "bounds_report.json",
                   dump(bounds_json(report)));
    for (const auto &c : report.checks) {
        if (!c.pass) {
            spdlog::warn("bound {} violated: observed {} > {}", c.name,
                         c.observed, c.bound);
        }
    }
    return 0;
}

EmpiricalMeasure read_atoms(const std::string &path) {
    const auto rows = io::read_numeric_csv(path);
    if (rows.empty()) {
        throw InvalidArgument(path + ": no atoms");
    }
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    for (const auto &r : rows) {
        if (r.size() != d || d == 0) {
            throw InvalidArgument(path + ": rows differ in dimension");
        }
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return EmpiricalMeasure(d, std::move(flat));
}

int cmd_wasserstein(const std::string &a_path, const std::string &b_path) {
    const auto a = read_atoms(a_path);
    const auto b = read_atoms(b_path);
    if (a.dim() != b.dim()) {
        throw InvalidArgument("dimension mismatch: " +
                              std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
    const double sq = w2_squared(a, b);
    std::printf("W2 %.17g\nW2_sq %.17g\n", std::sqrt(sq), sq);
    return 0;
}

int cmd_plot(const Globals &g, const std::string &results,
             std::optional<std::size_t> dim) {
    ExperimentConfig cfg = load(g, false);
    const auto rows = parse_results_csv(results);
    if (rows.empty()) {
        throw InvalidArgument("results table is empty");
    }
    const fs::path dir = out_dir(g, cfg);
    io::write_file(dir / "w2_vs_N.svg",
                   render_svg(rate_chart(rows, dim.value_or(cfg.expert.dim))));
    io::write_file(dir / "chaos_vs_t.svg", render_svg(chaos_chart(rows)));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    auto logger = spdlog::stderr_color_mt("mfmoe");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Mean-field mixture-of-experts simulator"};
    app.require_subcommand(1, 1);
    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "Experiment config (JSON)");
    app.add_option("--out", g.out, "Output directory");
    auto *seed_opt = app.add_option("--seed", seed, "Override the seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--log-level", g.log_level, "error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

    auto *simulate = app.add_subcommand("simulate", "Integrate one system");
    auto *sweep = app.add_subcommand("sweep", "Sweep N and seeds");
    auto *fit = app.add_subcommand("fit-rate", "Fit the rate law");
    auto *verify = app.add_subcommand("verify-bounds", "Check expert bounds");
    auto *wass = app.add_subcommand("wasserstein", "Exact W2 of two atom lists");
    auto *plot = app.add_subcommand("plot", "Render SVG charts");
    for (auto *sub : {simulate, sweep, fit, verify, wass, plot}) {
        sub->fallthrough();
    }

    std::string results;
    std::optional<std::size_t> dim;
    std::optional<double> at_time;
    fit->add_option("results", results, "results.csv")->required();
    fit->add_option("--dim", dim, "Parameter dimension d");
    fit->add_option("--time", at_time, "Checkpoint time (default: final)");
    plot->add_option("results", results, "results.csv")->required();
    plot->add_option("--dim", dim, "Parameter dimension d");
    std::string file_a;
    std::string file_b;
    wass->add_option("a", file_a, "CSV of atoms")->required();
    wass->add_option("b", file_b, "CSV of atoms")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    if (*seed_opt) {
        g.seed = seed;
    }
    if (g.threads > 0) {
        omp_set_num_threads(g.threads);
    }

    try {
        if (*simulate) {
            return cmd_simulate(g);
        }
        if (*sweep) {
            return cmd_sweep(g);
        }
        if (*fit) {
            return cmd_fit_rate(g, results, dim, at_time);
        }
        if (*verify) {
            return cmd_verify(g);
        }
        if (*wass) {
            return cmd_wasserstein(file_a, file_b);
        }
        return cmd_plot(g, results, dim);
    } catch (const NumericalError &e) {
        spdlog::error("{}", e.what());
        return kExitNumerical;
    } catch (const Error &e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    }
}
