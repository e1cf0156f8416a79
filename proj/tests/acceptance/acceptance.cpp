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
// Acceptance suite. Usage: acceptance [criterion ...]; with no arguments
// every criterion runs. Prints one PASS/FAIL line per criterion and exits
// nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "mfmoe/config.hpp"
#include "mfmoe/dynamics.hpp"
#include "mfmoe/experiments.hpp"
#include "mfmoe/io.hpp"
#include "mfmoe/qsim.hpp"
#include "mfmoe/torus.hpp"
#include "mfmoe/transport.hpp"
#include "oracles.hpp"

#include <spdlog/spdlog.h>

namespace fs = std::filesystem;
using namespace mfmoe;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char *format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::vector<double> uniform_vec(Rng &rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = rng.uniform(lo, hi);
    }
    return v;
}

fs::path source(const std::string &rel) {
    return fs::path(MFMOE_SOURCE_DIR) / rel;
}

// --- 1: quantum expert bounds ------------------------------------------------

Verdict quantum_bounds() {
    Rng rng(101, 0);
    double max_f = 0.0;
    double max_g = 0.0;
    double max_h = 0.0;
    const std::size_t trials = 1000;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t m = 1 + rng.below(4);
        const std::size_t d = 1 + rng.below(8);
        const auto spec =
            qsim::make_alternating_circuit(m, d, rng(), rng.uniform(0.5, 2.0));
        const auto theta = uniform_vec(rng, d, 0.0, 2 * pi);
        const auto x = uniform_vec(rng, 3, -pi, pi);
        const auto vg = qsim::value_and_gradient(spec, theta, x);
        max_f = std::max(max_f, std::abs(vg.value));
        for (double g : vg.gradient) {
            max_g = std::max(max_g, std::abs(g));
        }
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = j; k < d; ++k) {
                max_h = std::max(
                    max_h, std::abs(qsim::hessian_entry(spec, theta, x, j, k)));
            }
        }
    }
    constexpr double slack = 1e-12;
    const bool bounded =
        max_f <= 1 + slack && max_g <= 1 + slack && max_h <= 1 + slack;

    // Single-qubit X/Y circuits: search for the largest derivatives.
    double worst_grad_peak = 1.0;
    double worst_hess_peak = 1.0;
    for (int c = 0; c < 20; ++c) {
        qsim::CircuitSpec spec;
        spec.qubits = 1;
        const std::size_t d = 1 + rng.below(4);
        for (std::size_t k = 0; k < d; ++k) {
            spec.generators.push_back(
                {qsim::PauliString({{0, rng.below(2) ? qsim::Pauli::X
                                                     : qsim::Pauli::Y}}),
                 1.0});
        }
        spec.encoders.assign(d + 1, qsim::EncoderSpec{});
        spec.observable = qsim::PauliString({{0, qsim::Pauli::Z}});
        double g_peak = 0.0;
        double h_peak = 0.0;
        const std::vector<double> none;
        for (int s = 0; s < 400; ++s) {
            // Half the candidates move one coordinate along a grid.
            std::vector<double> theta(d, 0.0);
            if (s % 2 == 0) {
                theta[rng.below(d)] = 2 * pi * (s / 2) / 200.0;
            } else {
                theta = uniform_vec(rng, d, 0.0, 2 * pi);
            }
            for (double g : qsim::gradient_adjoint(spec, theta, none)) {
                g_peak = std::max(g_peak, std::abs(g));
            }
            for (std::size_t j = 0; j < d; ++j) {
                h_peak = std::max(
                    h_peak, std::abs(qsim::hessian_entry(spec, theta, none, j, j)));
            }
        }
        worst_grad_peak = std::min(worst_grad_peak, g_peak);
        worst_hess_peak = std::min(worst_hess_peak, h_peak);
    }
    const auto cosine = qsim::make_cosine_circuit();
    const std::vector<double> none;
    const double f0 = qsim::evaluate_f(cosine, std::vector<double>{0.0}, none);
    const double g1 =
        std::abs(qsim::gradient_adjoint(cosine, std::vector<double>{pi / 2},
                                        none)[0]);
    const double h0 = std::abs(
        qsim::hessian_entry(cosine, std::vector<double>{0.0}, none, 0, 0));
    const bool tight = worst_grad_peak >= 0.95 && worst_hess_peak >= 0.95 &&
                       std::abs(f0 - 1) < 1e-15 && std::abs(g1 - 1) < 1e-15 &&
                       std::abs(h0 - 1) < 1e-15;
    return {bounded && tight,
            "1000 circuits: max|f|=" + fmt("%.6f", max_f) +
                " max|df|=" + fmt("%.6f", max_g) +
                " max|d2f|=" + fmt("%.6f", max_h) +
                "; single-qubit peaks >= " +
                fmt("%.4f", std::min(worst_grad_peak, worst_hess_peak)) +
                "; cos circuit (f, f', f'') = (" + fmt("%.15g", f0) + ", " +
                fmt("%.15g", g1) + ", " + fmt("%.15g", h0) + ")"};
}

// --- 2: gradient oracles ------------------------------------------------------

Verdict gradient_oracles() {
    Rng rng(202, 0);
    double shift_err = 0.0;
    double fd_err = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 1 + rng.below(4);
        const std::size_t d = 1 + rng.below(8);
        const auto spec =
            qsim::make_alternating_circuit(m, d, rng(), rng.uniform(0.5, 2.0));
        const auto theta = uniform_vec(rng, d, 0.0, 2 * pi);
        const auto x = uniform_vec(rng, 3, -pi, pi);
        const auto adj = qsim::gradient_adjoint(spec, theta, x);
        const auto shift = qsim::gradient_parameter_shift(spec, theta, x);
        for (std::size_t k = 0; k < d; ++k) {
            const double fd = oracle::central_difference(
                [&](const std::vector<double> &th) {
                    return qsim::evaluate_f(spec, th, x);
                },
                theta, k, 1e-5);
            shift_err = std::max(shift_err, std::abs(adj[k] - shift[k]));
            fd_err = std::max(fd_err, std::abs(adj[k] - fd));
        }
    }
    return {shift_err <= 1e-9 && fd_err <= 1e-7,
            "200 instances: max|adjoint-shift|=" + fmt("%.2e", shift_err) +
                " (<= 1e-9), max|adjoint-fd|=" + fmt("%.2e", fd_err) +
                " (<= 1e-7)"};
}

// --- 3: drift is the scaled loss gradient ------------------------------------

ExpertModel random_model(Rng &rng, bool quantum) {
    if (quantum) {
        const std::size_t m = 1 + rng.below(3);
        const std::size_t d = 1 + rng.below(6);
        return ExpertModel::quantum(
            qsim::make_alternating_circuit(m, d, rng()), 1 + rng.below(3));
    }
    return ExpertModel::fourier(
        FourierExpert::random(1 + rng.below(8), 1 + rng.below(4), rng()));
}

Dataset random_data(Rng &rng, const ExpertModel &model, std::size_t n) {
    const std::size_t p = model.input_dim();
    return Dataset(p, uniform_vec(rng, n * p, -pi, pi),
                   uniform_vec(rng, n, -1.0, 1.0));
}

Verdict drift_consistency() {
    Rng rng(303, 0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto model = random_model(rng, t % 2 == 1);
        const auto data = random_data(rng, model, 1 + rng.below(6));
        const std::size_t n_particles = 1 + rng.below(16);
        const std::size_t d = model.dim();
        const auto sys = sample_particles(Rng(rng(), 0), n_particles, d);
        DriftField field(model, data);
        std::vector<double> b(sys.flat().size());
        field.evaluate(sys.flat(), b);
        std::vector<double> coords(sys.flat().begin(), sys.flat().end());
        double err = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < coords.size(); ++k) {
            const double dl = oracle::central_difference(
                [&](const std::vector<double> &c) {
                    return loss(model, ParticleSystem(d, c), data);
                },
                coords, k, 1e-5);
            err = std::max(err, std::abs(b[k] + double(n_particles) * dl));
            scale = std::max(scale, std::abs(b[k]));
        }
        worst = std::max(worst, err / scale);
    }
    return {worst <= 1e-6, "100 instances: max relative |b + N dL/dtheta| = " +
                               fmt("%.2e", worst) + " (<= 1e-6)"};
}

// --- 4: drift Lipschitz bound -------------------------------------------------

Verdict drift_lipschitz() {
    Rng rng(404, 0);
    std::vector<ExpertModel> models{
        ExpertModel::fourier(FourierExpert::random(6, 3, 1)),
        ExpertModel::quantum(qsim::make_alternating_circuit(3, 6, 2), 3),
        ExpertModel::fourier(FourierExpert::random(2, 1, 3))};
    std::vector<Dataset> datasets;
    for (const auto &m : models) {
        DatasetSpec spec;
        spec.features = m.input_dim();
        datasets.push_back(generate_dataset(spec, m).data);
    }
    std::size_t violations = 0;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto &model = models[t % 3];
        const auto &data = datasets[t % 3];
        const std::size_t d = model.dim();
        const std::size_t na = 1 + rng.below(32);
        const std::size_t nb = 1 + rng.below(32);
        auto mu = uniform_vec(rng, na * d, 0.0, 2 * pi);
        auto z1 = uniform_vec(rng, d, 0.0, 2 * pi);
        std::vector<double> nu(nb * d);
        std::vector<double> z2(d);
        const int kind = (t / 3) % 4;
        const double eps = std::pow(10.0, -rng.uniform(0.0, 5.0));
        for (std::size_t i = 0; i < nu.size(); ++i) {
            nu[i] = kind == 0 ? rng.uniform(0.0, 2 * pi)
                              : wrap_angle(mu[i % mu.size()] +
                                           (kind == 2 ? 0.0 : eps) *
                                               rng.uniform(-1.0, 1.0));
        }
        for (std::size_t i = 0; i < d; ++i) {
            z2[i] = kind == 0 ? rng.uniform(0.0, 2 * pi)
                              : wrap_angle(z1[i] + (kind == 3 ? 0.0 : eps) *
                                                       rng.uniform(-1.0, 1.0));
        }
        const EmpiricalMeasure m1(d, mu);
        const EmpiricalMeasure m2(d, nu);
        const auto b1 = drift(model, z1, residuals(model, m1, data), data);
        const auto b2 = drift(model, z2, residuals(model, m2, data), data);
        double lhs = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            lhs += std::abs(b1[i] - b2[i]);
        }
        const double rhs = lipschitz_constant(model, data) *
                           (torus_l1_distance(z1, z2) + w2(m1, m2));
        if (lhs > rhs) {
            ++violations;
        }
        if (rhs > 0.0) {
            worst = std::max(worst, lhs / rhs);
        }
    }
    return {violations == 0, "1000 trials: " + std::to_string(violations) +
                                 " violations, max lhs/rhs = " +
                                 fmt("%.4f", worst)};
}

// --- 5: exact optimal transport ----------------------------------------------

Verdict exact_transport() {
    Rng rng(505, 0);
    double brute_err = 0.0;
    for (std::size_t n = 1; n <= 7; ++n) {
        for (int t = 0; t < 20; ++t) {
            const std::size_t d = 1 + rng.below(5);
            const auto va = uniform_vec(rng, n * d, 0.0, 2 * pi);
            const auto vb = uniform_vec(rng, n * d, 0.0, 2 * pi);
            const double want = oracle::brute_force_matching(
                oracle::squared_costs(va, vb, d), n);
            const EmpiricalMeasure a(d, va);
            const EmpiricalMeasure b(d, vb);
            brute_err = std::max(
                {brute_err, std::abs(w2_squared_equal(a, b) - want),
                 std::abs(w2_squared_general(a, b) - want)});
        }
    }
    double lp_err = 0.0;
    for (const auto &[na, nb] :
         std::vector<std::pair<std::size_t, std::size_t>>{{2, 3}, {3, 4}}) {
        for (int t = 0; t < 50; ++t) {
            const std::size_t d = 1 + rng.below(4);
            const auto va = uniform_vec(rng, na * d, 0.0, 2 * pi);
            const auto vb = uniform_vec(rng, nb * d, 0.0, 2 * pi);
            const double want = oracle::lp_vertex_enumeration(
                oracle::squared_costs(va, vb, d), na, nb);
            lp_err = std::max(lp_err,
                              std::abs(w2_squared_general(EmpiricalMeasure(d, va),
                                                          EmpiricalMeasure(d, vb)) -
                                       want));
        }
    }
    double triangle = -1e300;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng.below(6);
        auto measure = [&] {
            const std::size_t n = 1 + rng.below(20);
            return EmpiricalMeasure(d, uniform_vec(rng, n * d, 0.0, 2 * pi));
        };
        const auto a = measure();
        const auto b = measure();
        const auto c = measure();
        triangle = std::max(triangle, w2(a, c) - w2(a, b) - w2(b, c));
    }
    return {brute_err <= 1e-12 && lp_err <= 1e-10 && triangle <= 1e-9,
            "brute force N<=7 max err " + fmt("%.1e", brute_err) +
                "; LP enumeration max err " + fmt("%.1e", lp_err) +
                "; worst triangle excess " + fmt("%.1e", triangle)};
}

// --- 6: descent and integrator order -----------------------------------------

Verdict descent_and_order() {
    struct Case {
        ExpertModel model;
        std::size_t particles;
    };
    std::vector<Case> cases;
    cases.push_back({ExpertModel::fourier(FourierExpert::random(6, 3, 11)), 16});
    cases.push_back({ExpertModel::fourier(FourierExpert::random(6, 3, 12)), 64});
    cases.push_back({ExpertModel::fourier(FourierExpert::random(1, 3, 13)), 4});
    cases.push_back(
        {ExpertModel::quantum(qsim::make_alternating_circuit(3, 6, 14), 3), 16});
    cases.push_back(
        {ExpertModel::quantum(qsim::make_alternating_circuit(2, 4, 15), 3), 32});
    std::size_t runs = 0;
    double worst = -1e300;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            DatasetSpec spec;
            spec.seed = seed + 100;
            if (seed % 2 == 1) {
                spec.label_mode = LabelMode::Uniform;
            }
            const auto data = generate_dataset(spec, cases[c].model).data;
            const auto init = sample_particles(Rng(seed, c), cases[c].particles,
                                               cases[c].model.dim());
            const auto traj = integrate(cases[c].model, data, init, 1.0, 0.01, 10);
            const auto &l = traj.step_losses;
            for (std::size_t k = 1; k < l.size(); ++k) {
                worst = std::max(worst, (l[k] - l[k - 1]) / (1.0 + l.front()));
            }
            ++runs;
        }
    }
    const auto model =
        ExpertModel::fourier(FourierExpert::constant({1}, 0.0, 1));
    const Dataset data(1, {0.0}, {1.0});
    const ParticleSystem init(1, {pi / 2});
    const double ref = oracle::scalar_rk4(
        [](double t) { return -std::sin(t) * (1.0 - std::cos(t)); }, pi / 2,
        1.0, 1e-6);
    auto err = [&](double h) {
        return std::abs(
            integrate(model, data, init, 1.0, h).final().system.particle(0)[0] -
            ref);
    };
    const double ratio = err(0.02) / err(0.01);
    return {worst <= 1e-9 && ratio >= 12 && ratio <= 20,
            std::to_string(runs) + " runs: max per-step loss increase " +
                fmt("%.2e", worst) + " x (1+L0) (<= 1e-9); RK4 error ratio " +
                fmt("%.3f", ratio) + " (in [12, 20])"};
}

// --- 7-9: chaos sweeps ------------------------------------------------------

struct SweepOutcome {
    SweepResult result;
    RateFit fit;
};

SweepOutcome sweep_from(const fs::path &config_path,
                        std::optional<std::size_t> reference = std::nullopt) {
    auto cfg = load_config(config_path);
    if (reference) {
        cfg.sweep.reference_size = *reference;
    }
    const auto p = build_problem(cfg);
    auto res = run_sweep(cfg, p.model, p.data);
    auto fit = fit_rate(res.rows, p.model.dim());
    return {std::move(res), std::move(fit)};
}

std::string means_text(const RateFit &fit) {
    std::string s;
    for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(fit.n_values[i]) + ":" +
             fmt("%.4g", fit.means[i]);
    }
    return s;
}

bool strictly_decreasing(const std::vector<double> &v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) {
            return false;
        }
    }
    return true;
}

// Share of per-seed final values under C1_p95 * alpha_d(N).
double covered(const SweepOutcome &o) {
    std::size_t under = 0;
    for (const auto &r : o.result.runs) {
        under += r.w2_sq_final <= o.fit.c1_p95 * alpha_d(r.n, o.fit.dim);
    }
    return double(under) / double(o.result.runs.size());
}

Verdict chaos_trend(const fs::path &config, bool check_slope) {
    const auto o = sweep_from(config);
    const bool dec = strictly_decreasing(o.fit.means);
    const bool slope_ok = o.fit.slope <= -0.25;
    const double cover = covered(o);
    const bool env = o.fit.envelope_holds && cover >= 0.9;
    return {dec && (!check_slope || slope_ok) && env,
            "means {" + means_text(o.fit) + "}" +
                (dec ? " strictly decreasing" : " NOT decreasing") +
                (check_slope ? "; slope " + fmt("%.3f", o.fit.slope) + " +- " +
                                   fmt("%.3f", o.fit.slope_stderr) +
                                   " (<= -0.25)"
                             : std::string()) +
                "; C1 " + fmt("%.3f", o.fit.c1) + ", C1_p95 " +
                fmt("%.3f", o.fit.c1_p95) +
                (o.fit.envelope_holds ? " envelopes all seed means"
                                      : " does NOT envelope the means") +
                ", covers " + fmt("%.1f", 100 * cover) + "% of seeds"};
}

Verdict reference_consistency() {
    const auto cfg = source("configs/desk_fourier.json");
    const auto base = sweep_from(cfg, 2048);
    const auto fine = sweep_from(cfg, 4096);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.fit.means.size(); ++i) {
        worst = std::max(worst, std::abs(fine.fit.means[i] - base.fit.means[i]) /
                                    base.fit.means[i]);
    }
    return {worst < 0.25, "M=2048 {" + means_text(base.fit) + "} vs M=4096 {" +
                              means_text(fine.fit) +
                              "}: max relative change " +
                              fmt("%.2f", 100 * worst) + "% (< 25%)"};
}

// --- 10: determinism across thread counts -----------------------------------

int run_cli(const std::string &args) {
    const int status =
        std::system((std::string(MFMOE_CLI) + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
    const fs::path work = fs::temp_directory_path() / "mfmoe_acceptance_det";
    std::string detail;
    bool pass = true;
    for (const char *name : {"determinism_fourier", "determinism_quantum"}) {
        const auto cfg = source(std::string("configs/") + name + ".json");
        std::vector<std::string> outputs;
        for (int threads : {1, 4}) {
            const auto out = work / (std::string(name) + "_" +
                                     std::to_string(threads));
            fs::remove_all(out);
            const int code = run_cli("sweep --config " + cfg.string() +
                                     " --threads " + std::to_string(threads) +
                                     " --out " + out.string());
            if (code != 0) {
                return {false, std::string(name) + ": sweep exited with " +
                                   std::to_string(code)};
            }
            outputs.push_back(io::read_file(out / "results.csv"));
        }
        const bool same = outputs[0] == outputs[1];
        pass = pass && same && !outputs[0].empty();
        detail += std::string(detail.empty() ? "" : "; ") + name +
                  ": results.csv " + (same ? "identical" : "DIFFERS") +
                  " for --threads 1 vs 4 (" +
                  std::to_string(outputs[0].size()) + " bytes)";
    }
    return {pass, detail};
}

} // namespace

int main(int argc, char **argv) {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<std::pair<std::string, std::function<Verdict()>>>
        criteria{
            {"quantum expert bounds", quantum_bounds},
            {"gradient oracle agreement", gradient_oracles},
            {"drift consistency", drift_consistency},
            {"drift Lipschitz bound", drift_lipschitz},
            {"exact OT correctness", exact_transport},
            {"descent and integrator order", descent_and_order},
            {"propagation-of-chaos trend (Fourier)",
             [] { return chaos_trend(source("configs/desk_fourier.json"), true); }},
            {"reference ensemble self-consistency", reference_consistency},
            {"propagation-of-chaos trend (quantum)",
             [] { return chaos_trend(source("configs/quantum.json"), false); }},
            {"determinism across thread counts", determinism},
        };
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > int(criteria.size())) {
            std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
            return 2;
        }
        selected.push_back(std::size_t(c));
    }
    if (selected.empty()) {
        for (std::size_t c = 1; c <= criteria.size(); ++c) {
            selected.push_back(c);
        }
    }
    bool all = true;
    for (std::size_t c : selected) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[c - 1].second();
        } catch (const std::exception &e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        std::printf("criterion %zu (%s): %s  %s  [%.1f s]\n", c,
                    criteria[c - 1].first.c_str(), v.pass ? "PASS" : "FAIL",
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
