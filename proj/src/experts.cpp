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
#include "mfmoe/experts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfmoe/dataset.hpp"
#include "mfmoe/error.hpp"

namespace mfmoe {

namespace {

void check_args(const ExpertModel &model, std::span<const double> theta,
                std::span<const double> x) {
    if (theta.size() != model.dim()) {
        throw InvalidArgument("dimension mismatch: theta has " +
                              std::to_string(theta.size()) +
                              " entries, model expects " +
                              std::to_string(model.dim()));
    }
    if (x.size() != model.input_dim()) {
        throw InvalidArgument("dimension mismatch: input has " +
                              std::to_string(x.size()) +
                              " features, model expects " +
                              std::to_string(model.input_dim()));
    }
}

constexpr double kHessianStep = 1e-5;

} // namespace

FourierExpert FourierExpert::constant(std::vector<int> k, double phase,
                                      std::size_t input_dim) {
    FourierExpert e;
    e.dim = k.size();
    e.input_dim = input_dim;
    for (int ki : k) {
        if (ki < -1 || ki > 1) {
            throw InvalidArgument("Fourier frequencies must lie in {-1,0,1}");
        }
        e.freq_bias.push_back(ki);
    }
    e.freq_weights.assign(e.dim * input_dim, 0.0);
    e.phase_bias = phase;
    e.phase_weights.assign(input_dim, 0.0);
    return e;
}

FourierExpert FourierExpert::random(std::size_t dim, std::size_t input_dim,
                                    std::uint64_t seed) {
    if (dim == 0) {
        throw InvalidArgument("expert dimension must be at least 1");
    }
    Rng rng(seed, 0x666f75);
    FourierExpert e;
    e.dim = dim;
    e.input_dim = input_dim;
    e.freq_bias.assign(dim, 0.0);
    e.freq_weights.resize(dim * input_dim);
    for (double &w : e.freq_weights) {
        w = rng.normal();
    }
    // Without features every frequency would round to zero.
    if (input_dim == 0) {
        for (double &b : e.freq_bias) {
            b = static_cast<double>(rng.below(3)) - 1.0;
        }
    }
    e.phase_bias = rng.uniform(0.0, 2.0 * std::numbers::pi);
    e.phase_weights.resize(input_dim);
    for (double &w : e.phase_weights) {
        w = 0.5 * rng.normal();
    }
    return e;
}

int FourierExpert::frequency(std::size_t i, std::span<const double> x) const {
    double s = freq_bias[i];
    for (std::size_t p = 0; p < input_dim; ++p) {
        s += freq_weights[i * input_dim + p] * x[p];
    }
    return static_cast<int>(std::clamp(std::lround(s), -1L, 1L));
}

void FourierExpert::frequencies(std::span<const double> x,
                                std::span<int> k) const {
    for (std::size_t i = 0; i < dim; ++i) {
        k[i] = frequency(i, x);
    }
}

double FourierExpert::phase(std::span<const double> x) const {
    double s = phase_bias;
    for (std::size_t p = 0; p < input_dim; ++p) {
        s += phase_weights[p] * x[p];
    }
    return s;
}

ExpertModel ExpertModel::fourier(FourierExpert expert, double alpha,
                                 double beta) {
    if (expert.dim == 0 || expert.freq_bias.size() != expert.dim ||
        expert.freq_weights.size() != expert.dim * expert.input_dim ||
        expert.phase_weights.size() != expert.input_dim) {
        throw InvalidArgument("inconsistent Fourier expert payload");
    }
    ExpertModel m;
    m.dim_ = expert.dim;
    m.input_dim_ = expert.input_dim;
    m.alpha_ = alpha;
    m.beta_ = beta;
    m.payload_ = std::move(expert);
    return m;
}

ExpertModel ExpertModel::quantum(qsim::CircuitSpec circuit,
                                 std::size_t input_dim, double alpha,
                                 double beta) {
    circuit.validate();
    if (circuit.depth() == 0) {
        throw InvalidArgument("quantum expert needs at least one parameter");
    }
    ExpertModel m;
    m.dim_ = circuit.depth();
    m.input_dim_ = input_dim;
    m.alpha_ = alpha;
    m.beta_ = beta;
    m.payload_ = std::move(circuit);
    return m;
}

ExpertKind ExpertModel::kind() const noexcept {
    return std::holds_alternative<FourierExpert>(payload_)
               ? ExpertKind::Fourier
               : ExpertKind::Quantum;
}

double ExpertModel::value(std::span<const double> theta,
                          std::span<const double> x) const {
    if (const auto *f = as_fourier()) {
        double arg = f->phase(x);
        for (std::size_t i = 0; i < dim_; ++i) {
            arg += f->frequency(i, x) * theta[i];
        }
        return std::cos(arg);
    }
    return qsim::evaluate_f(*as_quantum(), theta, x);
}

double ExpertModel::value_and_gradient(std::span<const double> theta,
                                       std::span<const double> x,
                                       std::span<double> grad) const {
    if (const auto *f = as_fourier()) {
        double arg = f->phase(x);
        for (std::size_t i = 0; i < dim_; ++i) {
            grad[i] = f->frequency(i, x);
            arg += grad[i] * theta[i];
        }
        const double s = std::sin(arg);
        for (std::size_t i = 0; i < dim_; ++i) {
            grad[i] *= -s;
        }
        return std::cos(arg);
    }
    return qsim::value_and_gradient(*as_quantum(), theta, x, grad);
}

double expert_eval(const ExpertModel &model, std::span<const double> theta,
                   std::span<const double> x) {
    check_args(model, theta, x);
    return model.value(theta, x);
}

std::vector<double> expert_grad(const ExpertModel &model,
                                std::span<const double> theta,
                                std::span<const double> x) {
    check_args(model, theta, x);
    std::vector<double> grad(model.dim());
    model.value_and_gradient(theta, x, grad);
    return grad;
}

double mixture_eval(const ExpertModel &model, const ParticleSystem &system,
                    std::span<const double> x) {
    if (system.size() == 0) {
        throw InvalidArgument("mixture needs at least one particle");
    }
    if (system.dim() != model.dim()) {
        throw InvalidArgument("dimension mismatch between model and particles");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
        acc += model.value(system.particle(i), x);
    }
    return acc / static_cast<double>(system.size());
}

double mixture_eval(const ExpertModel &model, const EmpiricalMeasure &measure,
                    std::span<const double> x) {
    if (measure.dim() != model.dim()) {
        throw InvalidArgument("dimension mismatch between model and measure");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i) {
        acc += model.value(measure.atom(i), x);
    }
    return acc / static_cast<double>(measure.size());
}

std::vector<double> residuals(const ExpertModel &model,
                              const ParticleSystem &system,
                              const Dataset &data) {
    std::vector<double> r(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        r[j] = data.label(j) - mixture_eval(model, system, data.input(j));
    }
    return r;
}

std::vector<double> residuals(const ExpertModel &model,
                              const EmpiricalMeasure &measure,
                              const Dataset &data) {
    std::vector<double> r(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        r[j] = data.label(j) - mixture_eval(model, measure, data.input(j));
    }
    return r;
}

double loss_from_residuals(std::span<const double> residuals) {
    double acc = 0.0;
    for (double r : residuals) {
        acc += r * r;
    }
    return 0.5 * acc;
}

double loss(const ExpertModel &model, const ParticleSystem &system,
            const Dataset &data) {
    return loss_from_residuals(residuals(model, system, data));
}

std::vector<double> drift(const ExpertModel &model,
                          std::span<const double> theta,
                          std::span<const double> residuals,
                          const Dataset &data) {
    if (data.feature_dim() != model.input_dim()) {
        throw InvalidArgument("dataset feature count does not match the "
                              "expert input dimension");
    }
    if (residuals.size() != data.size()) {
        throw InvalidArgument("need one residual per data point");
    }
    std::vector<double> out(model.dim(), 0.0);
    std::vector<double> grad(model.dim());
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (j == 0) {
            check_args(model, theta, data.input(0));
        }
        model.value_and_gradient(theta, data.input(j), grad);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += grad[k] * residuals[j];
        }
    }
    return out;
}

double expert_hessian(const ExpertModel &model, std::span<const double> theta,
                      std::span<const double> x, std::size_t j,
                      std::size_t k) {
    check_args(model, theta, x);
    if (j >= model.dim() || k >= model.dim()) {
        throw InvalidArgument("hessian index out of range");
    }
    if (const auto *circuit = model.as_quantum()) {
        return qsim::hessian_entry(*circuit, theta, x, j, k);
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    std::vector<double> gp(model.dim()), gm(model.dim());
    shifted[j] = theta[j] + kHessianStep;
    model.value_and_gradient(shifted, x, gp);
    shifted[j] = theta[j] - kHessianStep;
    model.value_and_gradient(shifted, x, gm);
    return (gp[k] - gm[k]) / (2.0 * kHessianStep);
}

Assumption1Report verify_assumption1(const ExpertModel &model, Rng &rng,
                                     std::size_t trials) {
    if (trials == 0) {
        throw InvalidArgument("trials must be at least 1");
    }
    // Finite-difference Hessians carry O(step^2) truncation error.
    const double hess_slack =
        model.kind() == ExpertKind::Fourier ? 1e-6 : 1e-12;
    constexpr double kSlack = 1e-12;

    Assumption1Report report;
    report.trials = trials;
    double worst_ratio = 1.0;
    const std::size_t d = model.dim();
    std::vector<double> theta(d), x(model.input_dim()), grad(d);

    auto note = [&](double observed, double bound, double slack,
                    const char *name, bool &ok) {
        if (observed > bound + slack) {
            ok = false;
            const double ratio = bound > 0.0 ? observed / bound
                                             : std::numeric_limits<double>::infinity();
            if (ratio > worst_ratio || report.witness_bound.empty()) {
                worst_ratio = ratio;
                report.witness_bound = name;
                report.witness_theta = theta;
                report.witness_x = x;
            }
        }
    };

    for (std::size_t t = 0; t < trials; ++t) {
        fill_uniform(rng, theta);
        for (double &xi : x) {
            xi = rng.uniform(-std::numbers::pi, std::numbers::pi);
        }
        const double f = model.value_and_gradient(theta, x, grad);
        report.max_f = std::max(report.max_f, std::abs(f));
        note(std::abs(f), 1.0, kSlack, "f", report.f_ok);
        double g_max = 0.0;
        for (double g : grad) {
            g_max = std::max(g_max, std::abs(g));
        }
        report.max_grad = std::max(report.max_grad, g_max);
        note(g_max, model.alpha(), kSlack, "grad", report.grad_ok);
        double h_max = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = j; k < d; ++k) {
                h_max = std::max(h_max,
                                 std::abs(expert_hessian(model, theta, x, j, k)));
            }
        }
        report.max_hess = std::max(report.max_hess, h_max);
        note(h_max, model.beta(), hess_slack, "hess", report.hess_ok);
    }
    return report;
}

double lipschitz_constant(std::size_t d, double alpha, double beta,
                          std::size_t n, double label_bound) {
    const double dn = static_cast<double>(d) * static_cast<double>(n);
    return std::max(dn * beta * (label_bound + 1.0), alpha * alpha * dn);
}

double lipschitz_constant(const ExpertModel &model, const Dataset &data) {
    return lipschitz_constant(model.dim(), model.alpha(), model.beta(),
                              data.size(), data.label_bound());
}

} // namespace mfmoe
