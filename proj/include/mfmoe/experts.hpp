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
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mfmoe/particles.hpp"
#include "mfmoe/qsim.hpp"
#include "mfmoe/rng.hpp"

namespace mfmoe {

class Dataset;

/**
 * Classical periodic expert f(theta, x) = cos(<k(x), theta> + phi(x)).
 *
 * k_i(x) = clamp(round(freq_bias_i + <freq_weights_i, x>), -1, 1) and
 * phi(x) = phase_bias + <phase_weights, x>. Integer frequencies in {-1,0,1}
 * give |df| <= 1 and |d2f| <= 1.
 */
struct FourierExpert {
    std::size_t dim = 0;
    std::size_t input_dim = 0;
    std::vector<double> freq_bias;     // dim
    std::vector<double> freq_weights;  // dim x input_dim, row-major
    double phase_bias = 0.0;
    std::vector<double> phase_weights; // input_dim

    /// Frequencies and phase independent of x.
    static FourierExpert constant(std::vector<int> k, double phase,
                                  std::size_t input_dim = 0);
    /// Gaussian projection weights drawn from `seed`.
    static FourierExpert random(std::size_t dim, std::size_t input_dim,
                                std::uint64_t seed);

    [[nodiscard]] int frequency(std::size_t i, std::span<const double> x) const;
    void frequencies(std::span<const double> x, std::span<int> k) const;
    [[nodiscard]] double phase(std::span<const double> x) const;

    friend bool operator==(const FourierExpert &,
                           const FourierExpert &) = default;
};

enum class ExpertKind { Fourier, Quantum };

/**
 * Expert model f(theta, x) with declared derivative bounds alpha and beta.
 * Immutable once built; evaluation is thread-safe.
 */
class ExpertModel {
  public:
    static ExpertModel fourier(FourierExpert expert, double alpha = 1.0,
                               double beta = 1.0);
    static ExpertModel quantum(qsim::CircuitSpec circuit, std::size_t input_dim,
                               double alpha = 1.0, double beta = 1.0);

    [[nodiscard]] ExpertKind kind() const noexcept;
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    [[nodiscard]] const FourierExpert *as_fourier() const noexcept {
        return std::get_if<FourierExpert>(&payload_);
    }
    [[nodiscard]] const qsim::CircuitSpec *as_quantum() const noexcept {
        return std::get_if<qsim::CircuitSpec>(&payload_);
    }

    /// f(theta, x); no dimension check (hot path). See expert_eval.
    [[nodiscard]] double value(std::span<const double> theta,
                               std::span<const double> x) const;
    /// Writes grad f into `grad` and returns f.
    double value_and_gradient(std::span<const double> theta,
                              std::span<const double> x,
                              std::span<double> grad) const;

  private:
    ExpertModel() = default;

    std::variant<FourierExpert, qsim::CircuitSpec> payload_;
    std::size_t dim_ = 0;
    std::size_t input_dim_ = 0;
    double alpha_ = 1.0;
    double beta_ = 1.0;
};

double expert_eval(const ExpertModel &model, std::span<const double> theta,
                   std::span<const double> x);
std::vector<double> expert_grad(const ExpertModel &model,
                                std::span<const double> theta,
                                std::span<const double> x);

/// F(Theta, x) = (1/N) sum_i f(theta^i, x), summed in particle order.
double mixture_eval(const ExpertModel &model, const ParticleSystem &system,
                    std::span<const double> x);
/// Same, for the atoms of an empirical measure.
double mixture_eval(const ExpertModel &model, const EmpiricalMeasure &measure,
                    std::span<const double> x);

/// r_j = y_j - F(Theta, x_j).
std::vector<double> residuals(const ExpertModel &model,
                              const ParticleSystem &system,
                              const Dataset &data);
std::vector<double> residuals(const ExpertModel &model,
                              const EmpiricalMeasure &measure,
                              const Dataset &data);

/// L(Theta) = 1/2 sum_j (F(Theta, x_j) - y_j)^2.
double loss(const ExpertModel &model, const ParticleSystem &system,
            const Dataset &data);
double loss_from_residuals(std::span<const double> residuals);

/// b(theta, mu) = sum_j grad f(theta, x_j) r_j with precomputed residuals.
std::vector<double> drift(const ExpertModel &model,
                          std::span<const double> theta,
                          std::span<const double> residuals,
                          const Dataset &data);

struct Assumption1Report {
    std::size_t trials = 0;
    double max_f = 0.0;
    double max_grad = 0.0;
    double max_hess = 0.0;
    bool f_ok = true;
    bool grad_ok = true;
    bool hess_ok = true;
    // Point realizing the largest violation ratio; empty when all bounds hold.
    std::string witness_bound;
    std::vector<double> witness_theta;
    std::vector<double> witness_x;

    [[nodiscard]] bool ok() const noexcept { return f_ok && grad_ok && hess_ok; }
};

/// Random spot-check of |f| <= 1, |df| <= alpha, |d2f| <= beta. Inputs are
/// drawn uniformly from [-pi, pi]^p.
Assumption1Report verify_assumption1(const ExpertModel &model, Rng &rng,
                                     std::size_t trials);

/// Second derivatives; finite differences of the gradient for Fourier
/// experts, generator insertions for quantum experts.
double expert_hessian(const ExpertModel &model, std::span<const double> theta,
                      std::span<const double> x, std::size_t j, std::size_t k);

/// C = max{d beta n (A+1), alpha^2 d n}.
double lipschitz_constant(std::size_t d, double alpha, double beta,
                          std::size_t n, double label_bound);
double lipschitz_constant(const ExpertModel &model, const Dataset &data);

} // namespace mfmoe
