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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mfmoe::qsim {

using Complex = std::complex<double>;

/// Largest register the dense simulator accepts.
inline constexpr std::size_t kMaxQubits = 12;

/// Dense 2^m amplitude vector. Qubit q is bit q of the basis index.
class StateVector {
  public:
    /// |0...0> on `qubits` qubits.
    explicit StateVector(std::size_t qubits);
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    [[nodiscard]] double norm_squared() const noexcept;

  private:
    StateVector() = default;
    std::vector<Complex> amps_;
    std::size_t qubits_ = 0;
};

/// <a|b>
Complex inner_product(const StateVector &a, const StateVector &b);

enum class Pauli : std::uint8_t { I, X, Y, Z };

/**
 * Tensor product of single-qubit Paulis, stored sparsely as (qubit, letter)
 * pairs sorted by qubit. Text form: letters followed by qubit indices, e.g.
 * "X0Z2"; "I" is the identity.
 */
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::vector<std::pair<std::size_t, Pauli>> factors);

    static PauliString parse(std::string_view text);
    [[nodiscard]] std::string str() const;

    [[nodiscard]] const std::vector<std::pair<std::size_t, Pauli>> &
    factors() const noexcept {
        return factors_;
    }
    [[nodiscard]] bool is_identity() const noexcept { return factors_.empty(); }
    /// 1 + highest acted qubit; 0 for the identity.
    [[nodiscard]] std::size_t min_qubits() const noexcept;

    /// Bit masks of qubits carrying X-or-Y and Z-or-Y.
    [[nodiscard]] std::uint64_t x_mask() const noexcept { return x_mask_; }
    [[nodiscard]] std::uint64_t z_mask() const noexcept { return z_mask_; }
    [[nodiscard]] int y_count() const noexcept { return y_count_; }

    friend bool operator==(const PauliString &a, const PauliString &b) {
        return a.factors_ == b.factors_;
    }

  private:
    std::vector<std::pair<std::size_t, Pauli>> factors_;
    std::uint64_t x_mask_ = 0;
    std::uint64_t z_mask_ = 0;
    int y_count_ = 0;
};

/// Hermitian generator coefficient * P with |coefficient| <= 1. The
/// parameter-shift rule needs |coefficient| == 1.
struct Generator {
    PauliString pauli;
    double coefficient = 1.0;

    [[nodiscard]] bool is_pauli() const noexcept {
        return coefficient == 1.0 || coefficient == -1.0;
    }
    friend bool operator==(const Generator &, const Generator &) = default;
};

enum class EncoderKind : std::uint8_t {
    Identity,
    RzLayer,      // RZ(scale * x_q + offset_q) on every qubit
    RyLayer,      // RY(scale * x_q + offset_q) on every qubit
    CnotLadder,   // CNOT(0,1) CNOT(1,2) ... CNOT(m-2,m-1)
    RzCnot,       // RzLayer then CnotLadder
    RyCnot,       // RyLayer then CnotLadder
};

std::string_view encoder_name(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view name);

/// Data-dependent parameter-free unitary V(x). Qubit q reads feature
/// x[q mod p]; an empty feature vector contributes zero angles.
struct EncoderSpec {
    EncoderKind kind = EncoderKind::Identity;
    double scale = 1.0;
    std::vector<double> offsets; // empty, or one per qubit

    friend bool operator==(const EncoderSpec &, const EncoderSpec &) = default;
};

/**
 * U(theta, x) = V_d(x) W_d(theta_d) ... V_1(x) W_1(theta_1) V_0(x) with
 * W_k(t) = exp(-i t G_k / 2), and expert output <0|U^dag O U|0>.
 */
struct CircuitSpec {
    std::size_t qubits = 1;
    std::vector<Generator> generators;  // G_1 .. G_d
    std::vector<EncoderSpec> encoders;  // V_0 .. V_d
    PauliString observable;

    [[nodiscard]] std::size_t depth() const noexcept {
        return generators.size();
    }
    /// Throws InvalidArgument when the structural invariants fail.
    void validate() const;

    friend bool operator==(const CircuitSpec &, const CircuitSpec &) = default;
};

// Gate application. All act in place and preserve the norm.
void apply_pauli(StateVector &state, const PauliString &p);
void apply_pauli_rotation(StateVector &state, const PauliString &p,
                          double angle);
void apply_encoder(StateVector &state, const EncoderSpec &encoder,
                   std::span<const double> x, bool adjoint = false);

/// Prepares U(theta, x)|0^m>.
StateVector prepare_state(const CircuitSpec &spec,
                          std::span<const double> theta,
                          std::span<const double> x);

/// <psi|P|psi> for a normalized state.
double expectation(const StateVector &state, const PauliString &p);

double evaluate_f(const CircuitSpec &spec, std::span<const double> theta,
                  std::span<const double> x);

struct ValueAndGradient {
    double value = 0.0;
    std::vector<double> gradient;
};

/// f and its gradient from one forward and one backward sweep.
ValueAndGradient value_and_gradient(const CircuitSpec &spec,
                                    std::span<const double> theta,
                                    std::span<const double> x);
/// Writes the gradient into `grad` (size d) and returns f.
double value_and_gradient(const CircuitSpec &spec,
                          std::span<const double> theta,
                          std::span<const double> x, std::span<double> grad);

std::vector<double> gradient_adjoint(const CircuitSpec &spec,
                                     std::span<const double> theta,
                                     std::span<const double> x);

/// Two-term shift rule; throws if a generator is not a (signed) Pauli string.
std::vector<double> gradient_parameter_shift(const CircuitSpec &spec,
                                             std::span<const double> theta,
                                             std::span<const double> x);

/// d^2 f / d theta_j d theta_k (0-based) from generator insertions.
double hessian_entry(const CircuitSpec &spec, std::span<const double> theta,
                     std::span<const double> x, std::size_t j, std::size_t k);

/**
 * Default circuit family: V_0 = RZ features + CNOT ladder, later encoders
 * alternate RY features and CNOT ladders, and the last encoder is a plain RY
 * layer. Generators cycle X/Y over the qubits with every third one a
 * two-qubit YY term. Encoder offsets come from `seed`. Observable Z0.
 */
CircuitSpec make_alternating_circuit(std::size_t qubits, std::size_t depth,
                                     std::uint64_t seed,
                                     double feature_scale = 1.0);

/// The one-qubit circuit with G = X, no encoders, O = Z: f = cos(theta).
CircuitSpec make_cosine_circuit();

// Text serialization (canonical JSON block; exact double round-trip).
std::string to_text(const CircuitSpec &spec);
CircuitSpec from_text(std::string_view text);

} // namespace mfmoe::qsim
