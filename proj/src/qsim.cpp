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
#include "mfmoe/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "mfmoe/error.hpp"
#include "mfmoe/rng.hpp"

namespace mfmoe::qsim {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex i_power(int n) {
    switch (((n % 4) + 4) % 4) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

/// Phase picked up by basis state |b> under P: P|b> = phase(b) |b ^ x_mask>.
struct PauliAction {
    std::uint64_t x_mask;
    std::uint64_t z_mask;
    Complex base;

    explicit PauliAction(const PauliString &p)
        : x_mask(p.x_mask()), z_mask(p.z_mask()), base(i_power(p.y_count())) {}

    [[nodiscard]] Complex phase(std::uint64_t b) const {
        return (std::popcount(b & z_mask) & 1) ? -base : base;
    }
};

void check_support(const StateVector &state, const PauliString &p) {
    if (p.min_qubits() > state.qubits()) {
        throw InvalidArgument("qubit index out of range: Pauli " + p.str() +
                              " on " + std::to_string(state.qubits()) +
                              " qubits");
    }
}

void apply_cnot_ladder(StateVector &state, bool adjoint) {
    const std::size_t m = state.qubits();
    if (m < 2) {
        return;
    }
    auto amps = state.amplitudes();
    auto cnot = [&](std::size_t control) {
        const std::uint64_t c = std::uint64_t{1} << control;
        const std::uint64_t t = std::uint64_t{1} << (control + 1);
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            if ((b & c) && !(b & t)) {
                std::swap(amps[b], amps[b | t]);
            }
        }
    };
    if (!adjoint) {
        for (std::size_t q = 0; q + 1 < m; ++q) {
            cnot(q);
        }
    } else {
        for (std::size_t q = m - 1; q-- > 0;) {
            cnot(q);
        }
    }
}

void apply_feature_layer(StateVector &state, const EncoderSpec &enc,
                         std::span<const double> x, Pauli axis, bool adjoint) {
    const std::size_t m = state.qubits();
    for (std::size_t q = 0; q < m; ++q) {
        double angle = enc.offsets.empty() ? 0.0 : enc.offsets[q];
        if (!x.empty()) {
            angle += enc.scale * x[q % x.size()];
        }
        if (adjoint) {
            angle = -angle;
        }
        apply_pauli_rotation(state, PauliString({{q, axis}}), angle);
    }
}

void check_theta(const CircuitSpec &spec, std::span<const double> theta) {
    if (theta.size() != spec.depth()) {
        throw InvalidArgument("dimension mismatch: theta has " +
                              std::to_string(theta.size()) +
                              " entries, circuit has " +
                              std::to_string(spec.depth()) + " parameters");
    }
}

void apply_generator_rotation(StateVector &state, const Generator &g,
                              double theta) {
    apply_pauli_rotation(state, g.pauli, g.coefficient * theta);
}

/// U|0> with (-i c_k / 2) G_k inserted right after W_k for each k listed.
StateVector prepare_with_insertions(const CircuitSpec &spec,
                                    std::span<const double> theta,
                                    std::span<const double> x,
                                    std::span<const std::size_t> inserts) {
    StateVector state(spec.qubits);
    apply_encoder(state, spec.encoders[0], x);
    for (std::size_t k = 0; k < spec.depth(); ++k) {
        const Generator &g = spec.generators[k];
        apply_generator_rotation(state, g, theta[k]);
        for (std::size_t ins : inserts) {
            if (ins != k) {
                continue;
            }
            apply_pauli(state, g.pauli);
            const Complex factor = -kI * (0.5 * g.coefficient);
            for (auto &a : state.amplitudes()) {
                a *= factor;
            }
        }
        apply_encoder(state, spec.encoders[k + 1], x);
    }
    return state;
}

/// <a|P|b>
Complex pauli_matrix_element(const StateVector &a, const PauliString &p,
                             const StateVector &b) {
    const PauliAction act(p);
    const auto av = a.amplitudes();
    const auto bv = b.amplitudes();
    Complex acc{0.0, 0.0};
    for (std::uint64_t i = 0; i < bv.size(); ++i) {
        acc += std::conj(av[i ^ act.x_mask]) * act.phase(i) * bv[i];
    }
    return acc;
}

} // namespace

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
    if (qubits == 0 || qubits > kMaxQubits) {
        throw InvalidArgument("qubit count must be in [1, " +
                              std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t n = amplitudes.size();
    if (n < 2 || !std::has_single_bit(n)) {
        throw InvalidArgument("amplitude count must be a power of two >= 2");
    }
    StateVector s;
    s.qubits_ = static_cast<std::size_t>(std::countr_zero(n));
    if (s.qubits_ > kMaxQubits) {
        throw InvalidArgument("too many qubits");
    }
    s.amps_ = std::move(amplitudes);
    return s;
}

double StateVector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("state size mismatch");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    }
    return acc;
}

PauliString::PauliString(std::vector<std::pair<std::size_t, Pauli>> factors) {
    std::sort(factors.begin(), factors.end());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto [q, letter] = factors[i];
        if (i > 0 && factors[i - 1].first == q) {
            throw InvalidArgument("repeated qubit in Pauli string");
        }
        if (q >= kMaxQubits) {
            throw InvalidArgument("qubit index out of range");
        }
        if (letter == Pauli::I) {
            continue;
        }
        factors_.emplace_back(q, letter);
        const std::uint64_t bit = std::uint64_t{1} << q;
        if (letter == Pauli::X || letter == Pauli::Y) {
            x_mask_ |= bit;
        }
        if (letter == Pauli::Z || letter == Pauli::Y) {
            z_mask_ |= bit;
        }
        if (letter == Pauli::Y) {
            ++y_count_;
        }
    }
}

PauliString PauliString::parse(std::string_view text) {
    if (text == "I" || text.empty()) {
        return {};
    }
    std::vector<std::pair<std::size_t, Pauli>> factors;
    std::size_t pos = 0;
    while (pos < text.size()) {
        Pauli letter;
        switch (text[pos]) {
        case 'I':
            letter = Pauli::I;
            break;
        case 'X':
            letter = Pauli::X;
            break;
        case 'Y':
            letter = Pauli::Y;
            break;
        case 'Z':
            letter = Pauli::Z;
            break;
        default:
            throw InvalidArgument("bad Pauli label '" + std::string(text) +
                                  "'");
        }
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos == start) {
            throw InvalidArgument("Pauli letter without qubit index in '" +
                                  std::string(text) + "'");
        }
        factors.emplace_back(
            std::stoul(std::string(text.substr(start, pos - start))), letter);
    }
    return PauliString(std::move(factors));
}

std::string PauliString::str() const {
    if (factors_.empty()) {
        return "I";
    }
    std::string out;
    for (const auto &[q, letter] : factors_) {
        out += "IXYZ"[static_cast<int>(letter)];
        out += std::to_string(q);
    }
    return out;
}

std::size_t PauliString::min_qubits() const noexcept {
    return factors_.empty() ? 0 : factors_.back().first + 1;
}

std::string_view encoder_name(EncoderKind kind) {
    switch (kind) {
    case EncoderKind::Identity:
        return "identity";
    case EncoderKind::RzLayer:
        return "rz";
    case EncoderKind::RyLayer:
        return "ry";
    case EncoderKind::CnotLadder:
        return "cnot_ladder";
    case EncoderKind::RzCnot:
        return "rz_cnot";
    case EncoderKind::RyCnot:
        return "ry_cnot";
    }
    return "identity";
}

EncoderKind parse_encoder_kind(std::string_view name) {
    for (auto kind : {EncoderKind::Identity, EncoderKind::RzLayer,
                      EncoderKind::RyLayer, EncoderKind::CnotLadder,
                      EncoderKind::RzCnot, EncoderKind::RyCnot}) {
        if (encoder_name(kind) == name) {
            return kind;
        }
    }
    throw InvalidArgument("unknown encoder family '" + std::string(name) + "'");
}

void CircuitSpec::validate() const {
    if (qubits == 0 || qubits > kMaxQubits) {
        throw InvalidArgument("qubit count must be in [1, " +
                              std::to_string(kMaxQubits) + "]");
    }
    if (encoders.size() != generators.size() + 1) {
        throw InvalidArgument("circuit needs depth+1 encoders, got " +
                              std::to_string(encoders.size()) + " for depth " +
                              std::to_string(generators.size()));
    }
    for (const auto &g : generators) {
        if (g.pauli.min_qubits() > qubits) {
            throw InvalidArgument("generator " + g.pauli.str() +
                                  " acts outside the register");
        }
        if (!(std::abs(g.coefficient) <= 1.0)) {
            throw InvalidArgument("generator norm exceeds 1");
        }
    }
    for (const auto &e : encoders) {
        if (!e.offsets.empty() && e.offsets.size() != qubits) {
            throw InvalidArgument("encoder offsets must have one entry per "
                                  "qubit");
        }
        for (double o : e.offsets) {
            if (!std::isfinite(o)) {
                throw InvalidArgument("non-finite encoder offset");
            }
        }
        if (!std::isfinite(e.scale)) {
            throw InvalidArgument("non-finite encoder scale");
        }
    }
    if (observable.min_qubits() > qubits) {
        throw InvalidArgument("observable acts outside the register");
    }
}

void apply_pauli(StateVector &state, const PauliString &p) {
    check_support(state, p);
    const PauliAction act(p);
    auto amps = state.amplitudes();
    if (act.x_mask == 0) {
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            amps[b] *= act.phase(b);
        }
        return;
    }
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        const std::uint64_t partner = b ^ act.x_mask;
        if (partner < b) {
            continue;
        }
        const Complex lo = amps[b];
        const Complex hi = amps[partner];
        amps[partner] = act.phase(b) * lo;
        amps[b] = act.phase(partner) * hi;
    }
}

void apply_pauli_rotation(StateVector &state, const PauliString &p,
                          double angle) {
    check_support(state, p);
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const Complex mis{0.0, -s}; // -i sin(angle/2)
    const PauliAction act(p);
    auto amps = state.amplitudes();
    if (act.x_mask == 0) {
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            amps[b] *= c + mis * act.phase(b);
        }
        return;
    }
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        const std::uint64_t partner = b ^ act.x_mask;
        if (partner < b) {
            continue;
        }
        const Complex lo = amps[b];
        const Complex hi = amps[partner];
        // (P psi)[b] = phase(partner) psi[partner], and symmetrically.
        amps[b] = c * lo + mis * act.phase(partner) * hi;
        amps[partner] = c * hi + mis * act.phase(b) * lo;
    }
}

void apply_encoder(StateVector &state, const EncoderSpec &encoder,
                   std::span<const double> x, bool adjoint) {
    if (!encoder.offsets.empty() && encoder.offsets.size() != state.qubits()) {
        throw InvalidArgument("encoder dimension does not match the register");
    }
    switch (encoder.kind) {
    case EncoderKind::Identity:
        return;
    case EncoderKind::RzLayer:
        apply_feature_layer(state, encoder, x, Pauli::Z, adjoint);
        return;
    case EncoderKind::RyLayer:
        apply_feature_layer(state, encoder, x, Pauli::Y, adjoint);
        return;
    case EncoderKind::CnotLadder:
        apply_cnot_ladder(state, adjoint);
        return;
    case EncoderKind::RzCnot:
    case EncoderKind::RyCnot: {
        const Pauli axis =
            encoder.kind == EncoderKind::RzCnot ? Pauli::Z : Pauli::Y;
        if (!adjoint) {
            apply_feature_layer(state, encoder, x, axis, false);
            apply_cnot_ladder(state, false);
        } else {
            apply_cnot_ladder(state, true);
            apply_feature_layer(state, encoder, x, axis, true);
        }
        return;
    }
    }
}

StateVector prepare_state(const CircuitSpec &spec,
                          std::span<const double> theta,
                          std::span<const double> x) {
    check_theta(spec, theta);
    return prepare_with_insertions(spec, theta, x, {});
}

double expectation(const StateVector &state, const PauliString &p) {
    check_support(state, p);
    return pauli_matrix_element(state, p, state).real();
}

double evaluate_f(const CircuitSpec &spec, std::span<const double> theta,
                  std::span<const double> x) {
    return expectation(prepare_state(spec, theta, x), spec.observable);
}

double value_and_gradient(const CircuitSpec &spec,
                          std::span<const double> theta,
                          std::span<const double> x, std::span<double> grad) {
    check_theta(spec, theta);
    if (grad.size() != spec.depth()) {
        throw InvalidArgument("gradient buffer has wrong size");
    }
    StateVector phi = prepare_with_insertions(spec, theta, x, {});
    StateVector lambda = phi;
    apply_pauli(lambda, spec.observable);
    const double value = inner_product(phi, lambda).real();

    for (std::size_t k = spec.depth(); k-- > 0;) {
        apply_encoder(phi, spec.encoders[k + 1], x, true);
        apply_encoder(lambda, spec.encoders[k + 1], x, true);
        const Generator &g = spec.generators[k];
        // d/dtheta <phi|O|phi> = 2 Re <lambda| (-i c/2) P |phi>
        grad[k] =
            g.coefficient * pauli_matrix_element(lambda, g.pauli, phi).imag();
        apply_generator_rotation(phi, g, -theta[k]);
        apply_generator_rotation(lambda, g, -theta[k]);
    }
    return value;
}

ValueAndGradient value_and_gradient(const CircuitSpec &spec,
                                    std::span<const double> theta,
                                    std::span<const double> x) {
    ValueAndGradient out;
    out.gradient.assign(spec.depth(), 0.0);
    out.value = value_and_gradient(spec, theta, x, out.gradient);
    return out;
}

std::vector<double> gradient_adjoint(const CircuitSpec &spec,
                                     std::span<const double> theta,
                                     std::span<const double> x) {
    return value_and_gradient(spec, theta, x).gradient;
}

std::vector<double> gradient_parameter_shift(const CircuitSpec &spec,
                                             std::span<const double> theta,
                                             std::span<const double> x) {
    check_theta(spec, theta);
    for (const auto &g : spec.generators) {
        if (!g.is_pauli()) {
            throw InvalidArgument("shift rule inapplicable: generator " +
                                  std::to_string(g.coefficient) + "*" +
                                  g.pauli.str() + " is not a Pauli string");
        }
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    std::vector<double> grad(spec.depth());
    constexpr double kShift = std::numbers::pi / 2.0;
    for (std::size_t k = 0; k < spec.depth(); ++k) {
        shifted[k] = theta[k] + kShift;
        const double plus = evaluate_f(spec, shifted, x);
        shifted[k] = theta[k] - kShift;
        const double minus = evaluate_f(spec, shifted, x);
        shifted[k] = theta[k];
        grad[k] = 0.5 * (plus - minus);
    }
    return grad;
}

double hessian_entry(const CircuitSpec &spec, std::span<const double> theta,
                     std::span<const double> x, std::size_t j, std::size_t k) {
    check_theta(spec, theta);
    if (j >= spec.depth() || k >= spec.depth()) {
        throw InvalidArgument("hessian index out of range");
    }
    const std::size_t only_j[] = {j};
    const std::size_t only_k[] = {k};
    const std::size_t both[] = {j, k};
    const StateVector psi = prepare_with_insertions(spec, theta, x, {});
    const StateVector dj = prepare_with_insertions(spec, theta, x, only_j);
    const StateVector dk = prepare_with_insertions(spec, theta, x, only_k);
    const StateVector djk = prepare_with_insertions(spec, theta, x, both);
    const Complex cross = pauli_matrix_element(dj, spec.observable, dk);
    const Complex second = pauli_matrix_element(psi, spec.observable, djk);
    return 2.0 * (cross.real() + second.real());
}

CircuitSpec make_alternating_circuit(std::size_t qubits, std::size_t depth,
                                     std::uint64_t seed,
                                     double feature_scale) {
    if (depth == 0) {
        throw InvalidArgument("circuit depth must be at least 1");
    }
    CircuitSpec spec;
    spec.qubits = qubits;
    spec.observable = PauliString({{0, Pauli::Z}});
    for (std::size_t k = 0; k < depth; ++k) {
        const std::size_t q = k % qubits;
        Generator g;
        if (qubits >= 2 && k % 3 == 2) {
            g.pauli = PauliString(
                {{q, Pauli::Y}, {(q + 1) % qubits, Pauli::Y}});
        } else {
            g.pauli = PauliString(
                {{q, ((k / qubits) % 2 == 0) ? Pauli::X : Pauli::Y}});
        }
        spec.generators.push_back(std::move(g));
    }
    const Rng base(seed, 0x656e63);
    auto offsets = [&](std::size_t k) {
        Rng r = base.derive(k);
        std::vector<double> out(qubits);
        for (double &o : out) {
            o = r.uniform(0.0, 2.0 * std::numbers::pi);
        }
        return out;
    };
    for (std::size_t k = 0; k <= depth; ++k) {
        EncoderSpec e;
        e.scale = feature_scale;
        if (k == 0) {
            e.kind = EncoderKind::RzCnot;
            e.offsets = offsets(k);
        } else if (k == depth || k % 2 == 1) {
            e.kind = EncoderKind::RyLayer;
            e.offsets = offsets(k);
        } else {
            e.kind = EncoderKind::CnotLadder;
        }
        spec.encoders.push_back(std::move(e));
    }
    spec.validate();
    return spec;
}

CircuitSpec make_cosine_circuit() {
    CircuitSpec spec;
    spec.qubits = 1;
    spec.generators = {Generator{PauliString({{0, Pauli::X}}), 1.0}};
    spec.encoders = {EncoderSpec{}, EncoderSpec{}};
    spec.observable = PauliString({{0, Pauli::Z}});
    return spec;
}

} // namespace mfmoe::qsim
