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
#include <set>
#include <string>

#include <json.hpp>

#include "mfmoe/error.hpp"
#include "mfmoe/qsim.hpp"

namespace mfmoe::qsim {

using Json = nlohmann::ordered_json;

namespace {

void reject_unknown(const Json &obj, const std::set<std::string> &allowed,
                    const std::string &where) {
    for (const auto &[key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            throw InvalidArgument("unknown key '" + key + "' in " + where);
        }
    }
}

} // namespace

std::string to_text(const CircuitSpec &spec) {
    Json out;
    out["qubits"] = spec.qubits;
    out["depth"] = spec.depth();
    Json gens = Json::array();
    for (const auto &g : spec.generators) {
        if (g.coefficient == 1.0) {
            gens.push_back(g.pauli.str());
        } else {
            gens.push_back(
                Json{{"pauli", g.pauli.str()}, {"coefficient", g.coefficient}});
        }
    }
    out["generators"] = std::move(gens);
    Json encs = Json::array();
    for (const auto &e : spec.encoders) {
        Json je;
        je["family"] = std::string(encoder_name(e.kind));
        je["scale"] = e.scale;
        je["offsets"] = e.offsets;
        encs.push_back(std::move(je));
    }
    out["encoders"] = std::move(encs);
    out["observable"] = spec.observable.str();
    return out.dump(2) + "\n";
}

CircuitSpec from_text(std::string_view text) {
    Json in;
    try {
        in = Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("circuit text is not valid JSON: ") +
                              e.what());
    }
    if (!in.is_object()) {
        throw InvalidArgument("circuit text must be an object");
    }
    reject_unknown(in, {"qubits", "depth", "generators", "encoders",
                        "observable"},
                   "circuit");
    CircuitSpec spec;
    try {
        spec.qubits = in.at("qubits").get<std::size_t>();
        for (const auto &g : in.at("generators")) {
            if (g.is_string()) {
                spec.generators.push_back(
                    Generator{PauliString::parse(g.get<std::string>()), 1.0});
            } else {
                reject_unknown(g, {"pauli", "coefficient"}, "generator");
                spec.generators.push_back(Generator{
                    PauliString::parse(g.at("pauli").get<std::string>()),
                    g.at("coefficient").get<double>()});
            }
        }
        for (const auto &e : in.at("encoders")) {
            reject_unknown(e, {"family", "scale", "offsets"}, "encoder");
            EncoderSpec enc;
            enc.kind = parse_encoder_kind(e.at("family").get<std::string>());
            enc.scale = e.value("scale", 1.0);
            if (e.contains("offsets")) {
                enc.offsets = e.at("offsets").get<std::vector<double>>();
            }
            spec.encoders.push_back(std::move(enc));
        }
        spec.observable =
            PauliString::parse(in.at("observable").get<std::string>());
        if (in.contains("depth") &&
            in.at("depth").get<std::size_t>() != spec.generators.size()) {
            throw InvalidArgument("depth does not match the generator list");
        }
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed circuit: ") + e.what());
    }
    spec.validate();
    return spec;
}

} // namespace mfmoe::qsim
