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
#include "mfmoe/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfmoe/error.hpp"
#include "mfmoe/io.hpp"

namespace mfmoe {

using Json = nlohmann::ordered_json;

namespace {

/// Typed access to one JSON object with unknown-key rejection.
class Section {
  public:
    Section(const Json &obj, std::string path, std::set<std::string> allowed)
        : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_, "must be an object");
        }
        for (const auto &[key, _] : obj_.items()) {
            if (!allowed.contains(key)) {
                throw ConfigError(field(key), "unknown key");
            }
        }
    }

    [[nodiscard]] bool has(const std::string &key) const {
        return obj_.contains(key);
    }
    [[nodiscard]] const Json &raw(const std::string &key) const {
        return obj_.at(key);
    }
    [[nodiscard]] std::string field(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    template <typename T> void read(const std::string &key, T &out) const {
        if (!obj_.contains(key)) {
            return;
        }
        try {
            out = obj_.at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            throw ConfigError(field(key), "has the wrong type");
        }
    }

    void read_count(const std::string &key, std::size_t &out) const {
        if (!obj_.contains(key)) {
            return;
        }
        const Json &v = obj_.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw ConfigError(field(key), "must be a nonnegative integer");
        }
        out = v.get<std::size_t>();
    }

    void read_seed(const std::string &key, std::uint64_t &out) const {
        if (!obj_.contains(key)) {
            return;
        }
        const Json &v = obj_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() &&
                                         v.get<std::int64_t>() >= 0)) {
            throw ConfigError(field(key), "must be a nonnegative integer");
        }
        out = v.get<std::uint64_t>();
    }

    void read_real(const std::string &key, double &out) const {
        if (!obj_.contains(key)) {
            return;
        }
        const Json &v = obj_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw ConfigError(field(key), "must be a finite number");
        }
        out = v.get<double>();
    }

  private:
    const Json &obj_;
    std::string path_;
};

ExpertKind parse_kind(const std::string &s) {
    if (s == "fourier") {
        return ExpertKind::Fourier;
    }
    if (s == "quantum") {
        return ExpertKind::Quantum;
    }
    throw ConfigError("expert.kind", "must be \"fourier\" or \"quantum\"");
}

} // namespace

ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path &base_dir) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("", std::string("config is not valid JSON: ") +
                                  e.what());
    }
    ExperimentConfig cfg;
    const Section top(root, "",
                      {"expert", "dataset", "dynamics", "simulate", "sweep",
                       "verify", "output_dir"});

    if (top.has("expert")) {
        const Section s(top.raw("expert"), "expert",
                        {"kind", "dim", "seed", "alpha", "beta", "qubits",
                         "feature_scale", "circuit"});
        auto &e = cfg.expert;
        std::string kind = "fourier";
        s.read("kind", kind);
        e.kind = parse_kind(kind);
        s.read_count("dim", e.dim);
        s.read_seed("seed", e.seed);
        s.read_real("alpha", e.alpha);
        s.read_real("beta", e.beta);
        s.read_count("qubits", e.qubits);
        s.read_real("feature_scale", e.feature_scale);
        if (s.has("circuit")) {
            try {
                e.circuit = qsim::from_text(s.raw("circuit").dump());
            } catch (const InvalidArgument &err) {
                throw ConfigError("expert.circuit", err.what());
            }
            e.dim = e.circuit->depth();
            e.qubits = e.circuit->qubits;
        }
    }
    if (top.has("dataset")) {
        const Section s(top.raw("dataset"), "dataset",
                        {"n", "features", "pool_size", "label_mode",
                         "label_bound", "teacher_size", "seed", "file"});
        auto &d = cfg.dataset.spec;
        s.read_count("n", d.n);
        s.read_count("features", d.features);
        s.read_count("pool_size", d.pool_size);
        std::string mode = "teacher";
        s.read("label_mode", mode);
        if (mode == "teacher") {
            d.label_mode = LabelMode::Teacher;
        } else if (mode == "uniform") {
            d.label_mode = LabelMode::Uniform;
        } else {
            throw ConfigError("dataset.label_mode",
                              "must be \"teacher\" or \"uniform\"");
        }
        s.read_real("label_bound", d.label_bound);
        s.read_count("teacher_size", d.teacher_size);
        s.read_seed("seed", d.seed);
        if (s.has("file")) {
            std::string file;
            s.read("file", file);
            std::filesystem::path p(file);
            cfg.dataset.file = p.is_relative() ? base_dir / p : p;
        }
    }
    if (top.has("dynamics")) {
        const Section s(top.raw("dynamics"), "dynamics",
                        {"T", "h", "record_every"});
        s.read_real("T", cfg.dynamics.horizon);
        s.read_real("h", cfg.dynamics.step);
        s.read_count("record_every", cfg.dynamics.record_every);
    }
    if (top.has("simulate")) {
        const Section s(top.raw("simulate"), "simulate",
                        {"N", "seed", "record_particles"});
        s.read_count("N", cfg.simulate.particles);
        s.read_seed("seed", cfg.simulate.seed);
        s.read("record_particles", cfg.simulate.record_particles);
    }
    if (top.has("sweep")) {
        const Section s(top.raw("sweep"), "sweep",
                        {"N", "reference_size", "seeds", "base_seed", "mode"});
        auto &w = cfg.sweep;
        if (s.has("N")) {
            const Json &v = s.raw("N");
            if (!v.is_array()) {
                throw ConfigError("sweep.N", "must be a list of counts");
            }
            for (const auto &n : v) {
                if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
                    throw ConfigError("sweep.N",
                                      "entries must be positive integers");
                }
                w.particle_counts.push_back(n.get<std::size_t>());
            }
        }
        s.read_count("reference_size", w.reference_size);
        if (s.has("seeds")) {
            const Json &v = s.raw("seeds");
            if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
                w.seeds.clear();
                for (std::uint64_t k = 0; k < v.get<std::uint64_t>(); ++k) {
                    w.seeds.push_back(k);
                }
            } else if (v.is_array()) {
                w.seeds.clear();
                for (const auto &x : v) {
                    if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
                        throw ConfigError("sweep.seeds",
                                          "entries must be nonnegative "
                                          "integers");
                    }
                    w.seeds.push_back(x.get<std::uint64_t>());
                }
            } else {
                throw ConfigError("sweep.seeds",
                                  "must be a count or a list of seeds");
            }
        }
        s.read_seed("base_seed", w.base_seed);
        std::string mode = "rate_fit";
        s.read("mode", mode);
        if (mode == "rate_fit") {
            w.mode = SweepMode::RateFit;
        } else if (mode == "simulation") {
            w.mode = SweepMode::Simulation;
        } else {
            throw ConfigError("sweep.mode",
                              "must be \"rate_fit\" or \"simulation\"");
        }
    }
    if (top.has("verify")) {
        const Section s(top.raw("verify"), "verify",
                        {"trials", "seed", "max_atoms"});
        s.read_count("trials", cfg.verify.trials);
        s.read_seed("seed", cfg.verify.seed);
        s.read_count("max_atoms", cfg.verify.max_atoms);
    }
    if (top.has("output_dir")) {
        std::string out;
        top.read("output_dir", out);
        cfg.output_dir = out;
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const InvalidArgument &) {
        throw ConfigError("", "cannot read config file " + path.string());
    }
    return parse_config(text, path.parent_path());
}

Json config_to_json(const ExperimentConfig &cfg) {
    Json root;
    Json expert;
    expert["kind"] =
        cfg.expert.kind == ExpertKind::Fourier ? "fourier" : "quantum";
    expert["dim"] = cfg.expert.dim;
    expert["seed"] = cfg.expert.seed;
    expert["alpha"] = cfg.expert.alpha;
    expert["beta"] = cfg.expert.beta;
    if (cfg.expert.kind == ExpertKind::Quantum) {
        expert["qubits"] = cfg.expert.qubits;
        expert["feature_scale"] = cfg.expert.feature_scale;
        if (cfg.expert.circuit) {
            expert["circuit"] = Json::parse(qsim::to_text(*cfg.expert.circuit));
        }
    }
    root["expert"] = std::move(expert);

    const auto &d = cfg.dataset.spec;
    Json data;
    data["n"] = d.n;
    data["features"] = d.features;
    data["pool_size"] = d.pool_size;
    data["label_mode"] = d.label_mode == LabelMode::Teacher ? "teacher"
                                                            : "uniform";
    data["label_bound"] = d.label_bound;
    data["teacher_size"] = d.teacher_size;
    data["seed"] = d.seed;
    if (cfg.dataset.file) {
        data["file"] = cfg.dataset.file->string();
    }
    root["dataset"] = std::move(data);

    root["dynamics"] = {{"T", cfg.dynamics.horizon},
                        {"h", cfg.dynamics.step},
                        {"record_every", cfg.dynamics.record_every}};
    root["simulate"] = {{"N", cfg.simulate.particles},
                        {"seed", cfg.simulate.seed},
                        {"record_particles", cfg.simulate.record_particles}};
    root["sweep"] = {
        {"N", cfg.sweep.particle_counts},
        {"reference_size", cfg.sweep.reference_size},
        {"seeds", cfg.sweep.seeds},
        {"base_seed", cfg.sweep.base_seed},
        {"mode", cfg.sweep.mode == SweepMode::RateFit ? "rate_fit"
                                                      : "simulation"}};
    root["verify"] = {{"trials", cfg.verify.trials},
                      {"seed", cfg.verify.seed},
                      {"max_atoms", cfg.verify.max_atoms}};
    root["output_dir"] = cfg.output_dir.string();
    return root;
}

std::vector<std::string> validate_dynamics(const DynamicsConfig &dyn) {
    if (!(dyn.step > 0.0)) {
        throw ConfigError("dynamics.h", "step size must be positive");
    }
    if (!(dyn.horizon > 0.0)) {
        throw ConfigError("dynamics.T", "horizon must be positive");
    }
    if (dyn.step > dyn.horizon) {
        throw ConfigError("dynamics.h", "step size must not exceed T");
    }
    if (dyn.record_every == 0) {
        throw ConfigError("dynamics.record_every", "must be at least 1");
    }
    return {};
}

std::vector<std::string> validate_sweep(const ExperimentConfig &cfg) {
    auto warnings = validate_dynamics(cfg.dynamics);
    const auto &w = cfg.sweep;
    if (w.particle_counts.empty()) {
        throw ConfigError("sweep.N", "particle count list is empty");
    }
    if (w.seeds.empty()) {
        throw ConfigError("sweep.seeds", "no seeds given");
    }
    const std::size_t max_n =
        *std::max_element(w.particle_counts.begin(), w.particle_counts.end());
    if (w.reference_size < max_n) {
        throw ConfigError("sweep.reference_size",
                          "must be at least the largest N");
    }
    if (w.mode == SweepMode::RateFit) {
        if (cfg.expert.dim <= 4) {
            throw ConfigError("expert.dim",
                              "rate-fit mode requires dimension d > 4");
        }
        if (w.reference_size < 8 * max_n) {
            throw ConfigError("sweep.reference_size",
                              "rate-fit mode requires M >= 8 * max(N)");
        }
    } else if (cfg.expert.dim <= 4) {
        warnings.push_back("dimension d <= 4: rate bound hypotheses do not "
                           "hold; rate fit disabled");
    }
    return warnings;
}

ExpertModel build_expert(const ExperimentConfig &cfg) {
    const auto &e = cfg.expert;
    const std::size_t features = cfg.dataset.spec.features;
    if (e.dim == 0) {
        throw ConfigError("expert.dim", "must be at least 1");
    }
    if (!(e.alpha > 0.0)) {
        throw ConfigError("expert.alpha", "must be positive");
    }
    if (!(e.beta > 0.0)) {
        throw ConfigError("expert.beta", "must be positive");
    }
    try {
        if (e.kind == ExpertKind::Fourier) {
            return ExpertModel::fourier(
                FourierExpert::random(e.dim, features, e.seed), e.alpha,
                e.beta);
        }
        if (e.qubits == 0 || e.qubits > qsim::kMaxQubits) {
            throw ConfigError("expert.qubits", "must be in [1, 12]");
        }
        qsim::CircuitSpec circuit =
            e.circuit ? *e.circuit
                      : qsim::make_alternating_circuit(e.qubits, e.dim, e.seed,
                                                       e.feature_scale);
        return ExpertModel::quantum(std::move(circuit), features, e.alpha,
                                    e.beta);
    } catch (const InvalidArgument &err) {
        throw ConfigError("expert", err.what());
    }
}

Problem build_problem(const ExperimentConfig &cfg) {
    ExpertModel model = build_expert(cfg);
    if (cfg.dataset.file) {
        Dataset data = [&] {
            try {
                return read_dataset_csv(*cfg.dataset.file);
            } catch (const InvalidArgument &err) {
                throw ConfigError("dataset.file", err.what());
            }
        }();
        if (data.feature_dim() != model.input_dim()) {
            throw ConfigError("dataset.features",
                              "file feature count does not match "
                              "dataset.features");
        }
        Json prov{{"file", cfg.dataset.file->string()},
                  {"A", data.label_bound()}};
        return {std::move(model), std::move(data), std::move(prov)};
    }
    auto generated = generate_dataset(cfg.dataset.spec, model);
    return {std::move(model), std::move(generated.data),
            std::move(generated.provenance)};
}

} // namespace mfmoe
