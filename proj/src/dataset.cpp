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
#include "mfmoe/dataset.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfmoe/error.hpp"
#include "mfmoe/experts.hpp"
#include "mfmoe/io.hpp"

namespace mfmoe {

Dataset::Dataset(std::size_t feature_dim, std::vector<double> inputs,
                 std::vector<double> labels)
    : feature_dim_(feature_dim), inputs_(std::move(inputs)),
      labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw InvalidArgument("dataset needs at least one example");
    }
    if (inputs_.size() != labels_.size() * feature_dim_) {
        throw InvalidArgument("dataset inputs do not match n * feature_dim");
    }
    for (double v : inputs_) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("non-finite feature value");
        }
    }
    for (double y : labels_) {
        if (!std::isfinite(y)) {
            throw InvalidArgument("non-finite label");
        }
        label_bound_ = std::max(label_bound_, std::abs(y));
    }
}

GeneratedDataset generate_dataset(const DatasetSpec &spec,
                                  const ExpertModel &model) {
    if (spec.n == 0) {
        throw ConfigError("dataset.n", "must be at least 1");
    }
    if (spec.pool_size == 0) {
        throw ConfigError("dataset.pool_size", "must be at least 1");
    }
    if (spec.features != model.input_dim()) {
        throw ConfigError("dataset.features",
                          "does not match the expert's input dimension");
    }
    const Rng root(spec.seed, 0x64617461);
    Rng pool_rng = root.derive(0);
    std::vector<double> pool(spec.pool_size * spec.features);
    for (double &v : pool) {
        v = pool_rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    Rng pick_rng = root.derive(1);
    std::vector<double> inputs;
    inputs.reserve(spec.n * spec.features);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const auto idx = static_cast<std::size_t>(pick_rng.below(spec.pool_size));
        inputs.insert(inputs.end(), pool.begin() + idx * spec.features,
                      pool.begin() + (idx + 1) * spec.features);
    }

    nlohmann::ordered_json prov;
    prov["seed"] = spec.seed;
    prov["n"] = spec.n;
    prov["features"] = spec.features;
    prov["pool_size"] = spec.pool_size;
    std::vector<double> labels(spec.n);
    if (spec.label_mode == LabelMode::Teacher) {
        if (spec.teacher_size == 0) {
            throw ConfigError("dataset.teacher_size", "must be at least 1");
        }
        const ParticleSystem teacher =
            sample_particles(root.derive(2), spec.teacher_size, model.dim());
        for (std::size_t j = 0; j < spec.n; ++j) {
            labels[j] = mixture_eval(
                model, teacher,
                std::span<const double>(inputs.data() + j * spec.features,
                                        spec.features));
        }
        prov["label_mode"] = "teacher";
        prov["teacher"] = {{"size", spec.teacher_size},
                           {"dim", model.dim()},
                           {"particles", std::vector<double>(
                                             teacher.flat().begin(),
                                             teacher.flat().end())}};
    } else {
        if (!(spec.label_bound >= 0.0)) {
            throw ConfigError("dataset.label_bound", "must be nonnegative");
        }
        Rng label_rng = root.derive(3);
        for (double &y : labels) {
            y = label_rng.uniform(-spec.label_bound, spec.label_bound);
        }
        prov["label_mode"] = "uniform";
        prov["label_bound"] = spec.label_bound;
    }
    Dataset data(spec.features, std::move(inputs), std::move(labels));
    prov["A"] = data.label_bound();
    return {std::move(data), std::move(prov)};
}

void write_dataset_csv(const Dataset &data, const std::filesystem::path &path) {
    std::ostringstream out;
    for (std::size_t p = 0; p < data.feature_dim(); ++p) {
        out << "x_" << (p + 1) << ',';
    }
    out << "y\n";
    for (std::size_t j = 0; j < data.size(); ++j) {
        for (double v : data.input(j)) {
            out << io::format_double(v) << ',';
        }
        out << io::format_double(data.label(j)) << '\n';
    }
    io::write_file(path, out.str());
}

Dataset read_dataset_csv(const std::filesystem::path &path) {
    const io::CsvTable table = io::read_csv(path, true);
    if (table.header.empty() || table.header.back() != "y") {
        throw InvalidArgument(path.string() +
                              ": dataset header must end with column y");
    }
    const std::size_t p = table.header.size() - 1;
    for (std::size_t i = 0; i < p; ++i) {
        if (table.header[i] != "x_" + std::to_string(i + 1)) {
            throw InvalidArgument(path.string() + ": expected column x_" +
                                  std::to_string(i + 1));
        }
    }
    std::vector<double> inputs, labels;
    for (const auto &row : table.rows) {
        for (std::size_t i = 0; i < p; ++i) {
            inputs.push_back(io::parse_double(row[i]));
        }
        labels.push_back(io::parse_double(row[p]));
    }
    return Dataset(p, std::move(inputs), std::move(labels));
}

} // namespace mfmoe
