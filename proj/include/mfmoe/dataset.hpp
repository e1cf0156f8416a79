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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmoe {

class ExpertModel;

/// Training pairs (x_j, y_j). The label bound A = max_j |y_j| is always
/// recomputed from the labels.
class Dataset {
  public:
    Dataset(std::size_t feature_dim, std::vector<double> inputs,
            std::vector<double> labels);

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t feature_dim() const noexcept {
        return feature_dim_;
    }
    [[nodiscard]] std::span<const double> input(std::size_t j) const {
        return {inputs_.data() + j * feature_dim_, feature_dim_};
    }
    [[nodiscard]] double label(std::size_t j) const { return labels_[j]; }
    [[nodiscard]] std::span<const double> labels() const noexcept {
        return labels_;
    }
    [[nodiscard]] double label_bound() const noexcept { return label_bound_; }

  private:
    std::size_t feature_dim_;
    std::vector<double> inputs_;
    std::vector<double> labels_;
    double label_bound_ = 0.0;
};

enum class LabelMode { Teacher, Uniform };

struct DatasetSpec {
    std::size_t n = 4;
    std::size_t features = 3;
    std::size_t pool_size = 16;
    LabelMode label_mode = LabelMode::Teacher;
    double label_bound = 1.0;      // uniform mode: labels in [-A, A]
    std::size_t teacher_size = 4;  // teacher mode: experts in the teacher
    std::uint64_t seed = 7;
};

struct GeneratedDataset {
    Dataset data;
    nlohmann::ordered_json provenance;
};

/// Inputs are drawn uniformly from a pool of `pool_size` feature vectors in
/// [-pi, pi]^p. Teacher labels are F(Theta_teacher, x) for a random teacher
/// mixture of the given expert model.
GeneratedDataset generate_dataset(const DatasetSpec &spec,
                                  const ExpertModel &model);

/// CSV with header x_1..x_p,y.
void write_dataset_csv(const Dataset &data, const std::filesystem::path &path);
Dataset read_dataset_csv(const std::filesystem::path &path);

} // namespace mfmoe
