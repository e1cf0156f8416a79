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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mfmoe::io {

/// Shortest "%.17g" style text that parses back to the same double.
std::string format_double(double value);

/// Parses a full token as a double; throws InvalidArgument otherwise.
double parse_double(std::string_view token);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InvalidArgument when absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Comma-separated, no quoting. With `has_header` false the header stays
/// empty. Blank lines are skipped.
CsvTable read_csv(const std::filesystem::path &path, bool has_header = true);

/// Reads a purely numeric CSV; a non-numeric first row is treated as a header.
std::vector<std::vector<double>>
read_numeric_csv(const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);
/// Writes atomically enough for our purposes: truncate then write.
void write_file(const std::filesystem::path &path, std::string_view content);

} // namespace mfmoe::io
