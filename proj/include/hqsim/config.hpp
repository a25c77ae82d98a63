// Copyright 2026 The hqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HQSIM_CONFIG_HPP
#define HQSIM_CONFIG_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hqsim/sweep.hpp"

namespace hqsim {

/// Bad user input (config or CSV). Maps to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file. Maps to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FixedWindow {
    double t_max_ns = 0.0;
    std::size_t n_points = 0;

    bool operator==(const FixedWindow&) const = default;
};

struct OutputOptions {
    std::string path;
    bool emit_plot = false;
    int verbosity = 0;

    bool operator==(const OutputOptions&) const = default;
};

/// JSON run configuration. Top-level keys: j0_grid, materials, sigma_ratios,
/// method, master_seed, window, output. Every key is optional and defaults to
/// the default sweep; unknown keys are rejected. Energies in eV, times in ns.
struct RunConfig {
    SweepSpec sweep = default_sweep_spec();
    std::optional<FixedWindow> fixed_window;
    OutputOptions output;
};

RunConfig parse_run_config(std::string_view json_text);
std::string serialize_run_config(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

bool same_config(const RunConfig& a, const RunConfig& b);

}  // namespace hqsim

#endif  // HQSIM_CONFIG_HPP
