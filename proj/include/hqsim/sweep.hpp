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

#ifndef HQSIM_SWEEP_HPP
#define HQSIM_SWEEP_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqsim/envelope.hpp"
#include "hqsim/noise.hpp"

namespace hqsim {

struct MaterialPreset {
    std::string name;
    double sigma_e = 0.0;  ///< eV

    bool operator==(const MaterialPreset&) const = default;
};

/// 28Si, Si and GaAs.
const std::vector<MaterialPreset>& material_presets();
std::optional<MaterialPreset> find_preset(std::string_view name);

/// Adaptive time-window knobs. Periods are counted in T0 = 2 pi / beta.
struct WindowPolicy {
    double start_periods = 200.0;
    double points_per_period = 40.0;
    double cap_periods = 2e5;
    /// Initial window is also capped at this many linearized dephasing times.
    double start_lifetimes = 30.0;
    /// Minimum samples per (estimated or pilot-fitted) dephasing time.
    double points_per_lifetime = 20.0;
    /// Residual decaying fraction exp(-(t_max/T2*)^alpha) accepted as settled.
    double settle_fraction = 0.05;
    std::size_t pilot_samples = 1000;

    bool operator==(const WindowPolicy&) const = default;
};

struct SweepSpec {
    std::vector<double> j0_grid;  ///< eV
    std::vector<MaterialPreset> materials;
    std::vector<double> sigma_ratios;
    AveragingMethod method = MonteCarlo{};
    std::uint64_t master_seed = 0;
    WindowPolicy window;

    void validate() const;
};

/// 30 log-spaced j0 in [5e-9, 1e-5] eV, all presets, ratios {0.003, 0.03},
/// Monte Carlo with 2e4 samples.
SweepSpec default_sweep_spec();

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

struct PointParams {
    QubitParams base;
    NoiseSpec noise;
};

/// j01 = j0/2, j02 = 3 j0/2, j' = j0/2, sigma_ji = ratio * j0i, sigma_e from the material.
PointParams derive_point_params(double j0, double ratio, const MaterialPreset& material);

/// T0 = 2 pi / beta at the mean couplings, ns.
double oscillation_period(const QubitParams& base, const NoiseSpec& spec);

/// Linearized dephasing time sqrt(2) hbar / sigma_gap of the logical splitting, ns
/// (infinity without disorder).
double dephasing_estimate(const QubitParams& base, const NoiseSpec& spec);

struct TimeWindow {
    double t_max = 0.0;  ///< ns
    std::size_t n_points = 0;
    double period = 0.0;  ///< T0, ns
    bool capped = false;
    int doublings = 0;
};

TimeWindow choose_time_window(const QubitParams& base, const NoiseSpec& spec, const WindowPolicy& policy,
                              std::uint64_t seed);

struct SweepRow {
    std::string material;
    double sigma_ratio = 0.0;
    double j0 = 0.0;       ///< eV
    double t2_star = 0.0;  ///< ns
    double alpha = 0.0;
    double p_sat = 0.0;
    double q = 0.0;
    double rmse = 0.0;
    bool converged = false;
    std::size_t n_peaks = 0;
    double window = 0.0;  ///< ns
    std::uint64_t seed = 0;
    std::size_t n_points = 0;
    FitDiagnostics diagnostics;
    std::size_t material_index = 0;
    std::size_t ratio_index = 0;
    std::size_t j0_index = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< ordered by (material, ratio, j0) index

    const SweepRow* find(std::string_view material, std::size_t ratio_index, std::size_t j0_index) const;
};

std::uint64_t point_seed(std::uint64_t master, std::size_t material, std::size_t ratio, std::size_t j0);

/// Averages and fits one grid point on a given window.
SweepRow evaluate_point(double j0, double ratio, const MaterialPreset& material, const AveragingMethod& method,
                        const TimeWindow& window);

/// `threads` = 0 uses the hardware concurrency; output is identical for any value.
SweepResult run_sweep(const SweepSpec& spec, std::size_t threads = 0);

}  // namespace hqsim

#endif  // HQSIM_SWEEP_HPP
