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

#include "hqsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hqsim/units.hpp"

namespace hqsim {

namespace {

constexpr std::size_t kMinWindowPoints = 64;
constexpr std::uint64_t kPilotStream = 0x70696c6f74ULL;

double gap_sensitivity_sq(const QubitParams& base, const NoiseSpec& spec) {
    // The subspace Hamiltonian is linear in (delta_e, j1, j2), so unit
    // perturbations give exact derivatives of its entries.
    QubitParams mean = base;
    mean.e_z = 0.0;
    mean.delta_e = 0.0;
    mean.j1 = spec.j01;
    mean.j2 = spec.j02;
    const Eigen::Matrix3d h = subspace_hamiltonian(mean).matrix;
    const double d = h(0, 0) - h(1, 1);
    const double o = h(0, 1);
    const double gap = std::sqrt(d * d + 4.0 * o * o);
    if (gap == 0.0) return 0.0;

    auto slope = [&](auto&& perturb, double width) {
        if (width == 0.0) return 0.0;
        QubitParams p = mean;
        perturb(p, width);
        const Eigen::Matrix3d dh = subspace_hamiltonian(p).matrix - h;
        return (d * (dh(0, 0) - dh(1, 1)) + 4.0 * o * dh(0, 1)) / gap;
    };
    const double s_e = slope([](QubitParams& p, double w) { p.delta_e += w; }, std::sqrt(2.0) * spec.sigma_e);
    const double s_1 = slope([](QubitParams& p, double w) { p.j1 += w; }, spec.sigma_j1);
    const double s_2 = slope([](QubitParams& p, double w) { p.j2 += w; }, spec.sigma_j2);
    return s_e * s_e + s_1 * s_1 + s_2 * s_2;
}

std::size_t points_for(double t_max, double period, double lifetime, const WindowPolicy& policy) {
    double n = static_cast<double>(kMinWindowPoints);
    if (std::isfinite(period) && period > 0.0) n = std::max(n, policy.points_per_period * t_max / period);
    if (std::isfinite(lifetime) && lifetime > 0.0) n = std::max(n, policy.points_per_lifetime * t_max / lifetime);
    return static_cast<std::size_t>(std::ceil(n)) + 1;
}

}  // namespace

const std::vector<MaterialPreset>& material_presets() {
    static const std::vector<MaterialPreset> presets{{"28Si", 0.0}, {"Si", 3e-9}, {"GaAs", 1e-7}};
    return presets;
}

std::optional<MaterialPreset> find_preset(std::string_view name) {
    for (const auto& m : material_presets()) {
        if (m.name == name) return m;
    }
    return std::nullopt;
}

void SweepSpec::validate() const {
    if (j0_grid.empty()) throw std::invalid_argument("j0_grid must not be empty");
    for (double j0 : j0_grid) {
        if (!(j0 > 0.0) || !std::isfinite(j0)) throw std::invalid_argument("j0_grid values must be positive");
    }
    if (materials.empty()) throw std::invalid_argument("materials must not be empty");
    for (const auto& m : materials) {
        if (!(m.sigma_e >= 0.0) || !std::isfinite(m.sigma_e)) {
            throw std::invalid_argument("materials: sigma_e must be >= 0");
        }
    }
    if (sigma_ratios.empty()) throw std::invalid_argument("sigma_ratios must not be empty");
    for (double r : sigma_ratios) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("sigma_ratios must be >= 0");
    }
    validate_method(method);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw std::invalid_argument("log_spaced: bad range");
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

SweepSpec default_sweep_spec() {
    SweepSpec spec;
    spec.j0_grid = log_spaced(5e-9, 1e-5, 30);
    spec.materials = material_presets();
    spec.sigma_ratios = {0.003, 0.03};
    spec.method = MonteCarlo{20000, 0};
    spec.master_seed = 20180905;
    return spec;
}

PointParams derive_point_params(double j0, double ratio, const MaterialPreset& material) {
    if (!(j0 > 0.0)) throw std::invalid_argument("derive_point_params: j0 must be > 0");
    PointParams out;
    out.base.e_z = 0.0;
    out.base.delta_e = 0.0;
    out.base.j_prime = 0.5 * j0;
    out.base.j1 = 0.5 * j0;
    out.base.j2 = 1.5 * j0;
    out.noise.sigma_e = material.sigma_e;
    out.noise.j01 = 0.5 * j0;
    out.noise.j02 = 1.5 * j0;
    out.noise.sigma_j1 = out.noise.j01 * ratio;
    out.noise.sigma_j2 = out.noise.j02 * ratio;
    return out;
}

double oscillation_period(const QubitParams& base, const NoiseSpec& spec) {
    QubitParams mean = base;
    mean.j1 = spec.j01;
    mean.j2 = spec.j02;
    const double beta = compute_abc(mean).beta;
    return beta > 0.0 ? 2.0 * kPi / beta : std::numeric_limits<double>::infinity();
}

double dephasing_estimate(const QubitParams& base, const NoiseSpec& spec) {
    const double s2 = gap_sensitivity_sq(base, spec);
    if (s2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(2.0) * kHbar / std::sqrt(s2);
}

TimeWindow choose_time_window(const QubitParams& base, const NoiseSpec& spec, const WindowPolicy& policy,
                              std::uint64_t seed) {
    spec.validate();
    TimeWindow w;
    w.period = oscillation_period(base, spec);
    const double lifetime = dephasing_estimate(base, spec);

    double t_max = std::min(policy.start_periods * w.period, policy.start_lifetimes * lifetime);
    if (!std::isfinite(t_max) || !(t_max > 0.0)) t_max = 1.0;
    const double cap = std::isfinite(w.period) ? policy.cap_periods * w.period : t_max;

    const MonteCarlo pilot{policy.pilot_samples, mix_seed(seed, kPilotStream)};
    for (;;) {
        std::size_t n = points_for(t_max, w.period, lifetime, policy);
        const std::vector<double> grid = uniform_time_grid(t_max, n);
        const AveragedTrace trace = average_return_probability(base, spec, grid, pilot);
        const EnvelopeFit fit = t2_star(trace);

        const bool settled = !fit.diagnostics.no_decay && !fit.diagnostics.window_too_short &&
                             std::pow(t_max / fit.t2_star, fit.alpha_fit) >= -std::log(policy.settle_fraction);
        if (settled || t_max >= cap) {
            // Resolve the decay itself when it is faster than the estimate.
            if (settled) n = std::max(n, points_for(t_max, w.period, fit.t2_star, policy));
            w.t_max = t_max;
            w.n_points = n;
            w.capped = !settled;
            return w;
        }
        t_max = std::min(2.0 * t_max, cap);
        ++w.doublings;
    }
}

const SweepRow* SweepResult::find(std::string_view material, std::size_t ratio_index, std::size_t j0_index) const {
    for (const auto& r : rows) {
        if (r.material == material && r.ratio_index == ratio_index && r.j0_index == j0_index) return &r;
    }
    return nullptr;
}

std::uint64_t point_seed(std::uint64_t master, std::size_t material, std::size_t ratio, std::size_t j0) {
    return mix_seed(mix_seed(mix_seed(master, material), ratio), j0);
}

SweepRow evaluate_point(double j0, double ratio, const MaterialPreset& material, const AveragingMethod& method,
                        const TimeWindow& window) {
    const PointParams pp = derive_point_params(j0, ratio, material);
    const std::vector<double> grid = uniform_time_grid(window.t_max, window.n_points);
    const AveragedTrace trace = average_return_probability(pp.base, pp.noise, grid, method);
    const EnvelopeFit fit = t2_star(trace);

    SweepRow row;
    row.material = material.name;
    row.sigma_ratio = ratio;
    row.j0 = j0;
    row.t2_star = fit.t2_star;
    row.alpha = fit.alpha_fit;
    row.p_sat = fit.p_sat;
    row.q = quality_factor(j0, fit.t2_star).q;
    row.rmse = fit.rmse;
    row.converged = fit.converged;
    row.n_peaks = fit.n_peaks_used;
    row.window = window.t_max;
    row.n_points = window.n_points;
    row.diagnostics = fit.diagnostics;
    if (window.capped) row.diagnostics.window_too_short = true;
    if (const auto* mc = std::get_if<MonteCarlo>(&method)) row.seed = mc->seed;
    return row;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t threads) {
    spec.validate();
    struct Task {
        std::size_t m, r, j;
    };
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < spec.materials.size(); ++m) {
        for (std::size_t r = 0; r < spec.sigma_ratios.size(); ++r) {
            for (std::size_t j = 0; j < spec.j0_grid.size(); ++j) tasks.push_back({m, r, j});
        }
    }

    std::vector<SweepRow> rows(tasks.size());
    auto run_task = [&](std::size_t i) {
        const Task& t = tasks[i];
        const MaterialPreset& material = spec.materials[t.m];
        const double ratio = spec.sigma_ratios[t.r];
        const double j0 = spec.j0_grid[t.j];
        const std::uint64_t seed = point_seed(spec.master_seed, t.m, t.r, t.j);

        const PointParams pp = derive_point_params(j0, ratio, material);
        TimeWindow window;
        try {
            window = choose_time_window(pp.base, pp.noise, spec.window, seed);
        } catch (const std::exception&) {
            window.t_max = spec.window.start_periods * oscillation_period(pp.base, pp.noise);
            window.n_points = static_cast<std::size_t>(spec.window.start_periods * spec.window.points_per_period) + 1;
            window.capped = true;
        }
        AveragingMethod method = spec.method;
        if (auto* mc = std::get_if<MonteCarlo>(&method)) mc->seed = seed;

        SweepRow row;
        try {
            row = evaluate_point(j0, ratio, material, method, window);
        } catch (const std::exception&) {
            row.material = material.name;
            row.sigma_ratio = ratio;
            row.j0 = j0;
            row.t2_star = std::numeric_limits<double>::quiet_NaN();
            row.q = std::numeric_limits<double>::quiet_NaN();
            row.window = window.t_max;
            row.seed = seed;
            row.diagnostics.diverged = true;
        }
        row.material_index = t.m;
        row.ratio_index = t.r;
        row.j0_index = t.j;
        rows[i] = std::move(row);
    };

    std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min(workers, tasks.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
            });
        }
    }
    return {std::move(rows)};
}

}  // namespace hqsim
