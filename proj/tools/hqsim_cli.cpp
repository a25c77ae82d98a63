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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqsim/config.hpp"
#include "hqsim/csv.hpp"
#include "hqsim/envelope.hpp"
#include "hqsim/noise.hpp"
#include "hqsim/sweep.hpp"

namespace {

using namespace hqsim;

struct Overrides {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string method;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> nodes;
    bool emit_plot = false;
    std::size_t threads = 0;
};

RunConfig resolve_config(const Overrides& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
    if (o.seed) cfg.sweep.master_seed = *o.seed;
    if (o.method == "mc" && !std::holds_alternative<MonteCarlo>(cfg.sweep.method)) cfg.sweep.method = MonteCarlo{};
    if (o.method == "quad" && !std::holds_alternative<Quadrature>(cfg.sweep.method)) cfg.sweep.method = Quadrature{};
    if (o.samples) {
        auto* mc = std::get_if<MonteCarlo>(&cfg.sweep.method);
        if (!mc) throw InputError("--samples applies to the mc method");
        if (*o.samples == 0) throw InputError("--samples must be >= 1");
        mc->n_samples = *o.samples;
    }
    if (o.nodes) {
        auto* q = std::get_if<Quadrature>(&cfg.sweep.method);
        if (!q) throw InputError("--nodes applies to the quad method");
        if (*o.nodes == 0) throw InputError("--nodes must be >= 1");
        q->nodes_per_dim = *o.nodes;
    }
    if (!o.out_path.empty()) cfg.output.path = o.out_path;
    if (o.emit_plot) cfg.output.emit_plot = true;
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

int cmd_presets() {
    for (const auto& m : material_presets()) std::cout << m.name << " sigma_e_eV=" << format_double(m.sigma_e) << '\n';
    return 0;
}

int cmd_trace(const Overrides& o) {
    const RunConfig cfg = resolve_config(o);
    const SweepSpec& s = cfg.sweep;
    if (s.j0_grid.size() != 1 || s.materials.size() != 1 || s.sigma_ratios.size() != 1) {
        throw InputError("trace needs exactly one j0_grid value, one material and one sigma_ratio");
    }
    const PointParams pp = derive_point_params(s.j0_grid[0], s.sigma_ratios[0], s.materials[0]);
    const std::uint64_t seed = point_seed(s.master_seed, 0, 0, 0);
    std::vector<double> grid;
    if (cfg.fixed_window) {
        grid = uniform_time_grid(cfg.fixed_window->t_max_ns, cfg.fixed_window->n_points);
    } else {
        const TimeWindow w = choose_time_window(pp.base, pp.noise, s.window, seed);
        grid = uniform_time_grid(w.t_max, w.n_points);
    }
    AveragingMethod method = s.method;
    if (auto* mc = std::get_if<MonteCarlo>(&method)) mc->seed = seed;
    const AveragedTrace trace = average_return_probability(pp.base, pp.noise, grid, method, o.threads == 0 ? 1 : o.threads);
    std::ostringstream ss;
    write_trace_csv(ss, trace);
    emit(cfg.output.path, ss.str());
    return 0;
}

int cmd_fit(const std::string& trace_path, const std::string& json_path) {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) throw IoError("cannot read trace '" + trace_path + "'");
    const TraceTable table = read_trace_csv(in);
    if (table.t_ns.size() < 3) throw InputError("trace has too few rows to fit (need at least 3)");
    EnvelopeFit fit;
    try {
        fit = t2_star(table.t_ns, table.p_avg);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("cannot fit trace: ") + e.what());
    }
    std::cout << "p_sat = " << format_double(fit.p_sat) << '\n'
              << "t2_star_ns = " << format_double(fit.t2_star) << '\n'
              << "alpha = " << format_double(fit.alpha_fit) << '\n'
              << "rmse = " << format_double(fit.rmse) << '\n'
              << "converged = " << (fit.converged ? "true" : "false") << '\n'
              << "n_peaks = " << fit.n_peaks_used << '\n'
              << "diagnostics = " << fit.diagnostics.describe() << '\n';
    if (!json_path.empty()) {
        const nlohmann::json j = {{"p_sat", fit.p_sat},
                                  {"t2_star_ns", fit.t2_star},
                                  {"alpha", fit.alpha_fit},
                                  {"rmse", fit.rmse},
                                  {"converged", fit.converged},
                                  {"n_peaks", fit.n_peaks_used},
                                  {"diagnostics", fit.diagnostics.describe()}};
        write_file(json_path, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const Overrides& o) {
    const RunConfig cfg = resolve_config(o);
    if (cfg.fixed_window) throw InputError("config key 'window.t_max_ns': fixed windows apply to trace only");
    const SweepResult result = run_sweep(cfg.sweep, o.threads);
    const std::string csv = sweep_csv(result);
    emit(cfg.output.path, csv);
    if (cfg.output.emit_plot) {
        const std::string csv_path = cfg.output.path.empty() || cfg.output.path == "-" ? "sweep.csv" : cfg.output.path;
        std::ostringstream ss;
        write_plot_script(ss, csv_path, result);
        write_file(csv_path + ".gp", ss.str());
    }
    if (cfg.output.verbosity > 0) {
        for (const auto& r : result.rows) {
            std::cerr << r.material << " ratio=" << format_double(r.sigma_ratio) << " j0=" << format_double(r.j0)
                      << " t2=" << format_double(r.t2_star) << " " << r.diagnostics.describe() << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid-qubit dephasing simulator: disorder-averaged traces, T2* fits and j0 sweeps"};
    app.require_subcommand(1);

    Overrides o;
    auto add_run_flags = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON run configuration");
        sub->add_option("--out", o.out_path, "output CSV path ('-' for stdout)");
        sub->add_option("--seed", o.seed, "master seed (overrides config)");
        sub->add_option("--method", o.method, "averaging method")->check(CLI::IsMember({"mc", "quad"}));
        sub->add_option("--samples", o.samples, "Monte Carlo samples");
        sub->add_option("--nodes", o.nodes, "quadrature nodes per dimension");
        sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };

    auto* presets = app.add_subcommand("presets", "list bundled material presets");
    auto* trace = app.add_subcommand("trace", "write one disorder-averaged trace as CSV");
    add_run_flags(trace);
    auto* sweep = app.add_subcommand("sweep", "run the (material, ratio, j0) grid and write results CSV");
    add_run_flags(sweep);
    sweep->add_flag("--emit-plot", o.emit_plot, "also write a gnuplot script next to the CSV");
    auto* fit = app.add_subcommand("fit", "fit the decay envelope of a trace CSV");
    std::string trace_path;
    std::string json_path;
    fit->add_option("trace", trace_path, "trace CSV written by 'trace'")->required();
    fit->add_option("--json", json_path, "also write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*presets) return cmd_presets();
        if (*trace) return cmd_trace(o);
        if (*sweep) return cmd_sweep(o);
        if (*fit) return cmd_fit(trace_path, json_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
