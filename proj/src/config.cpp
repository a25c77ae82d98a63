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

#include "hqsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace hqsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw InputError("config key '" + key + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) fail(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

double nonnegative(const json& v, const std::string& key) {
    const double x = number(v, key);
    if (x < 0.0) fail(key, "must be >= 0");
    return x;
}

double positive(const json& v, const std::string& key) {
    const double x = number(v, key);
    if (!(x > 0.0)) fail(key, "must be > 0");
    return x;
}

std::size_t count(const json& v, const std::string& key, std::size_t minimum) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) fail(key, "must be >= " + std::to_string(minimum));
    const auto n = v.get<std::uint64_t>();
    if (n < minimum) fail(key, "must be >= " + std::to_string(minimum));
    return static_cast<std::size_t>(n);
}

MaterialPreset parse_material(const json& v, const std::string& key) {
    if (v.is_string()) {
        const auto preset = find_preset(v.get<std::string>());
        if (!preset) fail(key, "unknown material preset '" + v.get<std::string>() + "'");
        return *preset;
    }
    reject_unknown(v, key, {"name", "sigma_e"});
    if (!v.contains("name") || !v["name"].is_string()) fail(key + ".name", "expected a string");
    if (!v.contains("sigma_e")) fail(key + ".sigma_e", "missing");
    return {v["name"].get<std::string>(), nonnegative(v["sigma_e"], key + ".sigma_e")};
}

AveragingMethod parse_method(const json& v) {
    reject_unknown(v, "method", {"kind", "n_samples", "seed", "nodes_per_dim"});
    const std::string kind = v.value("kind", "mc");
    if (kind == "mc") {
        if (v.contains("nodes_per_dim")) fail("method.nodes_per_dim", "not valid for kind 'mc'");
        MonteCarlo mc;
        if (v.contains("n_samples")) mc.n_samples = count(v["n_samples"], "method.n_samples", 1);
        if (v.contains("seed")) fail("method.seed", "use master_seed");
        return mc;
    }
    if (kind == "quad") {
        if (v.contains("n_samples")) fail("method.n_samples", "not valid for kind 'quad'");
        if (v.contains("seed")) fail("method.seed", "not valid for kind 'quad'");
        Quadrature q;
        if (v.contains("nodes_per_dim")) q.nodes_per_dim = count(v["nodes_per_dim"], "method.nodes_per_dim", 1);
        return q;
    }
    fail("method.kind", "expected 'mc' or 'quad'");
}

void parse_window(const json& v, RunConfig& cfg) {
    reject_unknown(v, "window",
                   {"t_max_ns", "n_points", "start_periods", "points_per_period", "cap_periods", "start_lifetimes",
                    "points_per_lifetime", "settle_fraction", "pilot_samples"});
    WindowPolicy& w = cfg.sweep.window;
    if (v.contains("start_periods")) w.start_periods = positive(v["start_periods"], "window.start_periods");
    if (v.contains("points_per_period")) {
        w.points_per_period = positive(v["points_per_period"], "window.points_per_period");
    }
    if (v.contains("cap_periods")) w.cap_periods = positive(v["cap_periods"], "window.cap_periods");
    if (v.contains("start_lifetimes")) w.start_lifetimes = positive(v["start_lifetimes"], "window.start_lifetimes");
    if (v.contains("points_per_lifetime")) {
        w.points_per_lifetime = positive(v["points_per_lifetime"], "window.points_per_lifetime");
    }
    if (v.contains("settle_fraction")) {
        w.settle_fraction = positive(v["settle_fraction"], "window.settle_fraction");
        if (w.settle_fraction >= 1.0) fail("window.settle_fraction", "must be < 1");
    }
    if (v.contains("pilot_samples")) w.pilot_samples = count(v["pilot_samples"], "window.pilot_samples", 1);
    const bool has_t = v.contains("t_max_ns");
    const bool has_n = v.contains("n_points");
    if (has_t != has_n) fail(has_t ? "window.n_points" : "window.t_max_ns", "t_max_ns and n_points go together");
    if (has_t) {
        cfg.fixed_window = FixedWindow{positive(v["t_max_ns"], "window.t_max_ns"),
                                       count(v["n_points"], "window.n_points", 3)};
    }
}

void parse_output(const json& v, OutputOptions& out) {
    reject_unknown(v, "output", {"path", "emit_plot", "verbosity"});
    if (v.contains("path")) {
        if (!v["path"].is_string()) fail("output.path", "expected a string");
        out.path = v["path"].get<std::string>();
    }
    if (v.contains("emit_plot")) {
        if (!v["emit_plot"].is_boolean()) fail("output.emit_plot", "expected a boolean");
        out.emit_plot = v["emit_plot"].get<bool>();
    }
    if (v.contains("verbosity")) out.verbosity = static_cast<int>(count(v["verbosity"], "output.verbosity", 0));
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "", {"j0_grid", "materials", "sigma_ratios", "method", "master_seed", "window", "output"});

    RunConfig cfg;
    if (root.contains("j0_grid")) {
        const json& g = root["j0_grid"];
        if (!g.is_array() || g.empty()) fail("j0_grid", "expected a non-empty array of energies (eV)");
        cfg.sweep.j0_grid.clear();
        for (std::size_t i = 0; i < g.size(); ++i) {
            cfg.sweep.j0_grid.push_back(positive(g[i], "j0_grid[" + std::to_string(i) + "]"));
        }
    }
    if (root.contains("materials")) {
        const json& m = root["materials"];
        if (!m.is_array() || m.empty()) fail("materials", "expected a non-empty array");
        cfg.sweep.materials.clear();
        for (std::size_t i = 0; i < m.size(); ++i) {
            cfg.sweep.materials.push_back(parse_material(m[i], "materials[" + std::to_string(i) + "]"));
        }
    }
    if (root.contains("sigma_ratios")) {
        const json& r = root["sigma_ratios"];
        if (!r.is_array() || r.empty()) fail("sigma_ratios", "expected a non-empty array");
        cfg.sweep.sigma_ratios.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            cfg.sweep.sigma_ratios.push_back(nonnegative(r[i], "sigma_ratios[" + std::to_string(i) + "]"));
        }
    }
    if (root.contains("method")) cfg.sweep.method = parse_method(root["method"]);
    if (root.contains("master_seed")) {
        const json& s = root["master_seed"];
        if (!s.is_number_unsigned()) fail("master_seed", "expected a non-negative 64-bit integer");
        cfg.sweep.master_seed = s.get<std::uint64_t>();
    }
    if (root.contains("window")) parse_window(root["window"], cfg);
    if (root.contains("output")) parse_output(root["output"], cfg.output);
    return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
    json root;
    root["j0_grid"] = cfg.sweep.j0_grid;
    json materials = json::array();
    for (const auto& m : cfg.sweep.materials) {
        const auto preset = find_preset(m.name);
        if (preset && *preset == m) {
            materials.push_back(m.name);
        } else {
            materials.push_back({{"name", m.name}, {"sigma_e", m.sigma_e}});
        }
    }
    root["materials"] = materials;
    root["sigma_ratios"] = cfg.sweep.sigma_ratios;
    if (const auto* mc = std::get_if<MonteCarlo>(&cfg.sweep.method)) {
        root["method"] = {{"kind", "mc"}, {"n_samples", mc->n_samples}};
    } else {
        root["method"] = {{"kind", "quad"}, {"nodes_per_dim", std::get<Quadrature>(cfg.sweep.method).nodes_per_dim}};
    }
    root["master_seed"] = cfg.sweep.master_seed;
    const WindowPolicy& w = cfg.sweep.window;
    json window = {{"start_periods", w.start_periods},         {"points_per_period", w.points_per_period},
                   {"cap_periods", w.cap_periods},             {"start_lifetimes", w.start_lifetimes},
                   {"points_per_lifetime", w.points_per_lifetime}, {"settle_fraction", w.settle_fraction},
                   {"pilot_samples", w.pilot_samples}};
    if (cfg.fixed_window) {
        window["t_max_ns"] = cfg.fixed_window->t_max_ns;
        window["n_points"] = cfg.fixed_window->n_points;
    }
    root["window"] = window;
    root["output"] = {{"path", cfg.output.path}, {"emit_plot", cfg.output.emit_plot},
                      {"verbosity", cfg.output.verbosity}};
    return root.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

bool same_config(const RunConfig& a, const RunConfig& b) {
    auto same_method = [](const AveragingMethod& x, const AveragingMethod& y) {
        if (x.index() != y.index()) return false;
        if (const auto* mx = std::get_if<MonteCarlo>(&x)) {
            const auto& my = std::get<MonteCarlo>(y);
            return mx->n_samples == my.n_samples && mx->seed == my.seed;
        }
        return std::get<Quadrature>(x).nodes_per_dim == std::get<Quadrature>(y).nodes_per_dim;
    };
    return a.sweep.j0_grid == b.sweep.j0_grid && a.sweep.materials == b.sweep.materials &&
           a.sweep.sigma_ratios == b.sweep.sigma_ratios && same_method(a.sweep.method, b.sweep.method) &&
           a.sweep.master_seed == b.sweep.master_seed && a.sweep.window == b.sweep.window &&
           a.fixed_window == b.fixed_window && a.output == b.output;
}

}  // namespace hqsim
