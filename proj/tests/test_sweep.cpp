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

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "hqsim/csv.hpp"
#include "hqsim/sweep.hpp"
#include "hqsim/units.hpp"

using namespace hqsim;

namespace {

SweepSpec small_spec() {
    SweepSpec spec;
    spec.j0_grid = {3e-7, 3e-6};
    spec.materials = {*find_preset("28Si"), *find_preset("GaAs")};
    spec.sigma_ratios = {0.03};
    spec.method = MonteCarlo{2000, 0};
    spec.master_seed = 17;
    return spec;
}

}  // namespace

TEST_CASE("material presets") {
    const auto& p = material_presets();
    REQUIRE(p.size() == 3);
    CHECK(p[0] == MaterialPreset{"28Si", 0.0});
    CHECK(p[1] == MaterialPreset{"Si", 3e-9});
    CHECK(p[2] == MaterialPreset{"GaAs", 1e-7});
    CHECK_FALSE(find_preset("InAs").has_value());
}

TEST_CASE("default sweep grid") {
    const SweepSpec s = default_sweep_spec();
    REQUIRE(s.j0_grid.size() == 30);
    CHECK(s.j0_grid.front() == 5e-9);
    CHECK(s.j0_grid.back() == 1e-5);
    for (std::size_t i = 1; i < 30; ++i) {
        CHECK(s.j0_grid[i] / s.j0_grid[i - 1] == doctest::Approx(std::pow(2000.0, 1.0 / 29.0)).epsilon(1e-12));
    }
    CHECK(s.sigma_ratios == std::vector<double>{0.003, 0.03});
    CHECK(std::get<MonteCarlo>(s.method).n_samples == 20000);
}

TEST_CASE("derive_point_params") {
    const PointParams pp = derive_point_params(1e-6, 0.003, *find_preset("Si"));
    CHECK(pp.noise.j01 == doctest::Approx(5e-7).epsilon(1e-15));
    CHECK(pp.noise.j02 == doctest::Approx(1.5e-6).epsilon(1e-15));
    CHECK(pp.noise.sigma_j1 == doctest::Approx(1.5e-9).epsilon(1e-15));
    CHECK(pp.noise.sigma_j2 == doctest::Approx(4.5e-9).epsilon(1e-15));
    CHECK(pp.noise.sigma_e == 3e-9);
    CHECK(pp.base.j_prime == doctest::Approx(5e-7).epsilon(1e-15));
    CHECK(pp.base.e_z == 0.0);
    CHECK(pp.base.delta_e == 0.0);

    const PointParams quiet = derive_point_params(2e-8, 0.0, *find_preset("GaAs"));
    CHECK(quiet.noise.sigma_j1 == 0.0);
    CHECK(quiet.noise.sigma_j2 == 0.0);

    for (double j0 : {5e-9, 7.3e-8, 1e-5}) {
        const PointParams q = derive_point_params(j0, 0.03, *find_preset("Si"));
        CHECK(q.noise.sigma_j1 / q.noise.sigma_j2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(q.noise.j01 / q.noise.j02 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    CHECK_THROWS(derive_point_params(0.0, 0.03, *find_preset("Si")));
}

TEST_CASE("oscillation period") {
    const PointParams pp = derive_point_params(1e-6, 0.003, *find_preset("Si"));
    const double t0 = oscillation_period(pp.base, pp.noise);
    CHECK(t0 == doctest::Approx(4.0 * kPi * kHbar / 1e-6).epsilon(1e-12));
    CHECK(t0 == doctest::Approx(8.27).epsilon(1e-3));
}

TEST_CASE("dephasing estimate") {
    const PointParams none = derive_point_params(1e-6, 0.0, *find_preset("28Si"));
    CHECK(std::isinf(dephasing_estimate(none.base, none.noise)));
    const PointParams a = derive_point_params(1e-6, 0.003, *find_preset("28Si"));
    const PointParams b = derive_point_params(1e-6, 0.03, *find_preset("28Si"));
    CHECK(dephasing_estimate(a.base, a.noise) == doctest::Approx(10.0 * dephasing_estimate(b.base, b.noise)));
}

TEST_CASE("time windows honour the sampling density") {
    for (const MaterialPreset& m : material_presets()) {
        for (double ratio : {0.003, 0.03}) {
            for (double j0 : {5e-9, 1e-7, 1e-5}) {
                const PointParams pp = derive_point_params(j0, ratio, m);
                const TimeWindow w = choose_time_window(pp.base, pp.noise, WindowPolicy{}, 3);
                INFO(m.name << " " << ratio << " " << j0);
                CHECK(w.period == doctest::Approx(oscillation_period(pp.base, pp.noise)));
                CHECK(static_cast<double>(w.n_points) >= 40.0 * w.t_max / w.period);
                CHECK(w.t_max <= 2e5 * w.period * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("window doubling stops at the cap and flags it") {
    const PointParams pp = derive_point_params(1e-7, 0.003, *find_preset("Si"));
    WindowPolicy policy;
    policy.start_periods = 1.0;
    policy.start_lifetimes = 1e9;
    policy.cap_periods = 4.0;
    const TimeWindow w = choose_time_window(pp.base, pp.noise, policy, 3);
    CHECK(w.capped);
    CHECK(w.doublings == 2);
    CHECK(w.t_max == doctest::Approx(4.0 * w.period));
    const SweepRow row = evaluate_point(1e-7, 0.003, *find_preset("Si"), MonteCarlo{500, 1}, w);
    CHECK(row.diagnostics.window_too_short);
}

TEST_CASE("window doubling from a short start") {
    const PointParams pp = derive_point_params(1e-6, 0.03, *find_preset("Si"));
    WindowPolicy policy;
    policy.start_periods = 2.0;
    policy.start_lifetimes = 1e9;
    const TimeWindow w = choose_time_window(pp.base, pp.noise, policy, 3);
    CHECK_FALSE(w.capped);
    CHECK(w.doublings > 0);
    CHECK(w.t_max == doctest::Approx(std::pow(2.0, w.doublings + 1) * w.period));
}

TEST_CASE("single-point sweep") {
    SweepSpec spec = small_spec();
    spec.j0_grid = {1e-6};
    spec.materials = {*find_preset("Si")};
    const SweepResult r = run_sweep(spec);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].material == "Si");
    CHECK(r.rows[0].seed == point_seed(17, 0, 0, 0));
    CHECK(std::isfinite(r.rows[0].t2_star));
}

TEST_CASE("sweep rows are ordered, consistent and deterministic") {
    const SweepSpec spec = small_spec();
    const SweepResult a = run_sweep(spec, 1);
    const SweepResult b = run_sweep(spec, 1);
    const SweepResult c = run_sweep(spec, 3);
    REQUIRE(a.rows.size() == 4);
    CHECK(sweep_csv(a) == sweep_csv(b));
    CHECK(sweep_csv(a) == sweep_csv(c));
    std::size_t i = 0;
    for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t j = 0; j < 2; ++j, ++i) {
            const SweepRow& row = a.rows[i];
            CHECK(row.material_index == m);
            CHECK(row.j0_index == j);
            CHECK(row.j0 == spec.j0_grid[j]);
            CHECK(row.seed == point_seed(spec.master_seed, m, 0, j));
            CHECK(a.find(spec.materials[m].name, 0, j) == &row);
            const double q = std::exp(-kPlanck / (row.j0 * row.t2_star));
            CHECK(std::abs(row.q - q) <= 1e-12 * q);
        }
    }
}

TEST_CASE("point seeds are stable under grid growth") {
    SweepSpec spec = small_spec();
    spec.j0_grid = {3e-7};
    const SweepResult one = run_sweep(spec);
    spec.j0_grid = {3e-7, 3e-6};
    const SweepResult two = run_sweep(spec);
    CHECK(one.rows[0].t2_star == two.rows[0].t2_star);
    CHECK(point_seed(1, 0, 0, 0) != point_seed(1, 0, 0, 1));
    CHECK(point_seed(1, 1, 0, 0) != point_seed(1, 0, 1, 0));
}

TEST_CASE("quadrature sweep carries no seed") {
    SweepSpec spec = small_spec();
    spec.j0_grid = {3e-6};
    spec.materials = {*find_preset("28Si")};
    spec.method = Quadrature{9};
    const SweepResult r = run_sweep(spec);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].seed == 0);
    CHECK(std::isfinite(r.rows[0].t2_star));
}

TEST_CASE("invalid sweep specs") {
    SweepSpec spec = small_spec();
    spec.j0_grid = {};
    CHECK_THROWS(run_sweep(spec));
    spec = small_spec();
    spec.j0_grid = {-1e-6};
    CHECK_THROWS(run_sweep(spec));
    spec = small_spec();
    spec.sigma_ratios = {-0.1};
    CHECK_THROWS(run_sweep(spec));
    spec = small_spec();
    spec.materials = {{"bad", -1.0}};
    CHECK_THROWS(run_sweep(spec));
    CHECK_THROWS(log_spaced(0.0, 1.0, 3));
}
