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
#include <random>

#include <doctest.h>
#include <Eigen/Dense>

#include "hqsim/dynamics.hpp"
#include "hqsim/units.hpp"

using namespace hqsim;

namespace {

// Independent construction of the three-spin Hamiltonian from Kronecker
// products of Pauli matrices.
Eigen::Matrix2cd pauli(char axis) {
    Eigen::Matrix2cd m;
    const std::complex<double> i(0.0, 1.0);
    switch (axis) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, -i, i, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

Eigen::MatrixXcd on_spin(char axis, int spin) {
    const Eigen::MatrixXcd id = Eigen::Matrix2cd::Identity();
    Eigen::MatrixXcd out = spin == 0 ? Eigen::MatrixXcd(pauli(axis)) : id;
    for (int s = 1; s < 3; ++s) out = kron(out, s == spin ? Eigen::MatrixXcd(pauli(axis)) : id);
    return out;
}

Eigen::MatrixXcd dot(int a, int b) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(8, 8);
    for (char ax : {'x', 'y', 'z'}) out += on_spin(ax, a) * on_spin(ax, b);
    return out;
}

Eigen::MatrixXcd oracle_hamiltonian(const QubitParams& p) {
    const double el = p.e_z - 0.5 * p.delta_e;
    const double er = p.e_z + 0.5 * p.delta_e;
    return 0.5 * el * (on_spin('z', 0) + on_spin('z', 1)) + 0.5 * er * on_spin('z', 2) + 0.25 * p.j_prime * dot(0, 1) +
           0.25 * p.j1 * dot(0, 2) + 0.25 * p.j2 * dot(1, 2);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

QubitParams reference_params(double j0) { return {0.0, 0.0, 0.5 * j0, 0.5 * j0, 1.5 * j0}; }

}  // namespace

TEST_CASE("subspace basis") {
    const SubspaceBasis b = build_subspace_basis();
    SUBCASE("orthonormal") {
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) CHECK(std::abs(b[m].dot(b[n]) - (m == n ? 1.0 : 0.0)) < 1e-14);
    }
    SUBCASE("amplitude of |down,down,up> in |1>") { CHECK(b.one(6) == doctest::Approx(-std::sqrt(2.0 / 3.0)).epsilon(1e-15)); }
    SUBCASE("total Sz is -1/2") {
        const Eigen::MatrixXcd sz = 0.5 * (on_spin('z', 0) + on_spin('z', 1) + on_spin('z', 2));
        for (int m = 0; m < 3; ++m) {
            const Eigen::VectorXcd v = b[m].cast<std::complex<double>>();
            CHECK(((sz * v) + 0.5 * v).norm() < 1e-14);
        }
    }
}

TEST_CASE("full Hamiltonian matches the Pauli-algebra oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e-6, 1e-6);
    for (int trial = 0; trial < 50; ++trial) {
        const QubitParams p{u(rng), u(rng), log_uniform(rng, 1e-9, 1e-5), log_uniform(rng, 1e-9, 1e-5),
                            log_uniform(rng, 1e-9, 1e-5)};
        const FullHamiltonian h = build_full_hamiltonian(p);
        const Eigen::MatrixXcd ref = oracle_hamiltonian(p);
        CHECK((h.cast<std::complex<double>>() - ref).norm() <= 1e-15 * ref.norm());
        CHECK((h - h.transpose()).norm() == 0.0);
    }
}

TEST_CASE("full Hamiltonian special cases") {
    SUBCASE("pure Zeeman is diagonal") {
        const double ez = 2e-5;
        const FullHamiltonian h = build_full_hamiltonian({ez, 0.0, 0.0, 0.0, 0.0});
        for (int s = 0; s < 8; ++s) {
            const int n_down = __builtin_popcount(static_cast<unsigned>(s));
            CHECK(h(s, s) == doctest::Approx(0.5 * ez * (3 - 2 * n_down)).epsilon(1e-15));
            for (int t = 0; t < 8; ++t)
                if (t != s) CHECK(h(s, t) == 0.0);
        }
    }
    SUBCASE("all down with equal couplings") {
        const double ez = 3e-6, j = 7e-7;
        const FullHamiltonian h = build_full_hamiltonian({ez, 0.0, j, j, j});
        CHECK(h(7, 7) == doctest::Approx(-1.5 * ez + 0.75 * j).epsilon(1e-14));
    }
}

TEST_CASE("projected Hamiltonian reproduces the closed-form coefficients") {
    const double j0 = 1e-6;
    const QubitParams p = reference_params(j0);
    const SubspaceHamiltonian h3 = subspace_hamiltonian(p);
    const ABCCoefficients abc = compute_abc(p);
    const double scale = h3.matrix.norm();
    // Literal projection of the Hamiltonian gives the negated 2x2 block.
    CHECK(std::abs(h3.matrix(0, 0) + abc.a) <= 1e-14 * scale);
    CHECK(std::abs(h3.matrix(1, 1) + abc.b) <= 1e-14 * scale);
    CHECK(std::abs(h3.matrix(0, 1) + abc.c) <= 1e-14 * scale);
    CHECK(std::abs(h3.matrix(0, 2)) < 1e-15 * scale);
    CHECK(std::abs(h3.matrix(1, 2)) < 1e-15 * scale);
    CHECK((h3.matrix - h3.matrix.transpose()).norm() == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const QubitParams q{log_uniform(rng, 1e-9, 1e-4), 0.0, log_uniform(rng, 1e-9, 1e-5),
                            log_uniform(rng, 1e-9, 1e-5), log_uniform(rng, 1e-9, 1e-5)};
        const Eigen::Matrix3d m = subspace_hamiltonian(q).matrix;
        const ABCCoefficients c = compute_abc(q);
        const double s = m.norm();
        CHECK(std::abs(m(0, 0) + c.a) <= 1e-14 * s);
        CHECK(std::abs(m(1, 1) + c.b) <= 1e-14 * s);
        CHECK(std::abs(m(0, 1) + c.c) <= 1e-14 * s);
        CHECK(std::abs(m(0, 2)) <= 1e-15 * s);
        CHECK(std::abs(m(1, 2)) <= 1e-15 * s);
    }
}

TEST_CASE("compute_abc") {
    const double j0 = 2e-6;
    SUBCASE("reference couplings") {
        const ABCCoefficients abc = compute_abc(reference_params(j0));
        CHECK(abc.a - abc.b == doctest::Approx(-0.5 * j0).epsilon(1e-14));
        CHECK(abc.c == doctest::Approx(-std::sqrt(3.0) / 4.0 * j0).epsilon(1e-14));
        CHECK(abc.beta == doctest::Approx(j0 / (2.0 * kHbar)).epsilon(1e-14));
    }
    SUBCASE("equal inter-dot couplings") { CHECK(compute_abc({0.0, 0.0, 1e-7, 3e-7, 3e-7}).c == 0.0); }
    SUBCASE("couplings off") {
        const ABCCoefficients abc = compute_abc({4e-6, 0.0, 0.0, 0.0, 0.0});
        CHECK(abc.a == doctest::Approx(2e-6));
        CHECK(abc.b == doctest::Approx(2e-6));
        CHECK(abc.beta == 0.0);
    }
}

TEST_CASE("analytic return probability") {
    const double j0 = 1e-6;
    CHECK(analytic_return_probability(reference_params(j0), 0.0) == 1.0);
    CHECK(analytic_return_probability(reference_params(j0), kPi * kHbar / j0) == doctest::Approx(0.25).epsilon(1e-13));
    for (double t : {0.3, 17.0, 1234.5}) CHECK(analytic_return_probability({0.0, 0.0, 1e-7, 2e-7, 2e-7}, t) == 1.0);
    CHECK(analytic_return_probability({0.0, 0.0, 0.0, 0.0, 0.0}, 5.0) == 1.0);
    CHECK_THROWS_AS(analytic_return_probability({0.0, 1e-9, 1e-7, 1e-7, 2e-7}, 1.0), std::invalid_argument);
}

TEST_CASE("numeric evolution agrees with the closed form") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const QubitParams p{0.0, 0.0, log_uniform(rng, 1e-9, 1e-5), log_uniform(rng, 1e-9, 1e-5),
                            log_uniform(rng, 1e-9, 1e-5)};
        const double beta = compute_abc(p).beta;
        std::uniform_real_distribution<double> ut(0.0, 50.0 * kPi / beta);
        std::vector<double> times(10);
        for (double& t : times) t = ut(rng);
        const NumericTrace tr = numeric_return_probability(p, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            worst = std::max(worst, std::abs(tr.p0[k] - analytic_return_probability(p, times[k])));
            CHECK(tr.leakage[k] < 1e-12);
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("unitarity, bounds and e_z gauge invariance") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> de(0.0, 1e-7);
    for (int trial = 0; trial < 300; ++trial) {
        QubitParams p{0.0, de(rng), log_uniform(rng, 1e-9, 1e-5), log_uniform(rng, 1e-9, 1e-5),
                      log_uniform(rng, 1e-9, 1e-5)};
        std::vector<double> times{0.0, 1.0, 37.5, 1e3, 4.2e4};
        const NumericTrace a = numeric_return_probability(p, times);
        p.e_z = 1e-4;
        const NumericTrace b = numeric_return_probability(p, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK(std::abs(a.p0[k] + a.p1[k] + a.leakage[k] - 1.0) < 1e-12);
            CHECK(a.p0[k] >= -1e-12);
            CHECK(a.p0[k] <= 1.0 + 1e-12);
            CHECK(std::abs(a.p0[k] - b.p0[k]) < 1e-12);
        }
    }
}

TEST_CASE("spectrum form matches the propagator") {
    const QubitParams p{0.0, 2e-8, 3e-8, 5e-8, 1.1e-7};
    const SubspacePropagator prop(p);
    const ReturnSpectrum s = prop.spectrum();
    for (double t : {0.0, 3.0, 91.0, 2500.0}) CHECK(s.evaluate(t) == doctest::Approx(prop.return_probability(t)).epsilon(1e-13));
    CHECK(s.evaluate(0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(QubitParams({0.0, 0.0, -1e-9, 0.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(QubitParams({0.0, 0.0, 0.0, -1e-9, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(QubitParams({NAN, 0.0, 0.0, 0.0, 0.0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(QubitParams({0.0, -1e-9, 0.0, 0.0, 0.0}).validate());
}
