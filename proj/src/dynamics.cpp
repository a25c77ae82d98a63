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

#include "hqsim/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hqsim/units.hpp"

namespace hqsim {

namespace {

constexpr int kSpinCount = 3;

// Bit of spin i (0-based) inside a product-basis index.
constexpr int spin_bit(int spin) { return kSpinCount - 1 - spin; }

// +1 for up, -1 for down.
int sigma_z(int index, int spin) { return ((index >> spin_bit(spin)) & 1) ? -1 : 1; }

int product_index(bool up1, bool up2, bool up3) {
    return (up1 ? 0 : 4) | (up2 ? 0 : 2) | (up3 ? 0 : 1);
}

}  // namespace

void QubitParams::validate() const {
    for (double v : {e_z, delta_e, j_prime, j1, j2}) {
        if (!std::isfinite(v)) throw std::invalid_argument("QubitParams: non-finite field");
    }
    if (j_prime < 0.0) throw std::invalid_argument("QubitParams: j_prime must be >= 0");
    if (j1 < 0.0) throw std::invalid_argument("QubitParams: j1 must be >= 0");
    if (j2 < 0.0) throw std::invalid_argument("QubitParams: j2 must be >= 0");
}

const StateVector& SubspaceBasis::operator[](int i) const {
    switch (i) {
        case 0: return zero;
        case 1: return one;
        case 2: return quad;
        default: throw std::out_of_range("SubspaceBasis index");
    }
}

SubspaceBasis build_subspace_basis() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    const double inv_sqrt6 = 1.0 / std::sqrt(6.0);
    const double sqrt_two_thirds = std::sqrt(2.0 / 3.0);

    const int udd = product_index(true, false, false);
    const int dud = product_index(false, true, false);
    const int ddu = product_index(false, false, true);

    SubspaceBasis basis;
    basis.zero.setZero();
    basis.one.setZero();
    basis.quad.setZero();

    // |S>|down>
    basis.zero(udd) = inv_sqrt2;
    basis.zero(dud) = -inv_sqrt2;

    // sqrt(1/3)|T0>|down> - sqrt(2/3)|T->|up>
    basis.one(udd) = inv_sqrt6;
    basis.one(dud) = inv_sqrt6;
    basis.one(ddu) = -sqrt_two_thirds;

    basis.quad(udd) = inv_sqrt3;
    basis.quad(dud) = inv_sqrt3;
    basis.quad(ddu) = inv_sqrt3;
    return basis;
}

FullHamiltonian build_full_hamiltonian(const QubitParams& params) {
    const double e_left = params.e_z - 0.5 * params.delta_e;
    const double e_right = params.e_z + 0.5 * params.delta_e;

    struct Pair {
        int a;
        int b;
        double j;
    };
    const std::array<Pair, 3> pairs{{{0, 1, params.j_prime}, {0, 2, params.j1}, {1, 2, params.j2}}};

    FullHamiltonian h = FullHamiltonian::Zero();
    for (int s = 0; s < kProductDim; ++s) {
        double diag = 0.5 * e_left * (sigma_z(s, 0) + sigma_z(s, 1)) + 0.5 * e_right * sigma_z(s, 2);
        for (const auto& p : pairs) {
            const int zz = sigma_z(s, p.a) * sigma_z(s, p.b);
            diag += 0.25 * p.j * zz;
            if (zz < 0) {
                // sigma_a . sigma_b = zz + 2 (s+ s- + s- s+); flip-flop swaps the pair.
                const int flipped = s ^ (1 << spin_bit(p.a)) ^ (1 << spin_bit(p.b));
                h(flipped, s) += 0.5 * p.j;
            }
        }
        h(s, s) = diag;
    }
    return h;
}

SubspaceHamiltonian project_hamiltonian(const FullHamiltonian& h8, const SubspaceBasis& basis) {
    Eigen::Matrix<double, 8, 3> v;
    v.col(0) = basis.zero;
    v.col(1) = basis.one;
    v.col(2) = basis.quad;
    SubspaceHamiltonian out;
    out.matrix = v.transpose() * h8 * v;
    // Hermitian by construction up to rounding; symmetrize so downstream
    // eigensolvers see an exactly symmetric matrix.
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    return out;
}

SubspaceHamiltonian subspace_hamiltonian(const QubitParams& params) {
    static const SubspaceBasis basis = build_subspace_basis();
    return project_hamiltonian(build_full_hamiltonian(params), basis);
}

ABCCoefficients compute_abc(const QubitParams& params) {
    ABCCoefficients out;
    out.a = 0.5 * params.e_z + 0.75 * params.j_prime;
    out.b = 0.5 * params.e_z - 0.25 * params.j_prime + 0.5 * (params.j1 + params.j2);
    out.c = std::sqrt(3.0) / 4.0 * (params.j1 - params.j2);
    // a - b without the e_z cancellation.
    const double a_minus_b = params.j_prime - 0.5 * (params.j1 + params.j2);
    out.beta = 0.5 * std::sqrt(a_minus_b * a_minus_b + 4.0 * out.c * out.c) / kHbar;
    return out;
}

double analytic_return_probability(const QubitParams& params, double t_ns) {
    if (params.delta_e != 0.0) {
        throw std::invalid_argument("analytic_return_probability: delta_e must be 0; use the numeric path");
    }
    const ABCCoefficients abc = compute_abc(params);
    const double a_minus_b = params.j_prime - 0.5 * (params.j1 + params.j2);
    const double denom = a_minus_b * a_minus_b + 4.0 * abc.c * abc.c;
    if (denom == 0.0) return 1.0;
    const double s = std::sin(abc.beta * t_ns);
    return 1.0 - 4.0 * abc.c * abc.c / denom * s * s;
}

double ReturnSpectrum::evaluate(double t_ns) const {
    double p = constant;
    for (int k = 0; k < 3; ++k) p += amplitude[k] * std::cos(omega[k] * t_ns);
    return p;
}

SubspacePropagator::SubspacePropagator(const QubitParams& params) {
    params.validate();
    QubitParams shifted = params;
    shifted.e_z = 0.0;
    const SubspaceHamiltonian h3 = subspace_hamiltonian(shifted);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h3.matrix);
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

Populations SubspacePropagator::populations(double t_ns) const {
    std::array<std::complex<double>, 3> amp{};
    for (int k = 0; k < kSubspaceDim; ++k) {
        const double phase = -(energies_(k) - energies_(0)) * t_ns / kHbar;
        const std::complex<double> rot(std::cos(phase), std::sin(phase));
        const double overlap0 = vectors_(0, k);
        for (int m = 0; m < kSubspaceDim; ++m) amp[m] += vectors_(m, k) * overlap0 * rot;
    }
    return {std::norm(amp[0]), std::norm(amp[1]), std::norm(amp[2])};
}

double SubspacePropagator::return_probability(double t_ns) const { return populations(t_ns).p0; }

ReturnSpectrum SubspacePropagator::spectrum() const {
    ReturnSpectrum s;
    std::array<double, 3> w{};
    for (int k = 0; k < kSubspaceDim; ++k) w[k] = vectors_(0, k) * vectors_(0, k);
    s.constant = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (int p = 0; p < 3; ++p) {
        const auto [k, l] = pairs[p];
        s.amplitude[p] = 2.0 * w[k] * w[l];
        s.omega[p] = (energies_(l) - energies_(k)) / kHbar;
    }
    return s;
}

NumericTrace numeric_return_probability(const QubitParams& params, std::span<const double> times) {
    const SubspacePropagator prop(params);
    NumericTrace out;
    out.p0.reserve(times.size());
    out.p1.reserve(times.size());
    out.leakage.reserve(times.size());
    for (double t : times) {
        const Populations pop = prop.populations(t);
        out.p0.push_back(pop.p0);
        out.p1.push_back(pop.p1);
        out.leakage.push_back(pop.leakage);
    }
    return out;
}

}  // namespace hqsim
