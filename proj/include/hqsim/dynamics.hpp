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

#ifndef HQSIM_DYNAMICS_HPP
#define HQSIM_DYNAMICS_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hqsim {

/// One quasi-static realization of the hybrid-qubit Hamiltonian parameters.
/// All energies in eV. Spins 1 and 2 sit in the left dot, spin 3 in the right.
struct QubitParams {
    double e_z = 0.0;      ///< uniform Zeeman splitting
    double delta_e = 0.0;  ///< inter-dot Zeeman difference (E_R - E_L)
    double j_prime = 0.0;  ///< intra-dot exchange, pair (1,2)
    double j1 = 0.0;       ///< exchange, pair (1,3)
    double j2 = 0.0;       ///< exchange, pair (2,3)

    /// Throws std::invalid_argument on negative couplings or non-finite fields.
    void validate() const;
};

// Product basis of three spin-1/2 particles, spin 1 most significant,
// bit value 0 = up, 1 = down. |up,down,down> is index 3, |down,down,up> is 6.
using StateVector = Eigen::Matrix<double, 8, 1>;
using FullHamiltonian = Eigen::Matrix<double, 8, 8>;

inline constexpr int kProductDim = 8;
inline constexpr int kSubspaceDim = 3;

/// The S_z = -1/2 subspace: logical |0>, |1> and the quadruplet leakage |Q>.
/// Amplitudes are real in the product basis.
struct SubspaceBasis {
    StateVector zero;
    StateVector one;
    StateVector quad;

    const StateVector& operator[](int i) const;
};

/// Projected Hamiltonian, basis order (|0>, |1>, |Q>), eV.
struct SubspaceHamiltonian {
    Eigen::Matrix3d matrix;
};

struct ABCCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double beta = 0.0;  ///< rad/ns
};

SubspaceBasis build_subspace_basis();

/// H = 1/2 E_L (s1z + s2z) + 1/2 E_R s3z + 1/4 j' s1.s2 + 1/4 j1 s1.s3 + 1/4 j2 s2.s3,
/// with E_L = e_z - delta_e/2 and E_R = e_z + delta_e/2.
FullHamiltonian build_full_hamiltonian(const QubitParams& params);

SubspaceHamiltonian project_hamiltonian(const FullHamiltonian& h8, const SubspaceBasis& basis);

/// Convenience: build_full_hamiltonian followed by project_hamiltonian.
SubspaceHamiltonian subspace_hamiltonian(const QubitParams& params);

/// Closed-form coefficients of the delta_e = 0 sector. The projected block
/// equals -[[a, c], [c, b]]; the overall sign does not enter P|0>(t).
ABCCoefficients compute_abc(const QubitParams& params);

/// Closed-form P|0>(t) for delta_e = 0. Throws std::invalid_argument otherwise.
double analytic_return_probability(const QubitParams& params, double t_ns);

struct Populations {
    double p0 = 0.0;
    double p1 = 0.0;
    double leakage = 0.0;
};

/// Spectral form of the return probability,
///   P|0>(t) = constant + sum_k amplitude[k] * cos(omega[k] * t),
/// with the sum running over the three eigenvalue pairs.
struct ReturnSpectrum {
    double constant = 0.0;
    std::array<double, 3> amplitude{};
    std::array<double, 3> omega{};  ///< rad/ns

    double evaluate(double t_ns) const;
};

/// Exact diagonalization of the subspace Hamiltonian, done once at
/// construction. The uniform e_z term is dropped: on the S_z = -1/2 subspace it
/// is -e_z/2 times the identity.
class SubspacePropagator {
public:
    explicit SubspacePropagator(const QubitParams& params);

    Populations populations(double t_ns) const;
    double return_probability(double t_ns) const;
    ReturnSpectrum spectrum() const;

    const Eigen::Vector3d& energies() const { return energies_; }
    const Eigen::Matrix3d& eigenvectors() const { return vectors_; }

private:
    Eigen::Vector3d energies_;  // eV, ascending
    Eigen::Matrix3d vectors_;   // columns are eigenvectors in (|0>, |1>, |Q>)
};

struct NumericTrace {
    std::vector<double> p0;
    std::vector<double> p1;
    std::vector<double> leakage;
};

/// P|0>(t), P|1>(t) and leakage |<Q|U(t)|0>|^2 at the given times.
NumericTrace numeric_return_probability(const QubitParams& params, std::span<const double> times);

}  // namespace hqsim

#endif  // HQSIM_DYNAMICS_HPP
