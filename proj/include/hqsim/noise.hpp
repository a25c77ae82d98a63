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

#ifndef HQSIM_NOISE_HPP
#define HQSIM_NOISE_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "hqsim/dynamics.hpp"

namespace hqsim {

/// Quasi-static disorder. delta_e ~ Normal(0, sqrt(2) sigma_e); j1, j2 are
/// normals with means j01, j02 truncated to [0, inf). All in eV.
struct NoiseSpec {
    double sigma_e = 0.0;
    double j01 = 0.0;
    double j02 = 0.0;
    double sigma_j1 = 0.0;
    double sigma_j2 = 0.0;

    void validate() const;
};

struct MonteCarlo {
    std::size_t n_samples = 20000;
    std::uint64_t seed = 0;
};

struct Quadrature {
    std::size_t nodes_per_dim = 15;
};

using AveragingMethod = std::variant<MonteCarlo, Quadrature>;

void validate_method(const AveragingMethod& method);

struct AveragedTrace {
    std::vector<double> times;          ///< ns
    std::vector<double> probabilities;  ///< disorder-averaged P|0>(t)
    std::vector<double> std_error;      ///< per point; zeros for quadrature
    AveragingMethod method;
    std::size_t realizations = 0;       ///< samples or tensor nodes actually used
};

/// Density of delta_e, (1/(2 sigma_e sqrt(pi))) exp(-delta_e^2 / (4 sigma_e^2)).
double pdf_delta_e(double delta_e, double sigma_e);

/// Normal(mean, sigma) restricted to j >= 0 and renormalized; 0 for j < 0.
double pdf_j(double j, double mean, double sigma);

/// Stable 64-bit mixing of two words (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

class NoiseRng {
public:
    explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    /// Uniform on the open interval (0, 1).
    double uniform();

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draw from Normal(mean, sigma) conditioned on x >= 0. Rejection sampling
/// unless the acceptance probability is below 1e-3, then inverse CDF.
/// sigma == 0 returns mean.
double sample_truncated_normal(double mean, double sigma, NoiseRng& rng);

struct NoiseSample {
    double delta_e = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
};

NoiseSample sample_noise(const NoiseSpec& spec, NoiseRng& rng);

/// Grid t_k = k * t_max / (n - 1), k = 0..n-1.
std::vector<double> uniform_time_grid(double t_max, std::size_t n);

/// Disorder average of P|0>(t). j_prime and e_z come from base; delta_e, j1 and
/// j2 are replaced per realization. Dimensions with zero width collapse to one
/// node at the mean. Results do not depend on `threads`.
AveragedTrace average_return_probability(const QubitParams& base, const NoiseSpec& spec,
                                         std::span<const double> times, const AveragingMethod& method,
                                         std::size_t threads = 1);

}  // namespace hqsim

#endif  // HQSIM_NOISE_HPP
