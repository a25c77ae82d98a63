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

#ifndef HQSIM_QUADRATURE_HPP
#define HQSIM_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace hqsim {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
/// Weights sum to sqrt(pi).
GaussRule gauss_hermite(std::size_t n);

/// Gauss-Legendre rule on [-1, 1]. Weights sum to 2.
GaussRule gauss_legendre(std::size_t n);

}  // namespace hqsim

#endif  // HQSIM_QUADRATURE_HPP
