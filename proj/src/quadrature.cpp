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

#include "hqsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hqsim/units.hpp"

namespace hqsim {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix of the
// three-term recurrence, weights are mu0 times the squared first components.
GaussRule golub_welsch(std::size_t n, double mu0, const std::function<double(std::size_t)>& offdiag) {
    if (n == 0) throw std::invalid_argument("Gauss rule needs at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = offdiag(k);

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    // Polish each eigenvalue by Newton on the orthonormal recurrence; the
    // Christoffel sum then gives weights with full relative accuracy, which
    // the squared eigenvector components lack for the outermost nodes.
    std::vector<double> b(n + 1);
    for (std::size_t k = 1; k <= n; ++k) b[k] = offdiag(k);
    const double p0 = 1.0 / std::sqrt(mu0);
    auto evaluate = [&](double x, double& pn, double& dpn, double& christoffel) {
        double p_prev = 0.0, p = p0, d_prev = 0.0, d = 0.0;
        christoffel = p * p;
        for (std::size_t k = 1; k <= n; ++k) {
            const double p_next = (x * p - b[k - 1] * p_prev) / b[k];
            const double d_next = (p + x * d - b[k - 1] * d_prev) / b[k];
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if (k < n) christoffel += p * p;
        }
        pn = p;
        dpn = d;
    };
    for (std::size_t i = 0; i < n; ++i) {
        double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        double pn = 0.0, dpn = 0.0, christoffel = 0.0;
        for (int it = 0; it < 3; ++it) {
            evaluate(x, pn, dpn, christoffel);
            if (dpn != 0.0) x -= pn / dpn;
        }
        evaluate(x, pn, dpn, christoffel);
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / christoffel;
    }
    // The rules are symmetric about zero; enforce it exactly.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

GaussRule gauss_hermite(std::size_t n) {
    return golub_welsch(n, std::sqrt(kPi), [](std::size_t k) { return std::sqrt(0.5 * static_cast<double>(k)); });
}

GaussRule gauss_legendre(std::size_t n) {
    return golub_welsch(n, 2.0, [](std::size_t k) {
        const double kk = static_cast<double>(k);
        return kk / std::sqrt(4.0 * kk * kk - 1.0);
    });
}

}  // namespace hqsim
