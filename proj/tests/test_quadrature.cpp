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

#include <doctest.h>

#include "hqsim/quadrature.hpp"
#include "hqsim/units.hpp"

using namespace hqsim;

namespace {

double hermite_moment(int k) {
    // int x^k exp(-x^2) dx = Gamma((k+1)/2) for even k.
    return k % 2 ? 0.0 : std::tgamma(0.5 * (k + 1));
}

}  // namespace

TEST_CASE("gauss_hermite integrates polynomials up to degree 2n-1") {
    for (std::size_t n : {1u, 2u, 5u, 15u, 30u}) {
        const GaussRule rule = gauss_hermite(n);
        REQUIRE(rule.nodes.size() == n);
        for (int k = 0; k <= static_cast<int>(2 * n - 1) && k <= 40; ++k) {
            double s = 0.0, magnitude = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double term = rule.weights[i] * std::pow(rule.nodes[i], k);
                s += term;
                magnitude += std::abs(term);
            }
            const double ref = hermite_moment(k);
            CHECK(std::abs(s - ref) <= 1e-11 * magnitude);
        }
    }
}

TEST_CASE("gauss_legendre integrates polynomials up to degree 2n-1") {
    for (std::size_t n : {1u, 3u, 8u, 15u, 40u}) {
        const GaussRule rule = gauss_legendre(n);
        REQUIRE(rule.weights.size() == n);
        for (int k = 0; k <= static_cast<int>(2 * n - 1) && k <= 60; ++k) {
            double s = 0.0, magnitude = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double term = rule.weights[i] * std::pow(rule.nodes[i], k);
                s += term;
                magnitude += std::abs(term);
            }
            const double ref = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(std::abs(s - ref) <= 1e-12 * magnitude);
        }
    }
}

TEST_CASE("rules are symmetric and sorted") {
    for (const GaussRule& rule : {gauss_hermite(15), gauss_legendre(15), gauss_hermite(4)}) {
        const std::size_t n = rule.nodes.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(rule.nodes[i] == -rule.nodes[n - 1 - i]);
            CHECK(rule.weights[i] == rule.weights[n - 1 - i]);
            CHECK(rule.weights[i] > 0.0);
            if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        }
    }
    CHECK(gauss_hermite(15).nodes[7] == 0.0);
}

TEST_CASE("empty rules are rejected") {
    CHECK_THROWS(gauss_hermite(0));
    CHECK_THROWS(gauss_legendre(0));
}
