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

#ifndef HQSIM_UNITS_HPP
#define HQSIM_UNITS_HPP

// Energies are in eV, times in ns, angular frequencies in rad/ns.

namespace hqsim {

inline constexpr double kPi = 3.14159265358979323846;

/// Reduced Planck constant in eV*ns (CODATA 2018).
inline constexpr double kHbar = 6.582119569e-7;

/// Planck constant in eV*ns (CODATA 2018).
inline constexpr double kPlanck = 4.135667696e-6;

}  // namespace hqsim

#endif  // HQSIM_UNITS_HPP
