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

#ifndef HQSIM_ENVELOPE_HPP
#define HQSIM_ENVELOPE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hqsim/noise.hpp"

namespace hqsim {

struct EnvelopePoint {
    double t = 0.0;  ///< ns
    double p = 0.0;
};

using EnvelopePoints = std::vector<EnvelopePoint>;

/// Outcome flags attached to a fit; more than one may be set.
struct FitDiagnostics {
    bool no_decay = false;          ///< envelope flat at 1; T2* pinned at its upper bound
    bool window_too_short = false;  ///< envelope had not settled onto p_sat by the window end
    bool hull_fallback = false;     ///< fewer than 4 peaks; fitted the trace's upper hull
    bool diverged = false;          ///< iteration budget exhausted without convergence

    std::string describe() const;
};

/// Stretched-exponential decay p_sat + (1 - p_sat) exp(-(t / t2_star)^alpha_fit).
struct EnvelopeFit {
    double p_sat = 1.0;
    double t2_star = 0.0;   ///< ns
    double alpha_fit = 2.0;
    double rmse = 0.0;
    bool converged = false;
    std::size_t n_peaks_used = 0;
    FitDiagnostics diagnostics;

    double evaluate(double t_ns) const;
};

inline constexpr double kAlphaMin = 0.5;
inline constexpr double kAlphaMax = 4.0;
inline constexpr std::size_t kMinFitPoints = 4;

double envelope_model(double p_sat, double t2_star, double alpha, double t_ns);

/// Local maxima (p[i] > p[i-1] and p[i] >= p[i+1]) preceded by the t = 0 point.
EnvelopePoints extract_envelope(std::span<const double> times, std::span<const double> probabilities);
EnvelopePoints extract_envelope(const AveragedTrace& trace);

/// Non-increasing upper hull: hull[i] = max_{k >= i} p[k].
EnvelopePoints upper_hull(std::span<const double> times, std::span<const double> probabilities);

/// Bounded Levenberg-Marquardt fit. Throws std::invalid_argument below
/// kMinFitPoints points. `t_upper` caps T2* (default 1e3 times the last time).
EnvelopeFit fit_envelope(std::span<const EnvelopePoint> points, double t_upper = 0.0);

/// extract_envelope, then fit_envelope (or the hull fallback), then the
/// window-coverage check.
EnvelopeFit t2_star(const AveragedTrace& trace);
EnvelopeFit t2_star(std::span<const double> times, std::span<const double> probabilities);

struct QualityFactor {
    double q = 0.0;
    double j0 = 0.0;       ///< eV
    double t2_star = 0.0;  ///< ns
};

/// q = exp(-h / (j0 t2_star)).
QualityFactor quality_factor(double j0, double t2_star);

}  // namespace hqsim

#endif  // HQSIM_ENVELOPE_HPP
