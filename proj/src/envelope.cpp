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

#include "hqsim/envelope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "hqsim/units.hpp"

namespace hqsim {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelativeStep = 1e-10;
constexpr double kFlatTolerance = 1e-2;
constexpr double kSettleFraction = 0.05;
constexpr double kUpperFactor = 1e3;

struct Params {
    double p_sat;
    double log_t2;
    double alpha;
};

struct Bounds {
    double log_t2_min;
    double log_t2_max;
};

Params clamp(Params x, const Bounds& b) {
    x.p_sat = std::clamp(x.p_sat, 0.0, 1.0);
    x.log_t2 = std::clamp(x.log_t2, b.log_t2_min, b.log_t2_max);
    x.alpha = std::clamp(x.alpha, kAlphaMin, kAlphaMax);
    return x;
}

double sse(std::span<const EnvelopePoint> pts, const Params& x) {
    const double t2 = std::exp(x.log_t2);
    double s = 0.0;
    for (const auto& pt : pts) {
        const double r = envelope_model(x.p_sat, t2, x.alpha, pt.t) - pt.p;
        s += r * r;
    }
    return s;
}

struct Solution {
    Params x;
    double sse;
    bool converged;
};

Solution levenberg_marquardt(std::span<const EnvelopePoint> pts, Params x, const Bounds& bounds) {
    x = clamp(x, bounds);
    double cost = sse(pts, x);
    double lambda = 1e-3;
    const auto n = static_cast<Eigen::Index>(pts.size());

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        Eigen::MatrixXd jac(n, 3);
        Eigen::VectorXd res(n);
        const double t2 = std::exp(x.log_t2);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = pts[static_cast<std::size_t>(i)].t;
            const double ratio = t / t2;
            const double s = ratio > 0.0 ? std::pow(ratio, x.alpha) : 0.0;
            const double e = std::exp(-s);
            res(i) = x.p_sat + (1.0 - x.p_sat) * e - pts[static_cast<std::size_t>(i)].p;
            jac(i, 0) = 1.0 - e;
            jac(i, 1) = (1.0 - x.p_sat) * e * s * x.alpha;
            jac(i, 2) = ratio > 0.0 ? -(1.0 - x.p_sat) * e * s * std::log(ratio) : 0.0;
        }
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d grad = jac.transpose() * res;
        if (cost == 0.0 || grad.cwiseAbs().maxCoeff() == 0.0) return {x, cost, true};

        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix3d lhs = jtj;
            const double floor = 1e-30 * std::max(1.0, jtj.diagonal().maxCoeff());
            for (int k = 0; k < 3; ++k) lhs(k, k) += lambda * std::max(jtj(k, k), floor) + floor;
            const Eigen::Vector3d step = lhs.ldlt().solve(-grad);
            const Params trial = clamp({x.p_sat + step(0), x.log_t2 + step(1), x.alpha + step(2)}, bounds);
            const double trial_cost = sse(pts, trial);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double change = std::max({std::abs(trial.p_sat - x.p_sat) / std::max(x.p_sat, 1e-12),
                                                std::abs(std::expm1(trial.log_t2 - x.log_t2)),
                                                std::abs(trial.alpha - x.alpha) / x.alpha});
                x = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (change < kRelativeStep) return {x, cost, true};
            } else {
                lambda *= 4.0;
                // No descent direction left at this precision: a (possibly
                // bound-constrained) minimum.
                if (lambda > 1e16) return {x, cost, true};
            }
        }
    }
    return {x, cost, false};
}

double last_quartile_mean(std::span<const EnvelopePoint> pts) {
    const std::size_t count = std::max<std::size_t>(1, (pts.size() + 3) / 4);
    double s = 0.0;
    for (std::size_t i = pts.size() - count; i < pts.size(); ++i) s += pts[i].p;
    return s / static_cast<double>(count);
}

}  // namespace

std::string FitDiagnostics::describe() const {
    std::string out;
    auto add = [&out](const char* s) {
        if (!out.empty()) out += ",";
        out += s;
    };
    if (no_decay) add("no-decay");
    if (window_too_short) add("window-too-short");
    if (hull_fallback) add("hull-fallback");
    if (diverged) add("diverged");
    return out.empty() ? "ok" : out;
}

double envelope_model(double p_sat, double t2_star, double alpha, double t_ns) {
    if (t_ns <= 0.0) return 1.0;
    return p_sat + (1.0 - p_sat) * std::exp(-std::pow(t_ns / t2_star, alpha));
}

double EnvelopeFit::evaluate(double t_ns) const { return envelope_model(p_sat, t2_star, alpha_fit, t_ns); }

EnvelopePoints extract_envelope(std::span<const double> times, std::span<const double> probabilities) {
    if (times.size() != probabilities.size()) throw std::invalid_argument("extract_envelope: size mismatch");
    if (times.size() < 3) throw std::invalid_argument("extract_envelope: need at least 3 trace points");
    EnvelopePoints out;
    out.push_back({times[0], probabilities[0]});
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        if (probabilities[i] > probabilities[i - 1] && probabilities[i] >= probabilities[i + 1]) {
            out.push_back({times[i], probabilities[i]});
        }
    }
    return out;
}

EnvelopePoints extract_envelope(const AveragedTrace& trace) {
    return extract_envelope(trace.times, trace.probabilities);
}

EnvelopePoints upper_hull(std::span<const double> times, std::span<const double> probabilities) {
    if (times.size() != probabilities.size()) throw std::invalid_argument("upper_hull: size mismatch");
    EnvelopePoints out(times.size());
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t i = times.size(); i-- > 0;) {
        running = std::max(running, probabilities[i]);
        out[i] = {times[i], running};
    }
    return out;
}

EnvelopeFit fit_envelope(std::span<const EnvelopePoint> points, double t_upper) {
    if (points.size() < kMinFitPoints) throw std::invalid_argument("fit_envelope: need at least 4 points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].t > points[i - 1].t)) throw std::invalid_argument("fit_envelope: times must increase");
    }
    const double t_last = points.back().t;
    if (!(t_last > 0.0)) throw std::invalid_argument("fit_envelope: need positive times");
    if (t_upper <= 0.0) t_upper = kUpperFactor * t_last;
    const Bounds bounds{std::log(1e-6 * t_last), std::log(t_upper)};

    EnvelopeFit fit;
    fit.n_peaks_used = points.size() - 1;

    double min_p = 1.0;
    for (const auto& pt : points) min_p = std::min(min_p, pt.p);
    if (1.0 - min_p <= kFlatTolerance) {
        fit.p_sat = 1.0;
        fit.t2_star = t_upper;
        fit.alpha_fit = 2.0;
        fit.converged = false;
        fit.diagnostics.no_decay = true;
        fit.rmse = std::sqrt(sse(points, {1.0, std::log(t_upper), 2.0}) / static_cast<double>(points.size()));
        return fit;
    }

    const double p0 = std::clamp(last_quartile_mean(points), 0.0, 1.0 - 1e-6);
    const double half = 0.5 * (1.0 + p0);
    double t0 = 0.0;
    for (const auto& pt : points) {
        if (pt.p < half) {
            t0 = pt.t;
            break;
        }
    }
    if (!(t0 > 0.0)) t0 = t_last;

    const std::array<Params, 6> starts{{{p0, std::log(t0), 2.0},
                                        {p0, std::log(t0), 1.0},
                                        {p0, std::log(t0), 0.7},
                                        {p0, std::log(t0), 3.5},
                                        {p0, std::log(0.5 * t0), 2.0},
                                        {p0, std::log(2.0 * t0), 2.0}}};
    Solution best{starts[0], std::numeric_limits<double>::infinity(), false};
    for (const Params& s : starts) {
        const Solution sol = levenberg_marquardt(points, s, bounds);
        if (sol.sse < best.sse) best = sol;
    }

    fit.p_sat = best.x.p_sat;
    fit.t2_star = std::exp(best.x.log_t2);
    fit.alpha_fit = best.x.alpha;
    fit.rmse = std::sqrt(best.sse / static_cast<double>(points.size()));
    fit.converged = best.converged;
    fit.diagnostics.diverged = !best.converged;
    return fit;
}

EnvelopeFit t2_star(std::span<const double> times, std::span<const double> probabilities) {
    const EnvelopePoints env = extract_envelope(times, probabilities);
    const double t_upper = kUpperFactor * times.back();
    EnvelopeFit fit;
    double tail = 0.0;
    if (env.size() >= kMinFitPoints) {
        fit = fit_envelope(env, t_upper);
        tail = env.back().p;
    } else {
        const EnvelopePoints hull = upper_hull(times, probabilities);
        fit = fit_envelope(hull, t_upper);
        fit.n_peaks_used = env.size() - 1;
        fit.diagnostics.hull_fallback = true;
        tail = hull.back().p;
    }
    if (fit.diagnostics.no_decay) {
        fit.diagnostics.window_too_short = true;
    } else if (std::abs(tail - fit.p_sat) > kSettleFraction * (1.0 - fit.p_sat)) {
        fit.diagnostics.window_too_short = true;
    }
    return fit;
}

EnvelopeFit t2_star(const AveragedTrace& trace) { return t2_star(trace.times, trace.probabilities); }

QualityFactor quality_factor(double j0, double t2) {
    if (!(j0 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("quality_factor: j0 and t2_star must be > 0");
    return {std::exp(-kPlanck / (j0 * t2)), j0, t2};
}

}  // namespace hqsim
