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

#include "hqsim/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "hqsim/quadrature.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

namespace {

constexpr std::size_t kChunkSize = 256;
constexpr std::size_t kLanes = 8;
constexpr std::size_t kResyncInterval = 256;
constexpr double kTruncationWidth = 5.0;
constexpr double kMinAcceptance = 1e-3;

void require_nonnegative(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument(std::string("NoiseSpec: ") + name + " must be finite and >= 0");
    }
}

struct Realization {
    QubitParams params;
    double weight = 1.0;
};

// One integration axis: either a single node at the mean or a weighted rule.
struct Axis {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Axis collapsed_axis(double value) { return {{value}, {1.0}}; }

Axis delta_e_axis(double sigma_e, std::size_t n) {
    if (sigma_e == 0.0) return collapsed_axis(0.0);
    const GaussRule gh = gauss_hermite(n);
    Axis axis;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        axis.nodes.push_back(2.0 * sigma_e * gh.nodes[i]);
        axis.weights.push_back(gh.weights[i]);
        total += gh.weights[i];
    }
    for (double& w : axis.weights) w /= total;
    return axis;
}

Axis coupling_axis(double mean, double sigma, std::size_t n) {
    if (sigma == 0.0) return collapsed_axis(mean);
    const double lo = std::max(0.0, mean - kTruncationWidth * sigma);
    const double hi = mean + kTruncationWidth * sigma;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const GaussRule gl = gauss_legendre(n);
    Axis axis;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mid + half * gl.nodes[i];
        const double w = half * gl.weights[i] * pdf_j(x, mean, sigma);
        axis.nodes.push_back(x);
        axis.weights.push_back(w);
        total += w;
    }
    for (double& w : axis.weights) w /= total;
    return axis;
}

// Detects t_k = t_0 + k dt to within rounding.
bool uniform_step(std::span<const double> times, double& dt) {
    const std::size_t n = times.size();
    if (n < 2) return false;
    dt = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) return false;
    const double tol = 1e-13 * std::max(std::abs(times[0]), std::abs(times[n - 1]));
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(times[k] - (times[0] + static_cast<double>(k) * dt)) > tol) return false;
    }
    return true;
}

// Accumulates sum_r w_r P_r(t_k) and sum_r w_r P_r(t_k)^2 over a batch. The
// batch is laid out as structure-of-arrays lanes; each time step reduces the
// lanes into kLanes vertical partial sums, then sums those in a fixed order.
void accumulate_uniform(std::span<const ReturnSpectrum> spectra, std::span<const double> weights,
                        std::span<const double> times, double dt, std::vector<double>& sum,
                        std::vector<double>& sum_sq) {
    const std::size_t n = times.size();
    const std::size_t lanes = (spectra.size() + kLanes - 1) / kLanes * kLanes;

    std::vector<double> c0(lanes, 0.0), w(lanes, 0.0);
    std::array<std::vector<double>, 3> amp, om, rc, rs, cr, ci;
    for (int m = 0; m < 3; ++m) {
        for (auto* v : {&amp[m], &om[m], &rc[m], &rs[m], &cr[m], &ci[m]}) v->assign(lanes, 0.0);
    }
    for (std::size_t l = 0; l < spectra.size(); ++l) {
        const ReturnSpectrum& s = spectra[l];
        c0[l] = s.constant;
        w[l] = weights[l];
        for (int m = 0; m < 3; ++m) {
            amp[m][l] = s.amplitude[m];
            om[m][l] = s.omega[m];
            rc[m][l] = std::cos(s.omega[m] * dt);
            rs[m][l] = std::sin(s.omega[m] * dt);
        }
    }

    for (std::size_t block = 0; block < n; block += kResyncInterval) {
        const double t_block = times[block];
        for (int m = 0; m < 3; ++m) {
            for (std::size_t l = 0; l < lanes; ++l) {
                cr[m][l] = std::cos(om[m][l] * t_block);
                ci[m][l] = std::sin(om[m][l] * t_block);
            }
        }
        const std::size_t end = std::min(n, block + kResyncInterval);
        for (std::size_t k = block; k < end; ++k) {
            std::array<double, kLanes> acc{};
            std::array<double, kLanes> acc_sq{};
            for (std::size_t g = 0; g < lanes; g += kLanes) {
                for (std::size_t j = 0; j < kLanes; ++j) {
                    const std::size_t l = g + j;
                    const double p = c0[l] + amp[0][l] * cr[0][l] + amp[1][l] * cr[1][l] + amp[2][l] * cr[2][l];
                    const double wp = w[l] * p;
                    acc[j] += wp;
                    acc_sq[j] += wp * p;
                }
            }
            for (int m = 0; m < 3; ++m) {
                double* __restrict re_v = cr[m].data();
                double* __restrict im_v = ci[m].data();
                const double* __restrict rc_v = rc[m].data();
                const double* __restrict rs_v = rs[m].data();
                for (std::size_t l = 0; l < lanes; ++l) {
                    const double re = re_v[l] * rc_v[l] - im_v[l] * rs_v[l];
                    const double im = im_v[l] * rc_v[l] + re_v[l] * rs_v[l];
                    re_v[l] = re;
                    im_v[l] = im;
                }
            }
            sum[k] += ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
            sum_sq[k] += ((acc_sq[0] + acc_sq[1]) + (acc_sq[2] + acc_sq[3])) +
                         ((acc_sq[4] + acc_sq[5]) + (acc_sq[6] + acc_sq[7]));
        }
    }
}

void accumulate_direct(std::span<const ReturnSpectrum> spectra, std::span<const double> weights,
                       std::span<const double> times, std::vector<double>& sum, std::vector<double>& sum_sq) {
    for (std::size_t r = 0; r < spectra.size(); ++r) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double p = spectra[r].evaluate(times[k]);
            sum[k] += weights[r] * p;
            sum_sq[k] += weights[r] * p * p;
        }
    }
}

// Produces the realizations of one chunk. Chunk boundaries and per-chunk RNG
// streams are fixed, so the result is independent of scheduling.
class RealizationSource {
public:
    RealizationSource(const QubitParams& base, const NoiseSpec& spec, const AveragingMethod& method)
        : base_(base), spec_(spec), method_(method) {
        collapsed_ = spec.sigma_e == 0.0 && spec.sigma_j1 == 0.0 && spec.sigma_j2 == 0.0;
        if (const auto* q = std::get_if<Quadrature>(&method)) {
            axes_ = {delta_e_axis(spec.sigma_e, q->nodes_per_dim),
                     coupling_axis(spec.j01, spec.sigma_j1, q->nodes_per_dim),
                     coupling_axis(spec.j02, spec.sigma_j2, q->nodes_per_dim)};
            count_ = axes_[0].nodes.size() * axes_[1].nodes.size() * axes_[2].nodes.size();
        } else {
            count_ = collapsed_ ? 1 : std::get<MonteCarlo>(method).n_samples;
        }
    }

    std::size_t count() const { return count_; }
    std::size_t chunks() const { return (count_ + kChunkSize - 1) / kChunkSize; }
    bool monte_carlo() const { return std::holds_alternative<MonteCarlo>(method_); }

    std::vector<Realization> chunk(std::size_t index) const {
        const std::size_t begin = index * kChunkSize;
        const std::size_t end = std::min(count_, begin + kChunkSize);
        std::vector<Realization> out;
        out.reserve(end - begin);
        if (monte_carlo()) {
            NoiseRng rng(mix_seed(std::get<MonteCarlo>(method_).seed, index));
            for (std::size_t i = begin; i < end; ++i) {
                const NoiseSample s = collapsed_ ? NoiseSample{0.0, spec_.j01, spec_.j02} : sample_noise(spec_, rng);
                out.push_back({with_sample(s), 1.0});
            }
        } else {
            const std::size_t n1 = axes_[1].nodes.size();
            const std::size_t n2 = axes_[2].nodes.size();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t a = i / (n1 * n2);
                const std::size_t b = (i / n2) % n1;
                const std::size_t c = i % n2;
                const NoiseSample s{axes_[0].nodes[a], axes_[1].nodes[b], axes_[2].nodes[c]};
                out.push_back({with_sample(s), axes_[0].weights[a] * axes_[1].weights[b] * axes_[2].weights[c]});
            }
        }
        return out;
    }

private:
    QubitParams with_sample(const NoiseSample& s) const {
        QubitParams p = base_;
        p.delta_e = s.delta_e;
        p.j1 = s.j1;
        p.j2 = s.j2;
        return p;
    }

    QubitParams base_;
    NoiseSpec spec_;
    AveragingMethod method_;
    bool collapsed_ = false;
    std::array<Axis, 3> axes_;
    std::size_t count_ = 0;
};

struct Partial {
    std::vector<double> sum;
    std::vector<double> sum_sq;
};

Partial evaluate_chunk(const RealizationSource& source, std::size_t index, std::span<const double> times,
                       bool uniform, double dt) {
    const std::vector<Realization> batch = source.chunk(index);
    std::vector<ReturnSpectrum> spectra;
    std::vector<double> weights;
    spectra.reserve(batch.size());
    weights.reserve(batch.size());
    for (const Realization& r : batch) {
        spectra.push_back(SubspacePropagator(r.params).spectrum());
        weights.push_back(r.weight);
    }
    Partial part{std::vector<double>(times.size(), 0.0), std::vector<double>(times.size(), 0.0)};
    if (uniform) {
        accumulate_uniform(spectra, weights, times, dt, part.sum, part.sum_sq);
    } else {
        accumulate_direct(spectra, weights, times, part.sum, part.sum_sq);
    }
    return part;
}

}  // namespace

void NoiseSpec::validate() const {
    require_nonnegative(sigma_e, "sigma_e");
    require_nonnegative(j01, "j01");
    require_nonnegative(j02, "j02");
    require_nonnegative(sigma_j1, "sigma_j1");
    require_nonnegative(sigma_j2, "sigma_j2");
}

void validate_method(const AveragingMethod& method) {
    if (const auto* mc = std::get_if<MonteCarlo>(&method)) {
        if (mc->n_samples == 0) throw std::invalid_argument("MonteCarlo: n_samples must be >= 1");
    } else if (std::get<Quadrature>(method).nodes_per_dim == 0) {
        throw std::invalid_argument("Quadrature: nodes_per_dim must be >= 1");
    }
}

double pdf_delta_e(double delta_e, double sigma_e) {
    if (!(sigma_e > 0.0)) throw std::invalid_argument("pdf_delta_e: sigma_e must be > 0");
    const double x = delta_e / sigma_e;
    return std::exp(-0.25 * x * x) / (2.0 * sigma_e * std::sqrt(kPi));
}

double pdf_j(double j, double mean, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("pdf_j: sigma must be > 0");
    if (j < 0.0) return 0.0;
    const double z = (j - mean) / sigma;
    const double norm = 2.0 / (1.0 + std::erf(mean / (sigma * std::sqrt(2.0))));
    return norm * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return splitmix(splitmix(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

double NoiseRng::uniform() {
    double u = 0.0;
    do {
        u = std::generate_canonical<double, 64>(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
}

double sample_truncated_normal(double mean, double sigma, NoiseRng& rng) {
    if (sigma == 0.0) return mean;
    // P(x >= 0) for the untruncated normal.
    const double z0 = -mean / sigma;
    const double acceptance = 0.5 * std::erfc(z0 / std::sqrt(2.0));
    if (acceptance >= kMinAcceptance) {
        for (;;) {
            const double x = mean + sigma * rng.normal();
            if (x >= 0.0) return x;
        }
    }
    // Far tail: invert the survival function S(z) = erfc(z / sqrt 2) / 2 on [z0, inf).
    const double u = rng.uniform();
    const double z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u * acceptance);
    return std::max(0.0, mean + sigma * z);
}

NoiseSample sample_noise(const NoiseSpec& spec, NoiseRng& rng) {
    NoiseSample s;
    s.delta_e = spec.sigma_e == 0.0 ? 0.0 : std::sqrt(2.0) * spec.sigma_e * rng.normal();
    s.j1 = sample_truncated_normal(spec.j01, spec.sigma_j1, rng);
    s.j2 = sample_truncated_normal(spec.j02, spec.sigma_j2, rng);
    return s;
}

std::vector<double> uniform_time_grid(double t_max, std::size_t n) {
    if (n < 2 || !(t_max > 0.0)) throw std::invalid_argument("uniform_time_grid: need n >= 2 and t_max > 0");
    std::vector<double> t(n);
    const double dt = t_max / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) t[k] = static_cast<double>(k) * dt;
    t[n - 1] = t_max;
    return t;
}

AveragedTrace average_return_probability(const QubitParams& base, const NoiseSpec& spec,
                                         std::span<const double> times, const AveragingMethod& method,
                                         std::size_t threads) {
    spec.validate();
    validate_method(method);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1])) {
            throw std::invalid_argument("average_return_probability: times must be sorted and non-negative");
        }
    }

    const RealizationSource source(base, spec, method);
    double dt = 0.0;
    const bool uniform = uniform_step(times, dt);
    const std::size_t n = times.size();
    std::vector<double> sum(n, 0.0);
    std::vector<double> sum_sq(n, 0.0);

    auto merge = [&](const Partial& part) {
        for (std::size_t k = 0; k < n; ++k) {
            sum[k] += part.sum[k];
            sum_sq[k] += part.sum_sq[k];
        }
    };

    const std::size_t n_chunks = source.chunks();
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n_chunks));
    if (workers == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) merge(evaluate_chunk(source, c, times, uniform, dt));
    } else {
        // Waves of `workers` chunks; partials are merged in chunk order.
        std::vector<Partial> wave(workers);
        for (std::size_t first = 0; first < n_chunks; first += workers) {
            const std::size_t count = std::min(workers, n_chunks - first);
            std::vector<std::jthread> pool;
            for (std::size_t i = 0; i < count; ++i) {
                pool.emplace_back([&, i] { wave[i] = evaluate_chunk(source, first + i, times, uniform, dt); });
            }
            pool.clear();
            for (std::size_t i = 0; i < count; ++i) merge(wave[i]);
        }
    }

    AveragedTrace out;
    out.times.assign(times.begin(), times.end());
    out.method = method;
    out.realizations = source.count();
    out.probabilities.resize(n);
    out.std_error.assign(n, 0.0);
    if (source.monte_carlo()) {
        const double count = static_cast<double>(source.count());
        for (std::size_t k = 0; k < n; ++k) {
            const double mean = sum[k] / count;
            out.probabilities[k] = mean;
            if (source.count() > 1) {
                const double var = std::max(0.0, sum_sq[k] / count - mean * mean) * count / (count - 1.0);
                out.std_error[k] = std::sqrt(var / count);
            }
        }
    } else {
        out.probabilities = sum;
    }
    return out;
}

}  // namespace hqsim
