#pragma once

// Point-scatterer echo simulator. Each scatterer contributes a delayed copy
// of the probe burst to every scan row; amplitudes follow the two-way
// spherical spreading law 1/(Rt*Rr). Optional additive Gaussian noise is
// drawn from a per-row stream derived from the seed, so results never depend
// on row evaluation order.

#include "uwbim/core.hpp"

#include <cstdint>
#include <random>

namespace uwbim {

struct Scatterer {
    Vec2 position_mm;      // z > 0, below the scan line
    double reflectivity = 1.0;
};

struct SceneModel {
    std::vector<Scatterer> scatterers;
    double noise_std = 0.0;

    void validate() const {
        if (scatterers.empty()) throw std::invalid_argument("SceneModel: no scatterers");
        for (const auto& s : scatterers) {
            if (!(s.position_mm.z > 0.0))
                throw std::invalid_argument("SceneModel: scatterer z must be > 0");
            if (!(s.reflectivity >= 0.0))
                throw std::invalid_argument("SceneModel: reflectivity must be >= 0");
        }
        if (!(noise_std >= 0.0)) throw std::invalid_argument("SceneModel: noise_std must be >= 0");
    }
};

// Row of equally spaced identical scatterers from (x1, z) to (x2, z); a crude
// stand-in for the axial section of a winding.
inline SceneModel make_winding_scene(double x1_mm, double x2_mm, double z_mm, int count,
                                     double reflectivity) {
    if (count < 1) throw std::invalid_argument("make_winding_scene: count must be >= 1");
    if (!(x2_mm >= x1_mm)) throw std::invalid_argument("make_winding_scene: x2 must be >= x1");
    SceneModel scene;
    scene.scatterers.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        scene.scatterers.push_back({{0.5 * (x1_mm + x2_mm), z_mm}, reflectivity});
    } else {
        const double step = (x2_mm - x1_mm) / (count - 1);
        for (int i = 0; i < count; ++i)
            scene.scatterers.push_back({{x1_mm + i * step, z_mm}, reflectivity});
    }
    scene.validate();
    return scene;
}

inline SceneModel displace_scene(const SceneModel& scene, double dx_mm) {
    SceneModel out = scene;
    for (auto& s : out.scatterers) s.position_mm.x += dx_mm;
    return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent sub-stream seed for (seed, a, b); used for per-row noise and
// for per-repetition scan seeds.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(seed ^ splitmix64(a + 0x632BE59BD9B4E019ull) ^ (splitmix64(b) << 1));
}

// Burst evaluator with the per-call constants hoisted out of the sample loop.
struct PulseSampler {
    double amplitude;
    double inv_two_sigma_sq;
    double omega;
    double half_duration;

    explicit PulseSampler(const PulseSpec& p)
        : amplitude(p.amplitude),
          inv_two_sigma_sq(0.0),
          omega(2.0 * std::numbers::pi * p.center_frequency_hz),
          half_duration(0.5 * p.duration_s) {
        const double sigma = gaussian_sigma_s(p.bandwidth_hz);
        inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    }

    double operator()(double u) const {
        if (std::abs(u) > half_duration) return 0.0;
        return amplitude * std::exp(-u * u * inv_two_sigma_sq) * std::cos(omega * u);
    }
};

}  // namespace detail

// Simulate one B-scan. The echo of a scatterer is the burst centred at the
// two-way delay (Rt + Rr)/c and scaled by reflectivity/(Rt*Rr). The record
// must be long enough to hold the farthest echo plus one burst duration.
inline BScan simulate_bscan(const SceneModel& scene, const ScanGeometry& geometry,
                            const PulseSpec& pulse, const SamplingSpec& sampling,
                            std::uint64_t seed) {
    scene.validate();
    geometry.validate();
    pulse.validate();
    sampling.validate();

    const int K = geometry.n_positions();
    const int N = sampling.n_samples;
    const double c = geometry.wave_speed_mm_per_s;

    double max_delay = 0.0;
    for (int k = 0; k < K; ++k) {
        const Vec2 tx = geometry.tx_at(k);
        const Vec2 rx = geometry.rx_at(k);
        for (const auto& s : scene.scatterers) {
            const double tau = (tx.distance_to(s.position_mm) + rx.distance_to(s.position_mm)) / c;
            max_delay = std::max(max_delay, tau);
        }
    }
    if (!(max_delay + pulse.duration_s < sampling.end_time_s())) {
        std::ostringstream msg;
        msg << "simulate_bscan: record ends at " << sampling.end_time_s()
            << " s but needs to extend past " << max_delay + pulse.duration_s << " s";
        throw std::invalid_argument(msg.str());
    }

    BScan out;
    out.geometry = geometry;
    out.sampling = sampling;
    out.scans = Eigen::MatrixXd::Zero(K, N);

    const detail::PulseSampler burst(pulse);
    const double half = 0.5 * pulse.duration_s;

    for (int k = 0; k < K; ++k) {
        const Vec2 tx = geometry.tx_at(k);
        const Vec2 rx = geometry.rx_at(k);
        for (const auto& s : scene.scatterers) {
            const double rt = tx.distance_to(s.position_mm);
            const double rr = rx.distance_to(s.position_mm);
            const double tau = (rt + rr) / c;
            const double amp = s.reflectivity / (rt * rr);
            int n_lo = static_cast<int>(std::ceil((tau - half - sampling.t_start_s) / sampling.dt_s));
            int n_hi = static_cast<int>(std::floor((tau + half - sampling.t_start_s) / sampling.dt_s));
            n_lo = std::max(n_lo, 0);
            n_hi = std::min(n_hi, N - 1);
            for (int n = n_lo; n <= n_hi; ++n)
                out.scans(k, n) += amp * burst(sampling.time_at(n) - tau);
        }
        if (scene.noise_std > 0.0) {
            std::mt19937_64 rng(detail::derive_stream(seed, static_cast<std::uint64_t>(k)));
            std::normal_distribution<double> gauss(0.0, scene.noise_std);
            for (int n = 0; n < N; ++n) out.scans(k, n) += gauss(rng);
        }
    }
    return out;
}

// Element-wise mean of scans recorded with identical geometry and sampling.
inline BScan average_scans(const std::vector<BScan>& scans) {
    if (scans.empty()) throw std::invalid_argument("average_scans: empty input");
    const BScan& first = scans.front();
    first.validate();
    for (std::size_t i = 1; i < scans.size(); ++i) {
        const BScan& b = scans[i];
        b.validate();
        const bool same = b.sampling.dt_s == first.sampling.dt_s &&
                          b.sampling.n_samples == first.sampling.n_samples &&
                          b.sampling.t_start_s == first.sampling.t_start_s &&
                          b.geometry.x_positions_mm == first.geometry.x_positions_mm &&
                          b.geometry.tx_offset_mm.x == first.geometry.tx_offset_mm.x &&
                          b.geometry.tx_offset_mm.z == first.geometry.tx_offset_mm.z &&
                          b.geometry.rx_offset_mm.x == first.geometry.rx_offset_mm.x &&
                          b.geometry.rx_offset_mm.z == first.geometry.rx_offset_mm.z &&
                          b.geometry.wave_speed_mm_per_s == first.geometry.wave_speed_mm_per_s;
        if (!same) throw std::invalid_argument("average_scans: mismatched scan layouts");
    }
    BScan out = first;
    for (std::size_t i = 1; i < scans.size(); ++i) out.scans += scans[i].scans;
    out.scans /= static_cast<double>(scans.size());
    return out;
}

}  // namespace uwbim
