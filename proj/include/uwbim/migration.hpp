#pragma once

// Image formation from a B-scan. Two back-projection flavours:
//
//  * kirchhoff_migrate: 2-D Kirchhoff summation. Each pixel integrates the
//    far-field term psi_dot - (c/R) psi over the aperture, sampled on the
//    two-way travel-time hyperbola t' = 2R/c and weighted by z*dx/(R^2 c).
//    Separated tx/rx antennas are reduced to their midpoint (exploding-
//    reflector approximation), so the result is exact only monostatically.
//
//  * das_migrate: delay-and-sum. Signals are aligned on the exact bistatic
//    delay index floor((|rT - r0| + |rR - r0|)/(c dt)) and the aligned sum is
//    integrated over a short window; by default each summed sample is squared
//    before integration, giving a local energy estimate.
//
// Pixel values are computed in a fixed per-pixel order, so multi-threaded
// and serial runs produce bit-identical images.

#include "uwbim/core.hpp"

#include <cstdint>
#include <thread>

namespace uwbim {

enum class DerivativeScheme { central_difference };
enum class Interpolation { linear };

struct KirchhoffParams {
    DerivativeScheme derivative = DerivativeScheme::central_difference;
    Interpolation interpolation = Interpolation::linear;
};

struct DasParams {
    int integration_len_samples = 1;
    bool square_before_integrate = true;

    void validate() const {
        if (integration_len_samples < 1)
            throw std::invalid_argument("DasParams: integration length must be >= 1");
    }
};

// Aligned sample index of the round trip tx -> pixel -> rx.
inline long long delay_index(const Vec2& tx, const Vec2& rx, const Vec2& pixel,
                             double wave_speed_mm_per_s, double dt_s) {
    if (!(wave_speed_mm_per_s > 0.0) || !(dt_s > 0.0))
        throw std::invalid_argument("delay_index: wave speed and dt must be > 0");
    const double path = tx.distance_to(pixel) + rx.distance_to(pixel);
    return static_cast<long long>(std::floor(path / (wave_speed_mm_per_s * dt_s)));
}

namespace detail {

// Run fn(i0, i1) over contiguous row ranges. Each range writes disjoint rows,
// so thread count never changes the arithmetic.
template <typename Fn>
void for_each_row_chunk(int rows, int num_threads, Fn&& fn) {
    if (num_threads <= 1 || rows <= 1) {
        fn(0, rows);
        return;
    }
    const int workers = std::min(num_threads, rows);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (rows + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int i0 = w * chunk;
        const int i1 = std::min(rows, i0 + chunk);
        if (i0 >= i1) break;
        pool.emplace_back([&fn, i0, i1] { fn(i0, i1); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline RadarImage das_migrate(const BScan& bscan, const ImageGrid& grid, const DasParams& params,
                              int num_threads = 1) {
    bscan.validate();
    grid.validate();
    params.validate();

    const int K = bscan.rows();
    const int N = bscan.cols();
    const int W = grid.width();
    const int H = grid.height();
    const int L = params.integration_len_samples;
    const double c = bscan.geometry.wave_speed_mm_per_s;
    const double dt = bscan.sampling.dt_s;
    // sample index of t = 0 relative to the record start; nonzero after trimming
    const long long base = std::llround(bscan.sampling.t_start_s / dt);

    RadarImage image;
    image.grid = grid;
    image.values.resize(H, W);

    std::vector<Vec2> tx(static_cast<std::size_t>(K)), rx(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        tx[static_cast<std::size_t>(k)] = bscan.geometry.tx_at(k);
        rx[static_cast<std::size_t>(k)] = bscan.geometry.rx_at(k);
    }

    detail::for_each_row_chunk(H, num_threads, [&](int i0, int i1) {
        std::vector<long long> align(static_cast<std::size_t>(K));
        for (int i = i0; i < i1; ++i) {
            const double z = grid.z_center(i);
            for (int j = 0; j < W; ++j) {
                const Vec2 pixel{grid.x_center(j), z};
                for (int k = 0; k < K; ++k)
                    align[static_cast<std::size_t>(k)] =
                        delay_index(tx[static_cast<std::size_t>(k)],
                                    rx[static_cast<std::size_t>(k)], pixel, c, dt) -
                        base;
                double acc = 0.0;
                for (int n = 0; n < L; ++n) {
                    double s = 0.0;
                    for (int k = 0; k < K; ++k) {
                        const long long idx = align[static_cast<std::size_t>(k)] + n;
                        if (idx >= 0 && idx < N) s += bscan.scans(k, static_cast<int>(idx));
                    }
                    acc += params.square_before_integrate ? s * s : s;
                }
                image.values(i, j) = std::max(acc, 0.0);  // negatives carry no energy
            }
        }
    });
    return image;
}

inline RadarImage kirchhoff_migrate(const BScan& bscan, const ImageGrid& grid,
                                    const KirchhoffParams& params = {}, int num_threads = 1) {
    bscan.validate();
    grid.validate();
    (void)params;  // both enum fields have a single supported scheme

    const int K = bscan.rows();
    const int N = bscan.cols();
    const int W = grid.width();
    const int H = grid.height();
    const double c = bscan.geometry.wave_speed_mm_per_s;
    const double dt = bscan.sampling.dt_s;
    const double t0 = bscan.sampling.t_start_s;
    const double dx = bscan.geometry.spacing_mm();

    // central-difference time derivative, one-sided at the record edges
    Eigen::MatrixXd deriv(K, N);
    for (int k = 0; k < K; ++k) {
        deriv(k, 0) = (bscan.scans(k, 1) - bscan.scans(k, 0)) / dt;
        for (int n = 1; n < N - 1; ++n)
            deriv(k, n) = (bscan.scans(k, n + 1) - bscan.scans(k, n - 1)) / (2.0 * dt);
        deriv(k, N - 1) = (bscan.scans(k, N - 1) - bscan.scans(k, N - 2)) / dt;
    }

    // effective monostatic point per measurement position
    std::vector<Vec2> mid(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const Vec2 tx = bscan.geometry.tx_at(k);
        const Vec2 rx = bscan.geometry.rx_at(k);
        mid[static_cast<std::size_t>(k)] = {0.5 * (tx.x + rx.x), 0.5 * (tx.z + rx.z)};
    }

    RadarImage image;
    image.grid = grid;
    image.values.resize(H, W);

    const double inv_two_pi = 1.0 / (2.0 * std::numbers::pi);

    detail::for_each_row_chunk(H, num_threads, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            const double z = grid.z_center(i);
            for (int j = 0; j < W; ++j) {
                const double x = grid.x_center(j);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    const Vec2& m = mid[static_cast<std::size_t>(k)];
                    const double ddx = x - m.x;
                    const double ddz = z - m.z;
                    const double r = std::hypot(ddx, ddz);
                    const double t_prime = 2.0 * r / c;
                    const double pos = (t_prime - t0) / dt;
                    if (pos < 0.0 || pos > static_cast<double>(N - 1)) continue;
                    int lo = static_cast<int>(pos);
                    if (lo > N - 2) lo = N - 2;
                    const double frac = pos - lo;
                    const double psi =
                        (1.0 - frac) * bscan.scans(k, lo) + frac * bscan.scans(k, lo + 1);
                    const double psi_dot = (1.0 - frac) * deriv(k, lo) + frac * deriv(k, lo + 1);
                    acc += (ddz * dx) / (r * r * c) * (psi_dot - (c / r) * psi);
                }
                image.values(i, j) = acc * inv_two_pi;
            }
        }
    });
    return image;
}

// Clamp negative pixels to zero (display and strip analysis only look at
// positive response).
inline RadarImage clip_negative(const RadarImage& image) {
    image.validate();
    RadarImage out = image;
    out.values = out.values.cwiseMax(0.0);
    return out;
}

}  // namespace uwbim
