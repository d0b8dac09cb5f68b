#pragma once

// B-scan conditioning: dead-time removal, time gating and background
// subtraction. All operations preserve the absolute time axis; trimming only
// advances t_start.

#include "uwbim/core.hpp"

#include <algorithm>

namespace uwbim {

// Trim the common dead time before the first arrival. The cut is global: the
// earliest sample in any row whose magnitude exceeds threshold_frac of the
// scan-wide peak becomes sample zero, and t_start advances by the same
// amount, so sample times are unchanged.
inline BScan align_time_zero(const BScan& bscan, double threshold_frac = 0.1) {
    bscan.validate();
    if (!(threshold_frac > 0.0) || !(threshold_frac < 1.0))
        throw std::invalid_argument("align_time_zero: threshold_frac must be in (0, 1)");

    const double peak = bscan.scans.cwiseAbs().maxCoeff();
    if (peak == 0.0) throw NoSignalError("align_time_zero: scan is identically zero");
    const double threshold = threshold_frac * peak;

    const int K = bscan.rows();
    const int N = bscan.cols();
    int first = N;
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < first; ++n) {
            if (std::abs(bscan.scans(k, n)) > threshold) {
                first = n;
                break;
            }
        }
    }
    // the peak sample itself exceeds the threshold, so first < N here

    BScan out = bscan;
    if (first == 0) return out;
    out.scans.setZero();
    out.scans.leftCols(N - first) = bscan.scans.rightCols(N - first);
    out.sampling.t_start_s = bscan.sampling.t_start_s + first * bscan.sampling.dt_s;
    return out;
}

// Zero everything outside [t_lo, t_hi] and ramp the first/last taper_samples
// kept samples with a raised cosine. Samples deeper than taper_samples inside
// the gate are passed through untouched. The gate must lie within the record;
// a gate that straddles no sample instant yields an all-zero scan.
inline BScan time_gate(const BScan& bscan, double t_lo_s, double t_hi_s,
                       int taper_samples = 8) {
    bscan.validate();
    if (taper_samples < 0) throw std::invalid_argument("time_gate: taper_samples must be >= 0");
    if (!(t_lo_s < t_hi_s)) throw std::invalid_argument("time_gate: gate must satisfy t_lo < t_hi");
    const SamplingSpec& sp = bscan.sampling;
    const double t_last = sp.time_at(sp.n_samples - 1);
    if (t_lo_s < sp.t_start_s || t_hi_s > t_last)
        throw std::invalid_argument("time_gate: gate extends outside the record");

    // slack of 1e-6 dt so gate bounds that nominally coincide with a sample
    // instant keep that sample regardless of rounding
    const double eps = 1e-6;
    const int n_lo = static_cast<int>(std::ceil((t_lo_s - sp.t_start_s) / sp.dt_s - eps));
    const int n_hi = static_cast<int>(std::floor((t_hi_s - sp.t_start_s) / sp.dt_s + eps));

    BScan out = bscan;
    if (n_lo > n_hi) {
        out.scans.setZero();
        return out;
    }

    for (int n = 0; n < bscan.cols(); ++n) {
        if (n < n_lo || n > n_hi) {
            out.scans.col(n).setZero();
            continue;
        }
        const int into = std::min(n - n_lo, n_hi - n);  // distance to the nearer gate edge
        if (into < taper_samples) {
            const double w =
                0.5 * (1.0 - std::cos(std::numbers::pi * (into + 1) / (taper_samples + 1)));
            out.scans.col(n) *= w;
        }
    }
    return out;
}

// Subtract a reference (background) recording taken with identical layout.
inline BScan background_subtract(const BScan& bscan, const BScan& background) {
    bscan.validate();
    background.validate();
    const bool same = bscan.sampling.dt_s == background.sampling.dt_s &&
                      bscan.sampling.n_samples == background.sampling.n_samples &&
                      bscan.sampling.t_start_s == background.sampling.t_start_s &&
                      bscan.geometry.x_positions_mm == background.geometry.x_positions_mm;
    if (!same) throw std::invalid_argument("background_subtract: mismatched scan layouts");
    BScan out = bscan;
    out.scans -= background.scans;
    return out;
}

}  // namespace uwbim
