#pragma once

// Core value types for ultra-wideband pulse-echo imaging: pulse and
// sampling descriptions, linear-scan geometry, A/B-scan containers and
// metric image grids. Everything is double precision, distances in mm,
// times in seconds.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbim {

inline constexpr double free_space_speed_mm_per_s = 2.99792458e11;

// Thrown when an operation needs a nonzero signal and the input is all zeros.
struct NoSignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by histogram-based thresholding when the image has fewer than two
// distinct levels, so no threshold separates anything.
struct DegenerateHistogramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an edge-level query selects no pixels at all.
struct EmptyEdgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when strip analysis finds no usable reference strip.
struct NoStripError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    double distance_to(const Vec2& o) const { return std::hypot(x - o.x, z - o.z); }
};

// Gaussian-modulated cosine burst. The envelope sigma is derived from the
// -10 dB spectral width, so bandwidth_hz is the full width of the power
// spectrum one decade below its peak.
struct PulseSpec {
    double center_frequency_hz = 0.0;
    double bandwidth_hz = 0.0;
    double amplitude = 0.0;
    double duration_s = 0.0;

    void validate() const {
        if (!(center_frequency_hz > 0.0))
            throw std::invalid_argument("PulseSpec: center_frequency_hz must be > 0");
        if (!(bandwidth_hz > 0.0) || !(bandwidth_hz < 2.0 * center_frequency_hz))
            throw std::invalid_argument("PulseSpec: bandwidth_hz must be in (0, 2*f0)");
        if (!(amplitude > 0.0))
            throw std::invalid_argument("PulseSpec: amplitude must be > 0");
        if (!(duration_s > 0.0))
            throw std::invalid_argument("PulseSpec: duration_s must be > 0");
    }
};

// sigma such that the Gaussian envelope's power spectrum is bandwidth_hz wide
// at -10 dB: sigma = sqrt(ln 10) / (pi * BW).
inline double gaussian_sigma_s(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("gaussian_sigma_s: bandwidth must be > 0");
    return std::sqrt(std::log(10.0)) / (std::numbers::pi * bandwidth_hz);
}

// Pulse waveform in envelope-centred coordinates: u = 0 is the envelope peak
// and the support is |u| <= duration/2.
inline double pulse_waveform(const PulseSpec& pulse, double u) {
    if (std::abs(u) > 0.5 * pulse.duration_s) return 0.0;
    const double sigma = gaussian_sigma_s(pulse.bandwidth_hz);
    return pulse.amplitude * std::exp(-(u * u) / (2.0 * sigma * sigma)) *
           std::cos(2.0 * std::numbers::pi * pulse.center_frequency_hz * u);
}

struct SamplingSpec {
    double dt_s = 0.0;
    int n_samples = 0;
    double t_start_s = 0.0;

    double time_at(int n) const { return t_start_s + n * dt_s; }
    double end_time_s() const { return t_start_s + n_samples * dt_s; }

    void validate() const {
        if (!(dt_s > 0.0)) throw std::invalid_argument("SamplingSpec: dt_s must be > 0");
        if (n_samples < 1) throw std::invalid_argument("SamplingSpec: n_samples must be >= 1");
        if (!std::isfinite(t_start_s))
            throw std::invalid_argument("SamplingSpec: t_start_s must be finite");
    }
};

// Measurement positions along a straight scan line at z = 0, with fixed
// transmitter/receiver offsets from each nominal position. The image region
// lies at z > 0.
struct ScanGeometry {
    std::vector<double> x_positions_mm;
    Vec2 tx_offset_mm;
    Vec2 rx_offset_mm;
    double wave_speed_mm_per_s = free_space_speed_mm_per_s;

    int n_positions() const { return static_cast<int>(x_positions_mm.size()); }

    // step between adjacent measurement positions
    double spacing_mm() const { return x_positions_mm[1] - x_positions_mm[0]; }

    // aperture length: distance from first to last measurement position
    double span_mm() const { return x_positions_mm.back() - x_positions_mm.front(); }

    Vec2 tx_at(int k) const { return {x_positions_mm[k] + tx_offset_mm.x, tx_offset_mm.z}; }
    Vec2 rx_at(int k) const { return {x_positions_mm[k] + rx_offset_mm.x, rx_offset_mm.z}; }

    void validate() const {
        if (x_positions_mm.size() < 2)
            throw std::invalid_argument("ScanGeometry: need at least 2 positions");
        if (!(wave_speed_mm_per_s > 0.0))
            throw std::invalid_argument("ScanGeometry: wave speed must be > 0");
        const double step = x_positions_mm[1] - x_positions_mm[0];
        if (!(step > 0.0))
            throw std::invalid_argument("ScanGeometry: positions must be strictly increasing");
        for (std::size_t i = 1; i < x_positions_mm.size(); ++i) {
            const double d = x_positions_mm[i] - x_positions_mm[i - 1];
            if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
                throw std::invalid_argument("ScanGeometry: positions must be uniformly spaced");
        }
    }
};

inline ScanGeometry make_linear_scan(double x_start_mm, double step_mm, int count,
                                     Vec2 tx_offset = {}, Vec2 rx_offset = {},
                                     double wave_speed = free_space_speed_mm_per_s) {
    if (count < 2) throw std::invalid_argument("make_linear_scan: count must be >= 2");
    ScanGeometry g;
    g.x_positions_mm.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) g.x_positions_mm[static_cast<std::size_t>(k)] = x_start_mm + k * step_mm;
    g.tx_offset_mm = tx_offset;
    g.rx_offset_mm = rx_offset;
    g.wave_speed_mm_per_s = wave_speed;
    g.validate();
    return g;
}

// Single recorded waveform.
struct AScan {
    Eigen::VectorXd samples;
    SamplingSpec sampling;

    void validate() const {
        sampling.validate();
        if (samples.size() != sampling.n_samples)
            throw std::invalid_argument("AScan: sample count does not match the sampling setup");
        if (!samples.allFinite()) throw std::invalid_argument("AScan: non-finite sample");
    }
};

// One waveform per measurement position; row k of `scans` belongs to
// x_positions_mm[k].
struct BScan {
    Eigen::MatrixXd scans;  // K x N
    ScanGeometry geometry;
    SamplingSpec sampling;

    int rows() const { return static_cast<int>(scans.rows()); }
    int cols() const { return static_cast<int>(scans.cols()); }

    void validate() const {
        geometry.validate();
        sampling.validate();
        if (scans.rows() != geometry.n_positions())
            throw std::invalid_argument("BScan: row count does not match geometry");
        if (scans.cols() != sampling.n_samples)
            throw std::invalid_argument("BScan: column count does not match the sampling setup");
        if (!scans.allFinite()) throw std::invalid_argument("BScan: non-finite sample");
    }
};

// Rectangular pixel grid in scene coordinates. Pixels are square; the value
// of pixel (i, j) refers to the centre (x_center(j), z_center(i)). z_min must
// stay above the scan line so every pixel is inside the imaged half-space.
struct ImageGrid {
    double x_min_mm = 0.0;
    double x_max_mm = 0.0;
    double z_min_mm = 0.0;
    double z_max_mm = 0.0;
    double pixel_mm = 0.0;

    int width() const {
        return static_cast<int>(std::ceil((x_max_mm - x_min_mm) / pixel_mm - 1e-9));
    }
    int height() const {
        return static_cast<int>(std::ceil((z_max_mm - z_min_mm) / pixel_mm - 1e-9));
    }
    double x_center(int j) const { return x_min_mm + (j + 0.5) * pixel_mm; }
    double z_center(int i) const { return z_min_mm + (i + 0.5) * pixel_mm; }

    void validate() const {
        if (!(pixel_mm > 0.0)) throw std::invalid_argument("ImageGrid: pixel_mm must be > 0");
        if (!(x_max_mm > x_min_mm)) throw std::invalid_argument("ImageGrid: x_max must exceed x_min");
        if (!(z_max_mm > z_min_mm)) throw std::invalid_argument("ImageGrid: z_max must exceed z_min");
        if (!(z_min_mm > 0.0))
            throw std::invalid_argument("ImageGrid: z_min must be > 0 (below the scan line)");
    }
};

// Real-valued image on an ImageGrid: H x W, row i sweeps z, column j sweeps x.
struct RadarImage {
    ImageGrid grid;
    Eigen::MatrixXd values;

    int width() const { return static_cast<int>(values.cols()); }
    int height() const { return static_cast<int>(values.rows()); }

    void validate() const {
        grid.validate();
        if (values.rows() != grid.height() || values.cols() != grid.width())
            throw std::invalid_argument("RadarImage: dimensions do not match grid");
        if (!values.allFinite()) throw std::invalid_argument("RadarImage: non-finite value");
    }
};

// Cross-range resolution of a linear-aperture image at distance P from the
// scan line: (c / f0) * P / (2 L), L being the aperture span.
inline double resolution_x(double f0_hz, double target_distance_mm, double aperture_mm,
                           double wave_speed_mm_per_s) {
    if (!(f0_hz > 0.0)) throw std::invalid_argument("resolution_x: f0 must be > 0");
    if (!(target_distance_mm > 0.0))
        throw std::invalid_argument("resolution_x: target distance must be > 0");
    if (!(aperture_mm > 0.0)) throw std::invalid_argument("resolution_x: aperture must be > 0");
    if (!(wave_speed_mm_per_s > 0.0))
        throw std::invalid_argument("resolution_x: wave speed must be > 0");
    return (wave_speed_mm_per_s / f0_hz) * target_distance_mm / (2.0 * aperture_mm);
}

// Sample the burst onto a time grid. The envelope peak sits at
// t_start + duration/2, so a grid with duration/dt even hits it exactly.
inline AScan synthesize_pulse(const PulseSpec& pulse, const SamplingSpec& sampling) {
    pulse.validate();
    sampling.validate();
    const double nyquist_needed = 2.5 * (pulse.center_frequency_hz + 0.5 * pulse.bandwidth_hz);
    if (1.0 / sampling.dt_s < nyquist_needed) {
        std::ostringstream msg;
        msg << "synthesize_pulse: sampling rate " << 1.0 / sampling.dt_s
            << " Hz is below the required " << nyquist_needed << " Hz";
        throw std::invalid_argument(msg.str());
    }
    AScan out;
    out.sampling = sampling;
    out.samples.resize(sampling.n_samples);
    const double t_peak = sampling.t_start_s + 0.5 * pulse.duration_s;
    for (int n = 0; n < sampling.n_samples; ++n)
        out.samples[n] = pulse_waveform(pulse, sampling.time_at(n) - t_peak);
    return out;
}

}  // namespace uwbim
