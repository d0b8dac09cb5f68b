#pragma once

// End-to-end drivers: configuration, the simulate -> condition -> migrate ->
// analyze chain, and the four-state displacement experiment (baseline plus
// three axial shifts). Command wrappers return process exit codes:
// 0 success, 2 I/O failure, 3 parse failure, 4 no reference strip.

#include "uwbim/core.hpp"
#include "uwbim/forward_sim.hpp"
#include "uwbim/image_analysis.hpp"
#include "uwbim/io.hpp"
#include "uwbim/migration.hpp"
#include "uwbim/preprocess.hpp"

#include <array>
#include <cinttypes>
#include <filesystem>
#include <iomanip>

namespace uwbim {

enum class Algorithm { kirchhoff, das };

inline std::string to_string(Algorithm a) {
    return a == Algorithm::kirchhoff ? "kirchhoff" : "das";
}

inline Algorithm algorithm_from_string(const std::string& name, int line = 0) {
    if (name == "kirchhoff") return Algorithm::kirchhoff;
    if (name == "das") return Algorithm::das;
    throw ParseError(line, "unknown algorithm '" + name + "' (expected kirchhoff or das)");
}

// Strip analysis knobs. The default opening element is one pixel tall
// because the diffraction-summed images concentrate the winding into a
// band only a pixel or two high; a taller element erases it outright.
struct AnalysisParams {
    int element_rows = 1;
    int element_cols = 3;
    double min_extent_frac = 0.5;
};

// Full pipeline configuration. Defaults describe the reference bench: a
// 4.7 GHz / 3.2 GHz burst scanned over 60 positions 20 mm apart above a
// 650 mm row of scatterers buried 600 mm deep.
struct PipelineConfig {
    PulseSpec pulse{4.7e9, 3.2e9, 1.0, 2e-9};
    SamplingSpec sampling{2e-11, 512, 0.0};

    double scan_x_start_mm = 0.0;
    double scan_x_step_mm = 20.0;
    int scan_n_positions = 60;
    Vec2 tx_offset_mm{};
    Vec2 rx_offset_mm{};
    double wave_speed_mm_per_s = free_space_speed_mm_per_s;

    double scene_x1_mm = 265.0;
    double scene_x2_mm = 915.0;
    double scene_z_mm = 600.0;
    int scene_n_scatterers = 66;
    double scene_reflectivity = 1.0;
    double noise_std = 0.0;

    ImageGrid grid{0.0, 1180.0, 300.0, 800.0, 10.0};

    Algorithm algorithm = Algorithm::das;
    int das_integration_len_samples = 0;  // 0 = span of one burst duration
    bool das_square_before_integrate = true;
    KirchhoffParams kirchhoff{};
    bool clip_negative_output = true;

    bool align_enabled = false;
    double align_threshold_frac = 0.1;
    bool gate_enabled = false;
    double gate_t_lo_s = 0.0;
    double gate_t_hi_s = 0.0;
    int gate_taper_samples = 8;

    AnalysisParams analysis{};

    int averaging_count = 1;
    std::uint64_t seed = 1;
    int num_threads = 1;
};

inline ScanGeometry make_geometry(const PipelineConfig& cfg) {
    return make_linear_scan(cfg.scan_x_start_mm, cfg.scan_x_step_mm, cfg.scan_n_positions,
                            cfg.tx_offset_mm, cfg.rx_offset_mm, cfg.wave_speed_mm_per_s);
}

inline DasParams resolve_das_params(const PipelineConfig& cfg) {
    DasParams p;
    p.square_before_integrate = cfg.das_square_before_integrate;
    p.integration_len_samples =
        cfg.das_integration_len_samples > 0
            ? cfg.das_integration_len_samples
            : std::max(1, static_cast<int>(std::llround(cfg.pulse.duration_s / cfg.sampling.dt_s)));
    return p;
}

// ----------------------------------------------------------- configuration

inline void write_config(std::ostream& os, const PipelineConfig& c) {
    os << "# uwbim pipeline configuration\n";
    os << "pulse_center_frequency_hz = " << format_double(c.pulse.center_frequency_hz) << "\n";
    os << "pulse_bandwidth_hz = " << format_double(c.pulse.bandwidth_hz) << "\n";
    os << "pulse_amplitude = " << format_double(c.pulse.amplitude) << "\n";
    os << "pulse_duration_s = " << format_double(c.pulse.duration_s) << "\n";
    os << "sampling_dt_s = " << format_double(c.sampling.dt_s) << "\n";
    os << "sampling_n_samples = " << c.sampling.n_samples << "\n";
    os << "sampling_t_start_s = " << format_double(c.sampling.t_start_s) << "\n";
    os << "scan_x_start_mm = " << format_double(c.scan_x_start_mm) << "\n";
    os << "scan_x_step_mm = " << format_double(c.scan_x_step_mm) << "\n";
    os << "scan_n_positions = " << c.scan_n_positions << "\n";
    os << "tx_offset_mm = " << format_double(c.tx_offset_mm.x) << "," << format_double(c.tx_offset_mm.z) << "\n";
    os << "rx_offset_mm = " << format_double(c.rx_offset_mm.x) << "," << format_double(c.rx_offset_mm.z) << "\n";
    os << "wave_speed_mm_per_s = " << format_double(c.wave_speed_mm_per_s) << "\n";
    os << "scene_x1_mm = " << format_double(c.scene_x1_mm) << "\n";
    os << "scene_x2_mm = " << format_double(c.scene_x2_mm) << "\n";
    os << "scene_z_mm = " << format_double(c.scene_z_mm) << "\n";
    os << "scene_n_scatterers = " << c.scene_n_scatterers << "\n";
    os << "scene_reflectivity = " << format_double(c.scene_reflectivity) << "\n";
    os << "noise_std = " << format_double(c.noise_std) << "\n";
    os << "grid_x_min_mm = " << format_double(c.grid.x_min_mm) << "\n";
    os << "grid_x_max_mm = " << format_double(c.grid.x_max_mm) << "\n";
    os << "grid_z_min_mm = " << format_double(c.grid.z_min_mm) << "\n";
    os << "grid_z_max_mm = " << format_double(c.grid.z_max_mm) << "\n";
    os << "grid_pixel_mm = " << format_double(c.grid.pixel_mm) << "\n";
    os << "algorithm = " << to_string(c.algorithm) << "\n";
    os << "das_integration_len_samples = " << c.das_integration_len_samples << "\n";
    os << "das_square_before_integrate = " << (c.das_square_before_integrate ? "true" : "false") << "\n";
    os << "kirchhoff_derivative = central_difference\n";
    os << "kirchhoff_interpolation = linear\n";
    os << "clip_negative_output = " << (c.clip_negative_output ? "true" : "false") << "\n";
    os << "align_time_zero_enabled = " << (c.align_enabled ? "true" : "false") << "\n";
    os << "align_threshold_frac = " << format_double(c.align_threshold_frac) << "\n";
    os << "gate_enabled = " << (c.gate_enabled ? "true" : "false") << "\n";
    os << "gate_t_lo_s = " << format_double(c.gate_t_lo_s) << "\n";
    os << "gate_t_hi_s = " << format_double(c.gate_t_hi_s) << "\n";
    os << "gate_taper_samples = " << c.gate_taper_samples << "\n";
    os << "analysis_element_rows = " << c.analysis.element_rows << "\n";
    os << "analysis_element_cols = " << c.analysis.element_cols << "\n";
    os << "analysis_min_extent_frac = " << format_double(c.analysis.min_extent_frac) << "\n";
    os << "averaging_count = " << c.averaging_count << "\n";
    os << "seed = " << c.seed << "\n";
    os << "num_threads = " << c.num_threads << "\n";
    if (!os) throw IoError("write_config: stream failure");
}

// Parse 'key = value' lines on top of the defaults. Unknown keys and
// malformed values are parse errors; omitted keys keep their defaults.
inline PipelineConfig read_config(std::istream& is) {
    PipelineConfig c;
    std::string line;
    int line_no = 0;
    const auto parse_bool = [](const std::string& v, int ln) {
        if (v == "true") return true;
        if (v == "false") return false;
        throw ParseError(ln, "expected true or false, got '" + v + "'");
    };
    const auto parse_vec2 = [](const std::string& v, int ln) {
        const auto parts = detail::split(v, ',');
        if (parts.size() != 2) throw ParseError(ln, "expected 'x,z', got '" + v + "'");
        return Vec2{detail::parse_double(detail::trim(parts[0]), ln),
                    detail::parse_double(detail::trim(parts[1]), ln)};
    };
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key == "pulse_center_frequency_hz") c.pulse.center_frequency_hz = detail::parse_double(value, line_no);
        else if (key == "pulse_bandwidth_hz") c.pulse.bandwidth_hz = detail::parse_double(value, line_no);
        else if (key == "pulse_amplitude") c.pulse.amplitude = detail::parse_double(value, line_no);
        else if (key == "pulse_duration_s") c.pulse.duration_s = detail::parse_double(value, line_no);
        else if (key == "sampling_dt_s") c.sampling.dt_s = detail::parse_double(value, line_no);
        else if (key == "sampling_n_samples") c.sampling.n_samples = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "sampling_t_start_s") c.sampling.t_start_s = detail::parse_double(value, line_no);
        else if (key == "scan_x_start_mm") c.scan_x_start_mm = detail::parse_double(value, line_no);
        else if (key == "scan_x_step_mm") c.scan_x_step_mm = detail::parse_double(value, line_no);
        else if (key == "scan_n_positions") c.scan_n_positions = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "tx_offset_mm") c.tx_offset_mm = parse_vec2(value, line_no);
        else if (key == "rx_offset_mm") c.rx_offset_mm = parse_vec2(value, line_no);
        else if (key == "wave_speed_mm_per_s") c.wave_speed_mm_per_s = detail::parse_double(value, line_no);
        else if (key == "scene_x1_mm") c.scene_x1_mm = detail::parse_double(value, line_no);
        else if (key == "scene_x2_mm") c.scene_x2_mm = detail::parse_double(value, line_no);
        else if (key == "scene_z_mm") c.scene_z_mm = detail::parse_double(value, line_no);
        else if (key == "scene_n_scatterers") c.scene_n_scatterers = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "scene_reflectivity") c.scene_reflectivity = detail::parse_double(value, line_no);
        else if (key == "noise_std") c.noise_std = detail::parse_double(value, line_no);
        else if (key == "grid_x_min_mm") c.grid.x_min_mm = detail::parse_double(value, line_no);
        else if (key == "grid_x_max_mm") c.grid.x_max_mm = detail::parse_double(value, line_no);
        else if (key == "grid_z_min_mm") c.grid.z_min_mm = detail::parse_double(value, line_no);
        else if (key == "grid_z_max_mm") c.grid.z_max_mm = detail::parse_double(value, line_no);
        else if (key == "grid_pixel_mm") c.grid.pixel_mm = detail::parse_double(value, line_no);
        else if (key == "algorithm") c.algorithm = algorithm_from_string(value, line_no);
        else if (key == "das_integration_len_samples") c.das_integration_len_samples = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "das_square_before_integrate") c.das_square_before_integrate = parse_bool(value, line_no);
        else if (key == "kirchhoff_derivative") {
            if (value != "central_difference") throw ParseError(line_no, "unsupported derivative scheme");
        } else if (key == "kirchhoff_interpolation") {
            if (value != "linear") throw ParseError(line_no, "unsupported interpolation");
        } else if (key == "clip_negative_output") c.clip_negative_output = parse_bool(value, line_no);
        else if (key == "align_time_zero_enabled") c.align_enabled = parse_bool(value, line_no);
        else if (key == "align_threshold_frac") c.align_threshold_frac = detail::parse_double(value, line_no);
        else if (key == "gate_enabled") c.gate_enabled = parse_bool(value, line_no);
        else if (key == "gate_t_lo_s") c.gate_t_lo_s = detail::parse_double(value, line_no);
        else if (key == "gate_t_hi_s") c.gate_t_hi_s = detail::parse_double(value, line_no);
        else if (key == "gate_taper_samples") c.gate_taper_samples = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "analysis_element_rows") c.analysis.element_rows = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "analysis_element_cols") c.analysis.element_cols = static_cast<int>(detail::parse_int(value, line_no));
        else if (key == "analysis_min_extent_frac") c.analysis.min_extent_frac = detail::parse_double(value, line_no);
        else if (key == "averaging_count") {
            const long long n = detail::parse_int(value, line_no);
            if (n < 1) throw ParseError(line_no, "averaging_count must be >= 1");
            c.averaging_count = static_cast<int>(n);
        } else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_int(value, line_no));
        else if (key == "num_threads") {
            const long long n = detail::parse_int(value, line_no);
            if (n < 1) throw ParseError(line_no, "num_threads must be >= 1");
            c.num_threads = static_cast<int>(n);
        } else throw ParseError(line_no, "unknown key '" + key + "'");
    }
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return read_file(path, [](std::istream& is) { return read_config(is); });
}

// ------------------------------------------------------------------ stages

// Scene for a given axial displacement. Displacement is measured against the
// scan axis direction: a displaced state shifts the scatterer row toward
// smaller abscissas, so the estimated value comes out positive.
inline SceneModel make_scene(const PipelineConfig& cfg, double displacement_mm) {
    SceneModel scene = make_winding_scene(cfg.scene_x1_mm, cfg.scene_x2_mm, cfg.scene_z_mm,
                                          cfg.scene_n_scatterers, cfg.scene_reflectivity);
    scene.noise_std = cfg.noise_std;
    return displace_scene(scene, -displacement_mm);
}

// Record averaging_count noisy scans of the scene and average them.
inline BScan run_simulate(const PipelineConfig& cfg, double displacement_mm,
                          std::uint64_t base_seed) {
    const SceneModel scene = make_scene(cfg, displacement_mm);
    const ScanGeometry geometry = make_geometry(cfg);
    if (cfg.averaging_count == 1)
        return simulate_bscan(scene, geometry, cfg.pulse, cfg.sampling, base_seed);
    std::vector<BScan> reps;
    reps.reserve(static_cast<std::size_t>(cfg.averaging_count));
    for (int r = 0; r < cfg.averaging_count; ++r)
        reps.push_back(simulate_bscan(scene, geometry, cfg.pulse, cfg.sampling,
                                      detail::derive_stream(base_seed, static_cast<std::uint64_t>(r))));
    return average_scans(reps);
}

inline BScan apply_preprocess(const PipelineConfig& cfg, const BScan& bscan) {
    BScan out = bscan;
    if (cfg.align_enabled) out = align_time_zero(out, cfg.align_threshold_frac);
    if (cfg.gate_enabled) out = time_gate(out, cfg.gate_t_lo_s, cfg.gate_t_hi_s, cfg.gate_taper_samples);
    return out;
}

inline RadarImage run_migrate(const PipelineConfig& cfg, const BScan& bscan, Algorithm algorithm) {
    const BScan conditioned = apply_preprocess(cfg, bscan);
    RadarImage image = algorithm == Algorithm::das
                           ? das_migrate(conditioned, cfg.grid, resolve_das_params(cfg), cfg.num_threads)
                           : kirchhoff_migrate(conditioned, cfg.grid, cfg.kirchhoff, cfg.num_threads);
    if (cfg.clip_negative_output) image = clip_negative(image);
    return image;
}

// -------------------------------------------------------------- analysis

struct AnalysisOutcome {
    GrayImage gray;       // normalized input
    GrayImage opened;     // after morphological opening; thresholding works on this
    int threshold = 0;
    std::vector<Strip> kept;
    std::size_t reference_index = 0;
    AnalysisReport report;
};

inline AnalysisOutcome analyze_image(const RadarImage& image, const AnalysisParams& params) {
    if (params.element_rows < 1 || params.element_cols < 1 ||
        params.element_rows % 2 == 0 || params.element_cols % 2 == 0)
        throw std::invalid_argument("analyze_image: element dimensions must be odd and >= 1");

    AnalysisOutcome out;
    out.gray = normalize_to_gray(image);
    out.opened = morph_open(out.gray, rect_element(params.element_rows, params.element_cols));
    try {
        out.threshold = otsu_threshold(out.opened);
    } catch (const DegenerateHistogramError&) {
        // a flat image has no object pixels, hence nothing to reference
        throw NoStripError("analyze_image: no reference strip (image is flat after opening)");
    }
    const BinaryImage binary = binarize(out.opened, out.threshold);
    const std::vector<Strip> all = label_strips(binary, &out.opened);
    out.kept = remove_short_strips(all, params.min_extent_frac);
    out.reference_index = select_reference_strip(out.kept);  // throws NoStripError when empty

    const auto [x1, x2] = strip_extent(out.kept[out.reference_index], out.opened, out.threshold);
    out.report.summary.x1_mm = x1;
    out.report.summary.x2_mm = x2;
    out.report.summary.center_mm = center_abscissa(x1, x2);
    out.report.summary.threshold = out.threshold;
    out.report.summary.reference_strip = static_cast<int>(out.reference_index);
    for (const auto& s : out.kept)
        out.report.strips.push_back({s.area_px, s.x_min_mm, s.x_max_mm, s.mean_level});
    return out;
}

// ------------------------------------------------------------- experiment

inline constexpr std::array<double, 4> experiment_displacements_mm{0.0, 10.0, 20.0, 40.0};

struct ExperimentState {
    double displacement_actual_mm = 0.0;
    AnalysisReport report;
    std::optional<DisplacementReport> displacement;
};

struct ExperimentResult {
    Algorithm algorithm = Algorithm::das;
    std::array<ExperimentState, 4> states;
};

// Baseline plus three displaced states: simulate, migrate with the chosen
// algorithm, analyze, and compare each displaced state against the baseline.
inline ExperimentResult run_experiment(const PipelineConfig& cfg, Algorithm algorithm) {
    ExperimentResult result;
    result.algorithm = algorithm;
    for (std::size_t i = 0; i < experiment_displacements_mm.size(); ++i) {
        const double d = experiment_displacements_mm[i];
        const BScan scan = run_simulate(cfg, d, detail::derive_stream(cfg.seed, i));
        const RadarImage image = run_migrate(cfg, scan, algorithm);
        const AnalysisOutcome analysis = analyze_image(image, cfg.analysis);
        result.states[i].displacement_actual_mm = d;
        result.states[i].report = analysis.report;
        if (i > 0)
            result.states[i].displacement = estimate_displacement(
                result.states[0].report.summary, analysis.report.summary, d);
    }
    return result;
}

inline std::string format_experiment_table(const ExperimentResult& result) {
    std::ostringstream os;
    const auto cell = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    os << "# axial displacement summary (algorithm: " << to_string(result.algorithm) << ")\n";
    os << std::left << std::setw(26) << "quantity";
    for (std::size_t i = 0; i < result.states.size(); ++i)
        os << std::setw(14) << ("state" + std::to_string(i + 1));
    os << "\n";
    const auto row = [&](const std::string& label, auto getter) {
        os << std::left << std::setw(26) << label;
        for (const auto& s : result.states) os << std::setw(14) << getter(s);
        os << "\n";
    };
    row("lower_edge_E_mm", [&](const ExperimentState& s) { return cell(s.report.summary.x1_mm); });
    row("upper_edge_E_mm", [&](const ExperimentState& s) { return cell(s.report.summary.x2_mm); });
    row("center_E_mm", [&](const ExperimentState& s) { return cell(s.report.summary.center_mm); });
    row("displacement_E_mm", [&](const ExperimentState& s) {
        return s.displacement ? cell(s.displacement->displacement_mm) : std::string("-");
    });
    row("displacement_A_mm", [&](const ExperimentState& s) {
        return s.displacement ? cell(*s.displacement->actual_mm) : std::string("-");
    });
    row("error_pct", [&](const ExperimentState& s) {
        return s.displacement && s.displacement->error_pct ? cell(*s.displacement->error_pct)
                                                           : std::string("-");
    });
    return os.str();
}

// ---------------------------------------------------------------- commands

namespace detail {

template <typename Fn>
int guarded_command(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const NoStripError& e) {
        err << "analysis error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace detail

struct SimulateOptions {
    std::string config_path;
    double displacement_mm = 0.0;
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded_command(err, [&] {
        PipelineConfig cfg = load_config(opt.config_path);
        if (opt.seed) cfg.seed = *opt.seed;
        const BScan scan = run_simulate(cfg, opt.displacement_mm, cfg.seed);
        write_file(opt.out_path, [&](std::ostream& os) { write_bscan(os, scan); });
        const ScanGeometry& g = scan.geometry;
        out << "positions: " << g.n_positions() << "\n";
        out << "samples_per_position: " << scan.sampling.n_samples << "\n";
        out << "aperture_span_mm: " << format_double(g.span_mm()) << "\n";
        out << "cross_range_resolution_mm: "
            << format_double(resolution_x(cfg.pulse.center_frequency_hz, cfg.scene_z_mm,
                                          g.span_mm(), g.wave_speed_mm_per_s))
            << "\n";
    });
}

struct MigrateOptions {
    std::string config_path;
    std::optional<Algorithm> algorithm;
    std::string in_path;
    std::string out_path;
    std::string gray_out_path;  // optional PGM of the normalized image
};

inline int cmd_migrate(const MigrateOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded_command(err, [&] {
        const PipelineConfig cfg = load_config(opt.config_path);
        const Algorithm algorithm = opt.algorithm.value_or(cfg.algorithm);
        const BScan scan = read_file(opt.in_path, [](std::istream& is) { return read_bscan(is); });
        const RadarImage image = run_migrate(cfg, scan, algorithm);
        write_file(opt.out_path, [&](std::ostream& os) { write_image(os, image); });
        if (!opt.gray_out_path.empty()) {
            const GrayImage gray = normalize_to_gray(image);
            write_file(opt.gray_out_path, [&](std::ostream& os) { write_pgm(os, gray); }, true);
        }
        out << "algorithm: " << to_string(algorithm) << "\n";
        out << "image: " << image.width() << "x" << image.height() << " px\n";
    });
}

struct AnalyzeOptions {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::string gray_out_path;  // optional PGM of the opened grayscale image
};

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded_command(err, [&] {
        const PipelineConfig cfg = load_config(opt.config_path);
        const RadarImage image = read_file(opt.in_path, [](std::istream& is) { return read_image(is); });
        const AnalysisOutcome analysis = analyze_image(image, cfg.analysis);
        write_file(opt.out_path, [&](std::ostream& os) { write_strip_report(os, analysis.report); });
        if (!opt.gray_out_path.empty())
            write_file(opt.gray_out_path,
                       [&](std::ostream& os) { write_pgm(os, analysis.opened); }, true);
        out << "threshold: " << analysis.threshold << "\n";
        out << "strips: " << analysis.kept.size() << "\n";
        out << "center_mm: " << format_double(analysis.report.summary.center_mm) << "\n";
    });
}

struct CompareOptions {
    std::string baseline_path;
    std::string state_path;
    std::optional<double> actual_mm;
    std::string out_path;  // empty: print to stdout only
};

inline int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded_command(err, [&] {
        const AnalysisReport baseline =
            read_file(opt.baseline_path, [](std::istream& is) { return read_strip_report(is); });
        const AnalysisReport state =
            read_file(opt.state_path, [](std::istream& is) { return read_strip_report(is); });
        const DisplacementReport report =
            estimate_displacement(baseline.summary, state.summary, opt.actual_mm);
        if (!opt.out_path.empty())
            write_file(opt.out_path, [&](std::ostream& os) { write_displacement_report(os, report); });
        write_displacement_report(out, report);
    });
}

struct ExperimentOptions {
    std::string config_path;
    std::string algorithms = "both";  // kirchhoff | das | both
    std::optional<std::uint64_t> seed;
    std::string out_dir;  // optional: per-state scans, images and reports
};

inline int cmd_experiment(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded_command(err, [&] {
        PipelineConfig cfg = load_config(opt.config_path);
        if (opt.seed) cfg.seed = *opt.seed;
        std::vector<Algorithm> algorithms;
        if (opt.algorithms == "both")
            algorithms = {Algorithm::kirchhoff, Algorithm::das};
        else
            algorithms = {algorithm_from_string(opt.algorithms)};
        if (!opt.out_dir.empty()) std::filesystem::create_directories(opt.out_dir);

        for (const Algorithm algorithm : algorithms) {
            const ExperimentResult result = run_experiment(cfg, algorithm);
            out << format_experiment_table(result);
            if (!opt.out_dir.empty()) {
                const std::filesystem::path dir(opt.out_dir);
                for (std::size_t i = 0; i < result.states.size(); ++i) {
                    const std::string tag = to_string(algorithm) + "_state" + std::to_string(i + 1);
                    write_file((dir / ("report_" + tag + ".txt")).string(), [&](std::ostream& os) {
                        write_strip_report(os, result.states[i].report);
                    });
                    if (result.states[i].displacement)
                        write_file((dir / ("displacement_" + tag + ".txt")).string(),
                                   [&](std::ostream& os) {
                                       write_displacement_report(os, *result.states[i].displacement);
                                   });
                }
                write_file((dir / ("summary_" + to_string(algorithm) + ".txt")).string(),
                           [&](std::ostream& os) { os << format_experiment_table(result); });
            }
        }
    });
}

}  // namespace uwbim
