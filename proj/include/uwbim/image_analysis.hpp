#pragma once

// Strip extraction from a migrated image: grayscale conversion, morphological
// opening, Otsu thresholding, connected components and extent/centre
// measurements. The end product is the abscissa of the dominant strip, whose
// drift between recordings measures axial displacement.

#include "uwbim/core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <utility>

namespace uwbim {

// 8-bit view of a radar image on the same grid.
struct GrayImage {
    ImageGrid grid;
    Eigen::MatrixXi levels;  // each in 0..255

    int width() const { return static_cast<int>(levels.cols()); }
    int height() const { return static_cast<int>(levels.rows()); }

    void validate() const {
        grid.validate();
        if (levels.rows() != grid.height() || levels.cols() != grid.width())
            throw std::invalid_argument("GrayImage: dimensions do not match grid");
        if ((levels.array() < 0).any() || (levels.array() > 255).any())
            throw std::invalid_argument("GrayImage: level outside 0..255");
    }
};

struct BinaryImage {
    ImageGrid grid;
    Eigen::MatrixXi values;  // 0 or 1

    int width() const { return static_cast<int>(values.cols()); }
    int height() const { return static_cast<int>(values.rows()); }

    void validate() const {
        grid.validate();
        if (values.rows() != grid.height() || values.cols() != grid.width())
            throw std::invalid_argument("BinaryImage: dimensions do not match grid");
        if ((values.array() < 0).any() || (values.array() > 1).any())
            throw std::invalid_argument("BinaryImage: value outside {0, 1}");
    }
};

// Flat structuring element: binary mask with odd dimensions, anchored at the
// centre.
struct StructElement {
    Eigen::MatrixXi mask;

    int rows() const { return static_cast<int>(mask.rows()); }
    int cols() const { return static_cast<int>(mask.cols()); }
    int anchor_row() const { return rows() / 2; }
    int anchor_col() const { return cols() / 2; }

    void validate() const {
        if (mask.rows() < 1 || mask.cols() < 1 || mask.rows() % 2 == 0 || mask.cols() % 2 == 0)
            throw std::invalid_argument("StructElement: dimensions must be odd and >= 1");
        if ((mask.array() < 0).any() || (mask.array() > 1).any())
            throw std::invalid_argument("StructElement: mask entries must be 0 or 1");
        if (mask.sum() < 1) throw std::invalid_argument("StructElement: empty mask");
    }
};

inline StructElement rect_element(int rows, int cols) {
    StructElement se;
    se.mask = Eigen::MatrixXi::Ones(rows, cols);
    se.validate();
    return se;
}

inline StructElement square_element(int size) { return rect_element(size, size); }

// Min-max rescale to 0..255 with half-up rounding; a constant image maps to
// all zeros.
inline GrayImage normalize_to_gray(const RadarImage& image) {
    image.validate();  // rejects non-finite values
    GrayImage out;
    out.grid = image.grid;
    out.levels.resize(image.height(), image.width());
    const double lo = image.values.minCoeff();
    const double hi = image.values.maxCoeff();
    if (hi == lo) {
        out.levels.setZero();
        return out;
    }
    const double scale = 255.0 / (hi - lo);
    for (int i = 0; i < image.height(); ++i)
        for (int j = 0; j < image.width(); ++j)
            out.levels(i, j) =
                static_cast<int>(std::floor((image.values(i, j) - lo) * scale + 0.5));
    return out;
}

namespace detail {

enum class MorphOp { erode, dilate };

// Flat grayscale erosion/dilation with replicated borders. Dilation uses the
// mask reflected about the anchor, as the adjoint of erosion requires.
inline Eigen::MatrixXi morph_pass(const Eigen::MatrixXi& in, const StructElement& se, MorphOp op) {
    const int H = static_cast<int>(in.rows());
    const int W = static_cast<int>(in.cols());
    std::vector<std::pair<int, int>> offsets;
    for (int r = 0; r < se.rows(); ++r)
        for (int c = 0; c < se.cols(); ++c)
            if (se.mask(r, c) != 0) offsets.emplace_back(r - se.anchor_row(), c - se.anchor_col());

    Eigen::MatrixXi out(H, W);
    for (int i = 0; i < H; ++i) {
        for (int j = 0; j < W; ++j) {
            int acc = op == MorphOp::erode ? 255 : 0;
            for (const auto& [dr, dc] : offsets) {
                const int r = std::clamp(op == MorphOp::erode ? i + dr : i - dr, 0, H - 1);
                const int c = std::clamp(op == MorphOp::erode ? j + dc : j - dc, 0, W - 1);
                const int v = in(r, c);
                acc = op == MorphOp::erode ? std::min(acc, v) : std::max(acc, v);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace detail

// Grayscale opening: erosion followed by dilation. Removes bright detail the
// element cannot contain while preserving larger strips.
inline GrayImage morph_open(const GrayImage& image, const StructElement& element) {
    image.validate();
    element.validate();
    GrayImage out;
    out.grid = image.grid;
    out.levels = detail::morph_pass(detail::morph_pass(image.levels, element, detail::MorphOp::erode),
                                    element, detail::MorphOp::dilate);
    return out;
}

// Otsu's threshold: the level t maximising the between-class variance
// w0*w1*(mu0-mu1)^2 over the 256-bin histogram, ties resolved toward the
// smallest t. Pixels strictly above t count as object.
inline int otsu_threshold(const GrayImage& image) {
    image.validate();
    std::array<std::int64_t, 256> hist{};
    for (int i = 0; i < image.height(); ++i)
        for (int j = 0; j < image.width(); ++j) ++hist[static_cast<std::size_t>(image.levels(i, j))];

    int distinct = 0;
    for (const auto h : hist)
        if (h > 0) ++distinct;
    if (distinct < 2)
        throw DegenerateHistogramError("otsu_threshold: image has fewer than two distinct levels");

    const std::int64_t total = static_cast<std::int64_t>(image.width()) * image.height();
    std::int64_t sum_all = 0;
    for (int t = 0; t < 256; ++t) sum_all += static_cast<std::int64_t>(t) * hist[static_cast<std::size_t>(t)];

    int best_t = 0;
    double best_var = -1.0;
    std::int64_t w0 = 0;
    std::int64_t sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[static_cast<std::size_t>(t)];
        sum0 += static_cast<std::int64_t>(t) * hist[static_cast<std::size_t>(t)];
        const std::int64_t w1 = total - w0;
        if (w0 == 0) continue;
        if (w1 == 0) break;
        const double mu0 = static_cast<double>(sum0) / static_cast<double>(w0);
        const double mu1 = static_cast<double>(sum_all - sum0) / static_cast<double>(w1);
        const double d = mu0 - mu1;
        const double var = static_cast<double>(w0) * static_cast<double>(w1) * d * d;
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

inline BinaryImage binarize(const GrayImage& image, int threshold) {
    image.validate();
    if (threshold < 0 || threshold > 255)
        throw std::invalid_argument("binarize: threshold outside 0..255");
    BinaryImage out;
    out.grid = image.grid;
    out.values = (image.levels.array() > threshold).cast<int>();
    return out;
}

// One 8-connected component of object pixels.
struct Strip {
    std::vector<std::pair<int, int>> pixels;  // (row, col), discovery order
    double x_min_mm = 0.0;
    double x_max_mm = 0.0;
    long long area_px = 0;
    double mean_level = 0.0;

    double extent_mm() const { return x_max_mm - x_min_mm; }
};

// Label 8-connected components, largest area first; equal areas keep
// row-major discovery order. When the grayscale source is supplied each
// strip also records its mean level.
inline std::vector<Strip> label_strips(const BinaryImage& binary,
                                       const GrayImage* gray = nullptr) {
    binary.validate();
    if (gray) {
        gray->validate();
        if (gray->width() != binary.width() || gray->height() != binary.height())
            throw std::invalid_argument("label_strips: gray image dimensions mismatch");
    }
    const int H = binary.height();
    const int W = binary.width();
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(H, W);
    std::vector<Strip> strips;
    std::vector<std::pair<int, int>> stack;

    for (int i = 0; i < H; ++i) {
        for (int j = 0; j < W; ++j) {
            if (binary.values(i, j) != 1 || seen(i, j)) continue;
            Strip strip;
            int col_lo = j;
            int col_hi = j;
            std::int64_t level_sum = 0;
            stack.clear();
            stack.emplace_back(i, j);
            seen(i, j) = 1;
            while (!stack.empty()) {
                const auto [r, c] = stack.back();
                stack.pop_back();
                strip.pixels.emplace_back(r, c);
                col_lo = std::min(col_lo, c);
                col_hi = std::max(col_hi, c);
                if (gray) level_sum += gray->levels(r, c);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
                        if (binary.values(rr, cc) != 1 || seen(rr, cc)) continue;
                        seen(rr, cc) = 1;
                        stack.emplace_back(rr, cc);
                    }
                }
            }
            strip.area_px = static_cast<long long>(strip.pixels.size());
            strip.x_min_mm = binary.grid.x_center(col_lo);
            strip.x_max_mm = binary.grid.x_center(col_hi);
            strip.mean_level =
                gray ? static_cast<double>(level_sum) / static_cast<double>(strip.area_px) : 0.0;
            strips.push_back(std::move(strip));
        }
    }
    std::stable_sort(strips.begin(), strips.end(),
                     [](const Strip& a, const Strip& b) { return a.area_px > b.area_px; });
    return strips;
}

// Drop strips whose x extent falls below min_extent_frac of the longest one.
inline std::vector<Strip> remove_short_strips(const std::vector<Strip>& strips,
                                              double min_extent_frac = 0.5) {
    if (!(min_extent_frac >= 0.0) || !(min_extent_frac <= 1.0))
        throw std::invalid_argument("remove_short_strips: fraction must be in [0, 1]");
    if (strips.empty()) return {};
    double longest = 0.0;
    for (const auto& s : strips) longest = std::max(longest, s.extent_mm());
    std::vector<Strip> kept;
    for (const auto& s : strips)
        if (s.extent_mm() >= min_extent_frac * longest) kept.push_back(s);
    return kept;
}

// Largest strip by area; equal areas resolve to the smallest x_min. Returns
// an index into `strips`.
inline std::size_t select_reference_strip(const std::vector<Strip>& strips) {
    if (strips.empty()) throw NoStripError("select_reference_strip: no strips");
    std::size_t best = 0;
    for (std::size_t i = 1; i < strips.size(); ++i) {
        const bool better = strips[i].area_px > strips[best].area_px ||
                            (strips[i].area_px == strips[best].area_px &&
                             strips[i].x_min_mm < strips[best].x_min_mm);
        if (better) best = i;
    }
    return best;
}

// Horizontal extent (X1, X2) of the strip, measured over pixels whose level
// reaches edge_level. Positions are pixel-centre abscissas in mm.
inline std::pair<double, double> strip_extent(const Strip& strip, const GrayImage& gray,
                                              int edge_level) {
    gray.validate();
    if (edge_level < 0 || edge_level > 255)
        throw std::invalid_argument("strip_extent: edge_level outside 0..255");
    int col_lo = -1;
    int col_hi = -1;
    for (const auto& [r, c] : strip.pixels) {
        if (gray.levels(r, c) < edge_level) continue;
        if (col_lo < 0 || c < col_lo) col_lo = c;
        if (col_hi < 0 || c > col_hi) col_hi = c;
    }
    if (col_lo < 0) throw EmptyEdgeError("strip_extent: no pixel reaches the edge level");
    return {gray.grid.x_center(col_lo), gray.grid.x_center(col_hi)};
}

inline double center_abscissa(double x1_mm, double x2_mm) {
    if (!(x1_mm <= x2_mm)) throw std::invalid_argument("center_abscissa: x1 must be <= x2");
    return 0.5 * (x1_mm + x2_mm);
}

// Extent and centre of the reference strip in one recording.
struct StripReport {
    double x1_mm = 0.0;
    double x2_mm = 0.0;
    double center_mm = 0.0;
    int threshold = 0;
    int reference_strip = 0;  // row in the accompanying strip table
};

// Axial displacement of a recording relative to a baseline. The estimate is
// baseline centre minus state centre: positive when the strip pattern moved
// toward smaller abscissas.
struct DisplacementReport {
    double baseline_center_mm = 0.0;
    double state_center_mm = 0.0;
    double displacement_mm = 0.0;
    std::optional<double> actual_mm;
    std::optional<double> error_pct;
};

inline DisplacementReport estimate_displacement(const StripReport& baseline,
                                                const StripReport& state,
                                                std::optional<double> actual_mm = std::nullopt) {
    DisplacementReport report;
    report.baseline_center_mm = baseline.center_mm;
    report.state_center_mm = state.center_mm;
    report.displacement_mm = baseline.center_mm - state.center_mm;
    if (actual_mm) {
        if (*actual_mm == 0.0)
            throw std::invalid_argument(
                "estimate_displacement: error percentage undefined for actual = 0");
        report.actual_mm = actual_mm;
        // multiply first: keeps decimal percentages exact for decimal inputs
        report.error_pct = std::abs(report.displacement_mm - *actual_mm) * 100.0 / *actual_mm;
    }
    return report;
}

}  // namespace uwbim
