#include "uwbim/image_analysis.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace uwbim;
using Catch::Approx;

namespace {

ImageGrid grid_for(int width, int height, double pixel = 10.0, double x_min = 0.0,
                   double z_min = 10.0) {
    return {x_min, x_min + width * pixel, z_min, z_min + height * pixel, pixel};
}

GrayImage gray_of(std::initializer_list<std::initializer_list<int>> rows) {
    GrayImage g;
    const int H = static_cast<int>(rows.size());
    const int W = static_cast<int>(rows.begin()->size());
    g.grid = grid_for(W, H);
    g.levels.resize(H, W);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (const int v : row) g.levels(i, j++) = v;
        ++i;
    }
    return g;
}

GrayImage random_gray(std::mt19937_64& rng, int max_side = 24) {
    std::uniform_int_distribution<int> side(1, max_side);
    const int H = side(rng);
    const int W = side(rng);
    GrayImage g;
    g.grid = grid_for(W, H);
    g.levels.resize(H, W);
    // mix of wide, narrow and bimodal level distributions
    std::uniform_int_distribution<int> mode(0, 2);
    const int m = mode(rng);
    std::uniform_int_distribution<int> wide(0, 255), narrow(100, 140), coin(0, 1);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            g.levels(i, j) = m == 0 ? wide(rng) : (m == 1 ? narrow(rng) : coin(rng) * 255);
    return g;
}

}  // namespace

TEST_CASE("min-max grayscale conversion") {
    RadarImage image;
    image.grid = grid_for(2, 2);
    image.values.resize(2, 2);
    image.values << 0.0, 1.0, 3.0, 4.0;
    const GrayImage g = normalize_to_gray(image);
    REQUIRE(g.levels(0, 0) == 0);
    REQUIRE(g.levels(0, 1) == 64);   // 63.75 rounds half-up
    REQUIRE(g.levels(1, 0) == 191);  // 191.25 rounds down
    REQUIRE(g.levels(1, 1) == 255);

    image.values.setConstant(7.5);
    REQUIRE(normalize_to_gray(image).levels.maxCoeff() == 0);
}

TEST_CASE("opening by a 3-wide window on a single row") {
    const GrayImage g = gray_of({{0, 5, 9, 5, 0}});
    const GrayImage opened = morph_open(g, rect_element(1, 3));
    REQUIRE(opened.levels(0, 0) == 0);
    REQUIRE(opened.levels(0, 1) == 5);
    REQUIRE(opened.levels(0, 2) == 5);  // the lone peak is planed down
    REQUIRE(opened.levels(0, 3) == 5);
    REQUIRE(opened.levels(0, 4) == 0);
}

TEST_CASE("opening is idempotent and never brightens") {
    std::mt19937_64 rng(2024);
    for (const auto& element : {rect_element(1, 3), rect_element(3, 3), rect_element(3, 1),
                                rect_element(5, 3)}) {
        for (int trial = 0; trial < 30; ++trial) {
            const GrayImage g = random_gray(rng);
            const GrayImage once = morph_open(g, element);
            const GrayImage twice = morph_open(once, element);
            REQUIRE((twice.levels - once.levels).cwiseAbs().maxCoeff() == 0);
            REQUIRE((once.levels.array() <= g.levels.array()).all());
        }
    }
}

TEST_CASE("structuring element validation") {
    REQUIRE_THROWS_AS(rect_element(2, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(rect_element(3, 0), std::invalid_argument);
    StructElement empty;
    empty.mask = Eigen::MatrixXi::Zero(3, 3);
    REQUIRE_THROWS_AS(empty.validate(), std::invalid_argument);
    REQUIRE(square_element(3).rows() == 3);
    REQUIRE(square_element(3).cols() == 3);
}

TEST_CASE("threshold selection on crafted histograms") {
    // pure 0/255: every cut separates them equally well, ties go low
    REQUIRE(otsu_threshold(gray_of({{0, 0, 255, 255}})) == 0);
    // adjacent levels: the only separating cut is at the lower level
    REQUIRE(otsu_threshold(gray_of({{100, 101, 100, 101}})) == 100);
    REQUIRE_THROWS_AS(otsu_threshold(gray_of({{7, 7, 7, 7}})), DegenerateHistogramError);
}

TEST_CASE("threshold selection agrees with the exhaustive oracle") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const GrayImage g = random_gray(rng);
        int expected = -1;
        try {
            expected = oracles::brute_force_otsu(g);
        } catch (const DegenerateHistogramError&) {
            REQUIRE_THROWS_AS(otsu_threshold(g), DegenerateHistogramError);
            continue;
        }
        REQUIRE(otsu_threshold(g) == expected);
    }
}

TEST_CASE("binarization is strict and monotone in the threshold") {
    const GrayImage g = gray_of({{10, 11, 200, 255, 0}});
    const BinaryImage b = binarize(g, 11);
    REQUIRE(b.values(0, 0) == 0);
    REQUIRE(b.values(0, 1) == 0);  // equal to the threshold stays background
    REQUIRE(b.values(0, 2) == 1);
    REQUIRE(b.values(0, 3) == 1);

    std::mt19937_64 rng(31);
    const GrayImage r = random_gray(rng, 16);
    for (int t = 0; t < 255; t += 13) {
        const BinaryImage lo = binarize(r, t);
        const BinaryImage hi = binarize(r, t + 13 <= 255 ? t + 13 : 255);
        REQUIRE(((hi.values.array() == 1) <= (lo.values.array() == 1)).all());
    }
    REQUIRE_THROWS_AS(binarize(g, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(binarize(g, 256), std::invalid_argument);
}

TEST_CASE("connected components are 8-connected and sorted by area") {
    BinaryImage b;
    b.grid = grid_for(10, 5);
    b.values = Eigen::MatrixXi::Zero(5, 10);
    // blob A: 2x4 block; blob B: 1x3 run; C: diagonal pair joining into one
    b.values.block(1, 1, 2, 4).setOnes();
    b.values.block(4, 6, 1, 3).setOnes();
    b.values(0, 8) = 1;
    b.values(1, 9) = 1;  // touches (0, 8) diagonally

    const std::vector<Strip> strips = label_strips(b);
    REQUIRE(strips.size() == 3);
    REQUIRE(strips[0].area_px == 8);
    REQUIRE(strips[1].area_px == 3);
    REQUIRE(strips[2].area_px == 2);
    REQUIRE(strips[0].x_min_mm == b.grid.x_center(1));
    REQUIRE(strips[0].x_max_mm == b.grid.x_center(4));
    REQUIRE(strips[2].x_min_mm == b.grid.x_center(8));
    REQUIRE(strips[2].x_max_mm == b.grid.x_center(9));

    GrayImage g;
    g.grid = b.grid;
    g.levels = Eigen::MatrixXi::Constant(5, 10, 10);
    g.levels(4, 6) = 40;
    const std::vector<Strip> with_levels = label_strips(b, &g);
    REQUIRE(with_levels[1].mean_level == Approx(20.0));  // (40 + 10 + 10) / 3
}

TEST_CASE("short strips are dropped relative to the longest") {
    const auto strip_with_extent = [](double x_min, double x_max) {
        Strip s;
        s.x_min_mm = x_min;
        s.x_max_mm = x_max;
        s.area_px = 1;
        return s;
    };
    const std::vector<Strip> strips{strip_with_extent(0.0, 600.0),
                                    strip_with_extent(100.0, 680.0),
                                    strip_with_extent(300.0, 390.0)};
    const std::vector<Strip> kept = remove_short_strips(strips, 0.5);
    REQUIRE(kept.size() == 2);  // 600 and 580 survive, 90 falls under 300
    REQUIRE(kept[0].extent_mm() == 600.0);
    REQUIRE(kept[1].extent_mm() == 580.0);
    REQUIRE(remove_short_strips({}, 0.5).empty());
    REQUIRE_THROWS_AS(remove_short_strips(strips, 1.5), std::invalid_argument);
}

TEST_CASE("reference strip is the largest, ties broken toward smaller x") {
    Strip a;
    a.area_px = 5;
    a.x_min_mm = 0.0;
    Strip b;
    b.area_px = 9;
    b.x_min_mm = 500.0;
    Strip c;
    c.area_px = 9;
    c.x_min_mm = 100.0;
    REQUIRE(select_reference_strip({a, b, c}) == 2);
    REQUIRE_THROWS_AS(select_reference_strip({}), NoStripError);
}

TEST_CASE("strip extent in scene coordinates") {
    // 4 mm pixels starting at 206: column centres are 208 + 4 j
    GrayImage g;
    g.grid = {206.0, 846.0, 10.0, 14.0, 4.0};
    REQUIRE(g.grid.width() == 160);
    g.levels = Eigen::MatrixXi::Zero(1, 160);
    Strip strip;
    for (int j = 0; j < 160; ++j) {
        g.levels(0, j) = j == 0 || j == 159 ? 120 : 80;
        strip.pixels.emplace_back(0, j);
    }
    const auto [x1, x2] = strip_extent(strip, g, 100);
    REQUIRE(x1 == 208.0);  // only the end columns reach level 100
    REQUIRE(x2 == 844.0);
    REQUIRE(center_abscissa(x1, x2) == 526.0);

    const auto [y1, y2] = strip_extent(strip, g, 60);  // every pixel qualifies
    REQUIRE(y1 == 208.0);
    REQUIRE(y2 == 844.0);
    REQUIRE_THROWS_AS(strip_extent(strip, g, 200), EmptyEdgeError);
    REQUIRE(center_abscissa(104.0, 759.0) == 431.5);
    REQUIRE_THROWS_AS(center_abscissa(10.0, 5.0), std::invalid_argument);
}

TEST_CASE("displacement estimates and their error percentages are exact") {
    StripReport baseline;
    baseline.center_mm = 526.0;
    const auto state_with_center = [](double c) {
        StripReport s;
        s.center_mm = c;
        return s;
    };

    DisplacementReport r1 = estimate_displacement(baseline, state_with_center(514.5), 10.0);
    REQUIRE(r1.displacement_mm == 11.5);
    REQUIRE(*r1.error_pct == 15.0);

    DisplacementReport r2 = estimate_displacement(baseline, state_with_center(501.0), 20.0);
    REQUIRE(r2.displacement_mm == 25.0);
    REQUIRE(*r2.error_pct == 25.0);

    DisplacementReport r3 = estimate_displacement(baseline, state_with_center(479.0), 40.0);
    REQUIRE(r3.displacement_mm == 47.0);
    REQUIRE(*r3.error_pct == 17.5);

    StripReport das_baseline;
    das_baseline.center_mm = 431.5;
    DisplacementReport r4 = estimate_displacement(das_baseline, state_with_center(411.0), 20.0);
    REQUIRE(r4.displacement_mm == 20.5);
    REQUIRE(*r4.error_pct == 2.5);

    const DisplacementReport no_actual =
        estimate_displacement(baseline, state_with_center(500.0));
    REQUIRE_FALSE(no_actual.actual_mm.has_value());
    REQUIRE_FALSE(no_actual.error_pct.has_value());
    REQUIRE_THROWS_AS(estimate_displacement(baseline, state_with_center(500.0), 0.0),
                      std::invalid_argument);
}
