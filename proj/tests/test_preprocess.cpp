#include "uwbim/preprocess.hpp"

#include "uwbim/forward_sim.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace uwbim;
using Catch::Approx;

namespace {

BScan small_scan(int rows, int cols, double dt = 2e-11, double t_start = 0.0) {
    BScan b;
    b.geometry = make_linear_scan(0.0, 20.0, rows);
    b.sampling = {dt, cols, t_start};
    b.scans = Eigen::MatrixXd::Zero(rows, cols);
    return b;
}

}  // namespace

TEST_CASE("dead-time removal advances t_start by the cut") {
    BScan b = small_scan(2, 32);
    b.scans(0, 7) = 0.2;   // first sample anywhere above 0.1 * peak
    b.scans(0, 9) = 1.0;   // scan-wide peak
    b.scans(1, 9) = 0.3;
    const BScan aligned = align_time_zero(b, 0.1);

    REQUIRE(aligned.scans(0, 0) == 0.2);
    REQUIRE(aligned.scans(0, 2) == 1.0);
    REQUIRE(aligned.scans(1, 2) == 0.3);
    REQUIRE(aligned.sampling.t_start_s == 7 * 2e-11);
    REQUIRE(aligned.sampling.n_samples == 32);
    // the tail vacated by the shift is zero-filled
    for (int n = 32 - 7; n < 32; ++n) REQUIRE(aligned.scans(0, n) == 0.0);
    // sample instants are preserved: what was at 9*dt still is
    REQUIRE(aligned.sampling.time_at(2) == Approx(9 * 2e-11));
}

TEST_CASE("alignment triggers on magnitudes strictly above the threshold") {
    BScan b = small_scan(2, 16);
    b.scans(0, 3) = 0.1;   // exactly the threshold: must not trigger
    b.scans(1, 5) = -0.4;  // negative excursions count via magnitude
    b.scans(0, 8) = 1.0;
    const BScan aligned = align_time_zero(b, 0.1);
    REQUIRE(aligned.scans(1, 0) == -0.4);
    REQUIRE(aligned.sampling.t_start_s == 5 * 2e-11);
}

TEST_CASE("already-aligned scans pass through unchanged") {
    BScan b = small_scan(2, 16);
    b.scans(1, 0) = 0.9;
    b.scans(0, 4) = 0.5;
    const BScan aligned = align_time_zero(b, 0.1);
    REQUIRE((aligned.scans - b.scans).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(aligned.sampling.t_start_s == b.sampling.t_start_s);
}

TEST_CASE("alignment argument validation") {
    BScan zero = small_scan(2, 16);
    REQUIRE_THROWS_AS(align_time_zero(zero, 0.1), NoSignalError);
    BScan b = small_scan(2, 16);
    b.scans(0, 0) = 1.0;
    REQUIRE_THROWS_AS(align_time_zero(b, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(align_time_zero(b, 1.0), std::invalid_argument);
}

TEST_CASE("gate keeps interior samples bit-identical and zeroes the rest") {
    BScan b = small_scan(3, 64);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 64; ++n) b.scans(k, n) = uni(rng);

    const double dt = b.sampling.dt_s;
    const BScan gated = time_gate(b, 10 * dt, 50 * dt, 4);

    for (int n = 0; n < 10; ++n) REQUIRE(gated.scans.col(n).cwiseAbs().maxCoeff() == 0.0);
    for (int n = 51; n < 64; ++n) REQUIRE(gated.scans.col(n).cwiseAbs().maxCoeff() == 0.0);
    // deeper than the taper on both sides: untouched, not just approximately
    for (int n = 14; n <= 46; ++n)
        REQUIRE((gated.scans.col(n) - b.scans.col(n)).cwiseAbs().maxCoeff() == 0.0);
    // ramp weights follow the raised cosine in (into + 1) / (taper + 1)
    for (int into = 0; into < 4; ++into) {
        const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * (into + 1) / 5.0));
        REQUIRE(gated.scans(0, 10 + into) == Approx(w * b.scans(0, 10 + into)));
        REQUIRE(gated.scans(0, 50 - into) == Approx(w * b.scans(0, 50 - into)));
    }
}

TEST_CASE("gate bounds that hit sample instants keep those samples") {
    BScan b = small_scan(2, 32);
    b.scans.setOnes();
    const double dt = b.sampling.dt_s;
    const BScan gated = time_gate(b, 5 * dt, 9 * dt, 0);
    for (int n = 5; n <= 9; ++n) REQUIRE(gated.scans(0, n) == 1.0);
    REQUIRE(gated.scans(0, 4) == 0.0);
    REQUIRE(gated.scans(0, 10) == 0.0);
}

TEST_CASE("a gate between two sample instants yields an all-zero scan") {
    BScan b = small_scan(2, 32);
    b.scans.setOnes();
    const BScan gated = time_gate(b, 3.1e-11, 3.9e-11, 8);  // no sample in (1.55, 1.95) dt
    REQUIRE(gated.scans.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(gated.sampling.n_samples == 32);
}

TEST_CASE("gate argument validation") {
    BScan b = small_scan(2, 32);
    b.scans.setOnes();
    const double dt = b.sampling.dt_s;
    REQUIRE_THROWS_AS(time_gate(b, 5 * dt, 5 * dt, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(time_gate(b, -dt, 5 * dt, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(time_gate(b, 5 * dt, 40 * dt, 8), std::invalid_argument);  // past the record
    REQUIRE_THROWS_AS(time_gate(b, 5 * dt, 9 * dt, -1), std::invalid_argument);
}

TEST_CASE("subtracting a background recording isolates the added target") {
    const ScanGeometry g = make_linear_scan(0.0, 20.0, 6, {}, {}, 3e11);
    const PulseSpec pulse{4.7e9, 3.2e9, 1.0, 2e-9};
    const SamplingSpec sampling{2e-11, 512, 0.0};

    // echoes at 400 mm and 1000 mm depth never share a sample, so the
    // subtraction cancels the background contribution exactly
    SceneModel background_scene;
    background_scene.scatterers.push_back({{30.0, 400.0}, 1.0});
    SceneModel full_scene = background_scene;
    full_scene.scatterers.push_back({{80.0, 1000.0}, 0.6});
    SceneModel target_scene;
    target_scene.scatterers.push_back({{80.0, 1000.0}, 0.6});

    const BScan full = simulate_bscan(full_scene, g, pulse, sampling, 1);
    const BScan background = simulate_bscan(background_scene, g, pulse, sampling, 1);
    const BScan target = simulate_bscan(target_scene, g, pulse, sampling, 1);

    const BScan isolated = background_subtract(full, background);
    REQUIRE((isolated.scans - target.scans).cwiseAbs().maxCoeff() == 0.0);

    BScan other = background;
    other.sampling.t_start_s += 1e-11;
    REQUIRE_THROWS_AS(background_subtract(full, other), std::invalid_argument);
}
