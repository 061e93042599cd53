#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wealthpde/model.hpp"
#include "wealthpde/postprocess.hpp"

using namespace wealthpde;

TEST_CASE("smoothing leaves constants alone") {
    const GridFunction c(9, 1.3);
    for (int passes : {0, 1, 2, 7}) {
        const GridFunction out = smooth(c, passes, 3);
        for (const double v : out) CHECK(v == doctest::Approx(1.3).epsilon(1e-15));
    }
}

TEST_CASE("smoothing preserves affine interiors") {
    const Grid g = Grid::uniform(8.0, 9);
    GridFunction c(9);
    for (int i = 0; i < 9; ++i) c[i] = 2.0 + 0.1 * g.nodes[i];
    const GridFunction out = smooth(c, 1, 3);
    for (int i = 1; i < 8; ++i) CHECK(out[i] == doctest::Approx(c[i]).epsilon(1e-14));
}

TEST_CASE("shrunken boundary windows give the hand-computed means") {
    const GridFunction c = {0.0, 1.0, 0.0, 1.0, 0.0};
    const GridFunction out = smooth(c, 1, 3);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(out[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(out[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(out[4] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("smoothing keeps positive input positive") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(1e-6, 5.0);
    for (int rep = 0; rep < 50; ++rep) {
        GridFunction c(33);
        for (double& v : c) v = val(rng);
        const GridFunction out = smooth(c, 3, 5);
        for (const double v : out) REQUIRE(v > 0.0);
    }
}

TEST_CASE("smoothing is a sup-norm contraction between policies") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> val(0.0, 4.0);
    for (int rep = 0; rep < 30; ++rep) {
        GridFunction a(25), b(25);
        for (int i = 0; i < 25; ++i) {
            a[i] = val(rng);
            b[i] = val(rng);
        }
        const GridFunction sa = smooth(a, 2, 3);
        const GridFunction sb = smooth(b, 2, 3);
        double before = 0.0, after = 0.0;
        for (int i = 0; i < 25; ++i) {
            before = std::max(before, std::abs(a[i] - b[i]));
            after = std::max(after, std::abs(sa[i] - sb[i]));
        }
        REQUIRE(after <= before + 1e-14);
    }
}

TEST_CASE("slope projection on a flat policy walks up at the lower margin") {
    const Grid g = Grid::uniform(2.0, 3);  // da = 1
    const GridFunction c(3, 1.0);
    const GridFunction out = project_slope_band(c, g, 0.1, 0.5);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(out[2] == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("feasible input passes through the projection unchanged") {
    const Grid g = Grid::uniform(10.0, 11);
    GridFunction c(11);
    for (int i = 0; i < 11; ++i) c[i] = 0.5 + 0.3 * g.nodes[i];  // slope 0.3
    const GridFunction out = project_slope_band(c, g, 0.1, 0.5);
    for (int i = 0; i < 11; ++i) CHECK(out[i] == c[i]);
}

TEST_CASE("projection output is always inside the band") {
    const Grid g = Grid::uniform(20.0, 41);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> val(-2.0, 6.0);
    int scanned = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        GridFunction c(41);
        for (double& v : c) v = val(rng);
        const GridFunction out = project_slope_band(c, g, 0.0375, 0.28);
        for (int i = 0; i + 1 < 41; ++i) {
            const double slope = (out[i + 1] - out[i]) / g.da;
            REQUIRE(slope >= 0.0375 - 1e-12);
            REQUIRE(slope <= 0.28 + 1e-12);
            ++scanned;
        }
    }
    CHECK(scanned == 1000 * 40);
}

TEST_CASE("strictly decreasing input comes out strictly increasing") {
    const Grid g = Grid::uniform(5.0, 11);
    GridFunction c(11);
    for (int i = 0; i < 11; ++i) c[i] = 3.0 - 0.2 * g.nodes[i];
    const GridFunction out = project_slope_band(c, g, 0.05, 0.4);
    for (int i = 0; i + 1 < 11; ++i) REQUIRE(out[i + 1] > out[i]);
}

TEST_CASE("projection is idempotent") {
    const Grid g = Grid::uniform(20.0, 31);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> val(-1.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        GridFunction c(31);
        for (double& v : c) v = val(rng);
        const GridFunction once = project_slope_band(c, g, 0.0375, 0.28);
        const GridFunction twice = project_slope_band(once, g, 0.0375, 0.28);
        for (int i = 0; i < 31; ++i) REQUIRE(twice[i] == once[i]);
    }
}

TEST_CASE("full postprocess floors the result") {
    const Grid g = Grid::uniform(4.0, 5);
    const GridFunction c = {-3.0, -2.9, -2.8, -2.9, -3.0};
    PostprocessSettings s;
    const GridFunction out = postprocess(c, g, s);
    for (const double v : out) REQUIRE(v >= kConsumptionFloor);
}

TEST_CASE("disabled postprocess is the identity") {
    const Grid g = Grid::uniform(6.0, 13);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    GridFunction c(13);
    for (double& v : c) v = val(rng);

    PostprocessSettings s;
    s.enabled = false;
    const GridFunction out = postprocess(c, g, s);
    for (int i = 0; i < 13; ++i) CHECK(out[i] == c[i]);
}

TEST_CASE("zero smoothing passes leave projection as the only effect") {
    const Grid g = Grid::uniform(6.0, 13);
    GridFunction c(13);
    for (int i = 0; i < 13; ++i) c[i] = 1.0 + 0.1 * g.nodes[i];

    PostprocessSettings s;
    s.smoothing_passes = 0;
    const GridFunction direct = project_slope_band(c, g, s.slope_lo, s.slope_hi);
    const GridFunction full = postprocess(c, g, s);
    for (int i = 0; i < 13; ++i)
        CHECK(full[i] == doctest::Approx(std::max(direct[i], kConsumptionFloor))
                             .epsilon(1e-15));
}

TEST_CASE("settings validation rejects malformed bands and windows") {
    PostprocessSettings s;
    s.window = 4;
    CHECK_THROWS(s.validate());
    s = PostprocessSettings{};
    s.slope_lo = 0.5;
    s.slope_hi = 0.1;
    CHECK_THROWS(s.validate());
    s = PostprocessSettings{};
    s.smoothing_passes = -1;
    CHECK_THROWS(s.validate());
    CHECK_NOTHROW(PostprocessSettings{}.validate());
}
