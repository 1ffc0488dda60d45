// Copyright 2026 The cfmimo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfmimo/error.hpp"
#include "cfmimo/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace cfmimo;
using std::numbers::pi;

TEST_CASE("sample_bpp: empty, support and mean radius") {
    Rng rng = make_stream(11, 0);
    const DiskRegion disk({0.0, 0.0}, 500.0);
    CHECK(sample_bpp(0, disk, rng).empty());

    const auto pts = sample_bpp(1'000'000, disk, rng);
    REQUIRE(pts.size() == 1'000'000);
    double sum = 0.0;
    bool inside = true;
    for (const auto &p : pts) {
        sum += norm(p);
        inside = inside && disk.contains(p);
    }
    CHECK(inside);
    // mean of r under density 2r / R^2 is 2R/3
    CHECK(sum / 1e6 == doctest::Approx(2.0 * 500.0 / 3.0).epsilon(0.5 / 333.3));
}

TEST_CASE("sample_bpp: off-center region keeps every point inside") {
    Rng rng = make_stream(12, 0);
    const DiskRegion disk({1000.0, -300.0}, 50.0);
    for (const auto &p : sample_bpp(10'000, disk, rng))
        REQUIRE(disk.contains(p));
}

TEST_CASE("sample_ppp: empty process, Poisson mean and Fano factor") {
    Rng rng = make_stream(13, 0);
    const DiskRegion disk({0.0, 0.0}, 2000.0);
    CHECK(sample_ppp(0.0, disk, rng).empty());

    const int trials = 10'000;
    double s = 0.0, ss = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng r = make_stream(14, static_cast<std::uint64_t>(t));
        const auto pts = sample_ppp(1e-4, disk, r);
        for (const auto &p : pts)
            REQUIRE(disk.contains(p));
        const double n = static_cast<double>(pts.size());
        s += n;
        ss += n * n;
    }
    const double mean = s / trials;
    const double var = ss / trials - mean * mean;
    const double expected = pi * 2000.0 * 2000.0 * 1e-4;
    CHECK(mean == doctest::Approx(expected).epsilon(0.01));
    CHECK(var / mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("half_angle_u: hand-evaluated cases and degeneracy") {
    CHECK(half_angle_u(1.0, 2.0, 0.0) == doctest::Approx(0.0));
    CHECK(half_angle_u(1.0, 1.0, pi / 2) == doctest::Approx(pi / 4));
    CHECK(half_angle_u(2.0, 1.0, 0.0) == doctest::Approx(pi));
    CHECK_THROWS_AS(half_angle_u(1.0, 1.0, 0.0), Error);
    try {
        half_angle_u(0.0, 0.0, 1.0);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::DegenerateConfiguration);
    }
    Rng rng = make_stream(15, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = half_angle_u(0.1 + uniform01(rng), 0.1 + uniform01(rng), 2 * pi * uniform01(rng));
        CHECK(u >= 0.0);
        CHECK(u <= pi);
    }
}

TEST_CASE("aoi2: coincident users give the full disk") {
    CHECK(aoi2(3.0, 0.0, 1.234) == doctest::Approx(pi * 9.0));
}

TEST_CASE("aoi2: dart-throwing oracle at r_o = 1, d_x = 1, v_x = pi/2") {
    const double v = aoi2(1.0, 1.0, pi / 2);
    const double mc = oracle::aoi2_darts(1.0, 1.0, pi / 2, 10'000'000, 21);
    CHECK(std::abs(v - mc) / v < 1e-3);
}

TEST_CASE("aoi2: subset bound, symmetry and continuity") {
    Rng rng = make_stream(16, 0);
    for (int i = 0; i < 10'000; ++i) {
        const double r_o = 0.05 + 2.0 * uniform01(rng);
        const double d_x = 3.0 * uniform01(rng);
        const double v_x = 2 * pi * uniform01(rng);
        const double a = aoi2(r_o, d_x, v_x);
        const double r_x = circle_radius_through_ap(r_o, d_x, v_x);
        REQUIRE(a >= 0.0);
        REQUIRE(a <= pi * r_o * r_o * (1 + 1e-12));
        REQUIRE(a <= pi * r_x * r_x * (1 + 1e-12) + 1e-300);
        REQUIRE(aoi2(r_o, d_x, 2 * pi - v_x) == doctest::Approx(a).epsilon(1e-9));
    }
    // continuity in v_x on a fine grid
    double prev = aoi2(1.0, 0.7, 0.0);
    for (int i = 1; i <= 20'000; ++i) {
        const double cur = aoi2(1.0, 0.7, 2 * pi * i / 20'000.0);
        REQUIRE(std::abs(cur - prev) < 1e-3);
        prev = cur;
    }
}

TEST_CASE("aoi3: point case is zero") {
    // three circles through the origin pointing in directions 120 degrees apart
    const auto d = aoi3_detail(1.0, 1.0, 1.0, 2 * pi / 3, 4 * pi / 3);
    CHECK(d.area == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.kind == TripleCase::Point);
    CHECK(d.chords[0] == doctest::Approx(0.0));
    CHECK(d.chords[1] == doctest::Approx(0.0));
    CHECK(d.chords[2] == doctest::Approx(0.0));
}

TEST_CASE("aoi3: lens limit equals the pairwise lens") {
    // a large circle between the other two contains their lens
    const auto d = aoi3_detail(1.0, 1.0, 100.0, 0.5, 0.25);
    CHECK(d.kind == TripleCase::Lens);
    CHECK(d.chords[2] == doctest::Approx(0.0));
    CHECK(d.chords[0] == doctest::Approx(d.chords[1]));
    CHECK(d.area == doctest::Approx(lens_area_common_point(1.0, 1.0, 0.5)).epsilon(1e-9));
}

TEST_CASE("aoi3: dart-throwing oracle at the documented configuration") {
    const double v = aoi3(1.0, 1.2, 0.9, 0.7, 5.1);
    const double mc = oracle::aoi3_darts(1.0, 1.2, 0.9, 0.7, 5.1, 10'000'000, 22);
    REQUIRE(v > 0.0);
    CHECK(std::abs(v - mc) / v < 1e-3);
}

TEST_CASE("aoi3: bounded by every pairwise lens") {
    Rng rng = make_stream(17, 0);
    for (int i = 0; i < 10'000; ++i) {
        const double r[3] = {0.1 + uniform01(rng), 0.1 + uniform01(rng), 0.1 + uniform01(rng)};
        const double vx = 2 * pi * uniform01(rng), vy = 2 * pi * uniform01(rng);
        const double a = aoi3(r[0], r[1], r[2], vx, vy);
        REQUIRE(a >= 0.0);
        REQUIRE(a <= lens_area_common_point(r[0], r[1], vx) * (1 + 1e-9) + 1e-15);
        REQUIRE(a <= lens_area_common_point(r[0], r[2], vy) * (1 + 1e-9) + 1e-15);
        REQUIRE(a <= lens_area_common_point(r[1], r[2], vx - vy) * (1 + 1e-9) + 1e-15);
    }
}

TEST_CASE("aoi2 and aoi3: dart oracle on random configurations") {
    Rng rng = make_stream(18, 0);
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        const double r_o = 0.5 + uniform01(rng);
        const double d_x = 1.5 * uniform01(rng);
        const double v_x = 2 * pi * uniform01(rng);
        const double a = aoi2(r_o, d_x, v_x);
        if (a < 0.05)
            continue;
        const double mc = oracle::aoi2_darts(r_o, d_x, v_x, 1'000'000, 100 + i);
        // 10^6 darts: compare at 5 binomial standard errors
        CHECK(std::abs(a - mc) < 5.0 * oracle::dart_stderr(a, r_o, 1'000'000));
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("pair_angle_uxy: coincident and mirrored users") {
    CHECK(pair_angle_uxy(1.0, 0.6, 0.6, 0.8, 0.8) == doctest::Approx(0.0));
    const double w = half_angle_u(0.6, 1.0, pi / 2);
    CHECK(pair_angle_uxy(1.0, 0.6, 0.6, pi / 2, 3 * pi / 2) == doctest::Approx(2 * w));
}

TEST_CASE("pair_angle_uxy: lens of the two user circles matches darts") {
    Rng rng = make_stream(19, 0);
    for (int i = 0; i < 5; ++i) {
        const double r_o = 1.0;
        const double d_x = 0.2 + uniform01(rng), d_y = 0.2 + uniform01(rng);
        const double v_x = 2 * pi * uniform01(rng), v_y = 2 * pi * uniform01(rng);
        const double r_x = circle_radius_through_ap(r_o, d_x, v_x);
        const double r_y = circle_radius_through_ap(r_o, d_y, v_y);
        const double lens = lens_area_common_point(r_x, r_y, pair_angle_uxy(r_o, d_x, d_y, v_x, v_y));
        const double mc = oracle::pair_lens_darts(r_o, d_x, v_x, d_y, v_y, 4'000'000, 200 + i);
        CHECK(std::abs(lens - mc) < 5.0 * oracle::dart_stderr(lens, std::min(r_x, r_y), 4'000'000) + 1e-9);
    }
}
