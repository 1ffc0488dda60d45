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
#include "cfmimo/propagation.hpp"

#include <doctest.h>

#include <cmath>

using namespace cfmimo;

TEST_CASE("path_loss: flat inside the reference distance, power law beyond") {
    RadioParams p;
    CHECK(path_loss(0.5, p) == 1.0);
    CHECK(path_loss(1.0, p) == 1.0);
    CHECK(path_loss(1.0 + 1e-12, p) == doctest::Approx(1.0));
    CHECK(path_loss(2.0, p) < path_loss(3.0, p));
    CHECK(path_loss(500.0, p) == doctest::Approx(std::pow(500.0, 3.7)));
    double prev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double l = path_loss(i * 0.5, p);
        REQUIRE(l >= 1.0);
        REQUIRE(l >= prev);
        prev = l;
    }
}

TEST_CASE("path_loss: received SNR at the edge of a 500 m disk") {
    const auto p = RadioParams::from_db(1, 100.0, 100.0, 80);
    const double snr_db = linear_to_db(p.rho_d * large_scale_gain(500.0, p));
    CHECK(std::abs(snr_db - 0.1381) < 1e-3);
}

TEST_CASE("estimation_variance: limits and direct evaluation") {
    auto p = RadioParams::from_db(1, 100.0, 100.0, 80);
    CHECK(estimation_variance(0.0, 0.0, p) == 0.0);

    p.rho_p = 1e12;
    CHECK(estimation_variance(0.3, 0.0, p) == doctest::Approx(0.3).epsilon(1e-6));

    p.rho_p = 1e8;
    const double tr = 80.0 * 1e8, b = 1e-3;
    CHECK(estimation_variance(b, 0.0, p) == doctest::Approx(tr * b * b / (1.0 + tr * b)).epsilon(1e-14));
}

TEST_CASE("estimation_variance: bounded by beta, monotone in rho_p and the copilot sum") {
    auto p = RadioParams::from_db(1, 100.0, 0.0, 10);
    for (double b : {1e-12, 1e-6, 1e-3, 1.0}) {
        double prev = 0.0;
        for (double rho_db = -20.0; rho_db <= 120.0; rho_db += 5.0) {
            p.rho_p = db_to_linear(rho_db);
            const double g = estimation_variance(b, 0.0, p);
            REQUIRE(g <= b);
            REQUIRE(g >= prev);
            prev = g;
        }
        double last = estimation_variance(b, 0.0, p);
        for (double c : {1e-9, 1e-6, 1e-3, 1.0}) {
            const double g = estimation_variance(b, c, p);
            REQUIRE(g <= last);
            last = g;
        }
    }
}

TEST_CASE("compression_split: reference values and exact unit sum") {
    const auto half = compression_split(7.0, 7);
    CHECK(half.rho_q == 0.5);
    CHECK(half.rho_qtilde == 0.5);
    CHECK(compression_split(20.0, 4).scnr() == doctest::Approx(31.0).epsilon(1e-12));
    CHECK(compression_split(1.0, 1'000'000).rho_qtilde == doctest::Approx(1.0).epsilon(1e-6));

    for (double c = 0.5; c <= 100.0; c += 0.5)
        for (int k = 1; k <= 64; ++k) {
            const auto s = compression_split(c, k);
            REQUIRE(s.rho_q + s.rho_qtilde == 1.0);
            REQUIRE(std::abs(s.scnr() - (std::exp2(c / k) - 1.0)) <= 1e-12 * std::exp2(c / k));
        }
    try {
        compression_split(10.0, 0);
        FAIL("expected no-load");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NoLoad);
    }
}

TEST_CASE("compression_split: SCNR decreasing in k, increasing in c_f") {
    for (double c = 1.0; c <= 60.0; c += 1.0)
        for (int k = 1; k < 40; ++k) {
            REQUIRE(compression_split(c, k + 1).scnr() < compression_split(c, k).scnr());
            REQUIRE(compression_split(c + 1.0, k).scnr() > compression_split(c, k).scnr());
        }
}

TEST_CASE("max_scheduled_users: examples and boundary") {
    const double ts = std::pow(10.0, 1.5);
    CHECK(max_scheduled_users(20.0, ts) == 3);
    CHECK(max_scheduled_users(45.0, ts) == 8);
    CHECK(max_scheduled_users(std::log2(1.0 + ts), ts) == 1);
    for (int k = 1; k <= 60; ++k)
        CHECK(max_scheduled_users(k * std::log2(1.0 + ts), ts) == k);
    CHECK_THROWS_AS(max_scheduled_users(10.0, 0.0), Error);
    try {
        max_scheduled_users(10.0, -1.0);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::InvalidTarget);
    }
    const auto fh = FronthaulParams::from_target(45.0, ts);
    CHECK(fh.k_max == 8);
    CHECK(fh.k_max * std::log2(1.0 + ts) <= fh.c_f);
}

TEST_CASE("RadioParams: dB conversion and validation") {
    const auto p = RadioParams::from_db(4, 100.0, 90.0, 80);
    CHECK(p.rho_d == doctest::Approx(1e10));
    CHECK(p.rho_p == doctest::Approx(1e9));
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.tau_p = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = p;
    bad.n_antennas = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}
