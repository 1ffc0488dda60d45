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

#include "cfmimo/distances.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/geometry.hpp"
#include "cfmimo/numerics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cfloat>
#include <numbers>

using namespace cfmimo;
using std::numbers::pi;

namespace {

// Shared invariants of every law.
void check_law(const DistanceLaw &law, double kink = -1.0) {
    CHECK(law.cdf(law.lo()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(law.cdf(law.hi()) - 1.0) <= 1e-6);
    const auto norm = integrate_1d([&](double d) { return law.pdf(d); }, law.lo(), law.hi(), {1e-12, 1e-9, 18});
    CHECK(std::abs(norm.value - 1.0) <= 1e-6);
    const double w = law.hi() - law.lo();
    double prev = 0.0;
    for (int i = 1; i < 200; ++i) {
        const double d = law.lo() + w * i / 200.0;
        const double f = law.pdf(d);
        REQUIRE(f >= 0.0);
        REQUIRE(law.cdf(d) >= prev);
        prev = law.cdf(d);
        if (i < 10 || i > 190 || (kink >= 0 && std::abs(d - kink) < 1e-3 * w))
            continue;
        const double h = 1e-5 * w;
        const double fd = (law.cdf(d + h) - law.cdf(d - h)) / (2 * h);
        CAPTURE(d);
        REQUIRE(std::abs(fd - f) <= 1e-4 * f + 4.0 * DBL_EPSILON / h);
    }
}

} // namespace

TEST_CASE("law_center_distance: endpoints, quarter point and mean") {
    const auto law = law_center_distance(500.0);
    check_law(law);
    CHECK(law.cdf(250.0) == doctest::Approx(0.25).epsilon(1e-12));
    const auto mean = integrate_1d([&](double r) { return r * law.pdf(r); }, 0.0, 500.0);
    CHECK(mean.value == doctest::Approx(1000.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("law_user_to_random_ap: centered user, normalization and continuity") {
    const double r_s = 500.0;
    const auto c = law_user_to_random_ap(0.0, r_s);
    for (double d = 0.0; d <= r_s; d += 25.0)
        CHECK(c.pdf(d) == doctest::Approx(2.0 * d / (r_s * r_s)).epsilon(1e-12));
    for (double f : {0.1, 0.5, 0.9}) {
        const double r_o = f * r_s;
        const auto law = law_user_to_random_ap(r_o, r_s);
        CHECK(law.hi() == doctest::Approx(r_s + r_o));
        check_law(law, r_s - r_o);
        const double b = r_s - r_o;
        CHECK(std::abs(law.cdf(b * (1 + 1e-13)) - law.cdf(b * (1 - 1e-13))) < 1e-9);
    }
}

TEST_CASE("law_user_to_random_ap: KS test against uniform APs") {
    const double r_s = 500.0, r_o = 300.0;
    const auto law = law_user_to_random_ap(r_o, r_s);
    Rng rng = make_stream(41, 0);
    const DiskRegion disk({0.0, 0.0}, r_s);
    std::vector<double> d;
    for (const auto &p : sample_bpp(100'000, disk, rng))
        d.push_back(distance(p, {r_o, 0.0}));
    CHECK(oracle::ks_statistic(d, [&](double x) { return law.cdf(x); }) < oracle::ks_critical_001(d.size()));
}

TEST_CASE("law_nearest_of_m: M = 1, stochastic ordering and KS test") {
    const double r_s = 500.0, r_o = 200.0;
    const auto one = law_nearest_of_m(r_o, r_s, 1);
    const auto base = law_user_to_random_ap(r_o, r_s);
    for (double d = 0.0; d <= r_s + r_o; d += 10.0)
        CHECK(one.cdf(d) == doctest::Approx(base.cdf(d)).epsilon(1e-12));
    const auto m8 = law_nearest_of_m(r_o, r_s, 8);
    const auto m32 = law_nearest_of_m(r_o, r_s, 32);
    check_law(m32, r_s - r_o);
    for (double d = 0.0; d <= r_s + r_o; d += 5.0)
        REQUIRE(m32.cdf(d) >= m8.cdf(d));

    Rng rng = make_stream(42, 0);
    const DiskRegion disk({0.0, 0.0}, r_s);
    std::vector<double> nearest;
    for (int t = 0; t < 100'000; ++t) {
        double best = 1e300;
        for (const auto &p : sample_bpp(32, disk, rng))
            best = std::min(best, distance(p, {r_o, 0.0}));
        nearest.push_back(best);
    }
    CHECK(oracle::ks_statistic(nearest, [&](double x) { return m32.cdf(x); }) <
          oracle::ks_critical_001(nearest.size()));
}

TEST_CASE("law_truncated_remaining: no truncation, support and normalization") {
    const double r_s = 500.0, r_o = 150.0;
    const auto base = law_user_to_random_ap(r_o, r_s);
    const auto same = law_truncated_remaining(r_o, r_s, 0.0);
    for (double d = 0.0; d <= r_s + r_o; d += 10.0)
        CHECK(same.cdf(d) == doctest::Approx(base.cdf(d)).epsilon(1e-12));
    const auto t = law_truncated_remaining(r_o, r_s, 120.0);
    check_law(t, r_s - r_o);
    CHECK(t.pdf(100.0) == 0.0);
    CHECK(t.cdf(119.0) == 0.0);
    try {
        law_truncated_remaining(r_o, r_s, r_s + r_o);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::EmptySupport);
    }
}

TEST_CASE("law_ppp_order: Rayleigh case, second moment and KS test") {
    const double lambda = 1e-4;
    const auto one = law_ppp_order(1, lambda);
    for (double d = 1.0; d < 300.0; d += 7.0)
        CHECK(one.pdf(d) == doctest::Approx(2 * pi * lambda * d * std::exp(-pi * lambda * d * d)).epsilon(1e-12));
    for (int n : {1, 2, 5, 10}) {
        const auto law = law_ppp_order(n, lambda);
        check_law(law);
        const auto m2 = integrate_1d([&](double d) { return d * d * law.pdf(d); }, law.lo(), law.hi());
        CHECK(m2.value == doctest::Approx(n / (pi * lambda)).epsilon(1e-6));
    }

    const auto law5 = law_ppp_order(5, lambda);
    const DiskRegion window({0.0, 0.0}, 2000.0);
    std::vector<double> d5;
    d5.reserve(100'000);
    std::vector<double> dist;
    for (int t = 0; t < 100'000; ++t) {
        Rng rng = make_stream(43, static_cast<std::uint64_t>(t));
        dist.clear();
        for (const auto &p : sample_ppp(lambda, window, rng))
            dist.push_back(norm(p));
        REQUIRE(dist.size() >= 5);
        std::nth_element(dist.begin(), dist.begin() + 4, dist.end());
        d5.push_back(dist[4]);
    }
    CHECK(oracle::ks_statistic(d5, [&](double x) { return law5.cdf(x); }) < oracle::ks_critical_001(d5.size()));
}

TEST_CASE("conditional_inner_law: uniform in the disk of radius d_n") {
    const auto law = conditional_inner_law(300.0);
    check_law(law);
    CHECK(law.cdf(150.0) == doctest::Approx(0.25).epsilon(1e-12));
    Rng rng = make_stream(44, 0);
    for (int i = 0; i < 1000; ++i) {
        const double d = law.sample(rng);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= 300.0);
    }
    CHECK(law.inverse_cdf(0.25) == doctest::Approx(150.0).epsilon(1e-8));
}
