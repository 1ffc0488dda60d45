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
#include "cfmimo/load.hpp"
#include "cfmimo/numerics.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>

using namespace cfmimo;
using std::numbers::pi;

TEST_CASE("integrate_1d: polynomial, Gaussian tail and bad input") {
    CHECK(integrate_1d([](double x) { return x; }, 0.0, 1.0).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate_1d([](double x) { return x; }, 2.0, 2.0).value == 0.0);
    const double lambda = 1e-4;
    const double r_max = 6.0 / std::sqrt(2.0 * pi * lambda);
    const auto g = integrate_1d([&](double r) { return 2 * pi * lambda * r * std::exp(-pi * lambda * r * r); }, 0.0,
                                r_max);
    CHECK(g.converged);
    CHECK(g.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 1.0, 0.0), Error);
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 0.0, 1.0, {0.0, 1e-6, 10}), Error);
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 0.0, 1.0, {1e-12, -1.0, 10}), Error);
}

TEST_CASE("integrate_1d: exhausted subdivisions are flagged, not thrown") {
    const auto r = integrate_1d([](double x) { return std::sin(1.0 / (x + 1e-6)); }, 0.0, 1.0, {1e-14, 1e-13, 2});
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("integrate_2d: unit square and triangle") {
    CHECK(integrate_2d([](double x, double y) { return x * y; }, 0, 1, 0, 1).value ==
          doctest::Approx(0.25).epsilon(1e-12));
    // area of {0 <= y <= x <= 1}
    const auto t = integrate_2d([](double, double) { return 1.0; }, 0.0, 1.0,
                                [](double x) { return std::pair{0.0, x}; });
    CHECK(t.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("integrate_qmc: constant, separable 5D oracle and validation") {
    QmcBox box;
    box.bounds = {{0, 2}, {-1, 1}, {0, 3}};
    box.budget = 1 << 14;
    const auto c = integrate_qmc([](std::span<const double>) { return 2.5; }, box);
    CHECK(c.value == doctest::Approx(2.5 * 12.0).epsilon(1e-12));

    // prod_i (a_i + x_i) over [0, 1]^5 has mean prod_i (a_i + 1/2)
    QmcBox b5;
    b5.bounds.assign(5, {0.0, 1.0});
    b5.budget = 1 << 16;
    const double a[5] = {0.1, 0.7, 1.3, 0.2, 2.0};
    double truth = 1.0;
    for (double ai : a)
        truth *= ai + 0.5;
    const auto p = integrate_qmc(
        [&](std::span<const double> x) {
            double v = 1.0;
            for (int i = 0; i < 5; ++i)
                v *= a[i] + x[static_cast<std::size_t>(i)];
            return v;
        },
        b5);
    CHECK(p.error > 0.0);
    CHECK(std::abs(p.value - truth) <= 3.0 * p.error);

    QmcBox bad = box;
    bad.bounds[1] = {1.0, 1.0};
    CHECK_THROWS_AS(integrate_qmc([](std::span<const double>) { return 1.0; }, bad), Error);
    bad = box;
    bad.budget = 9'999;
    CHECK_THROWS_AS(integrate_qmc([](std::span<const double>) { return 1.0; }, bad), Error);
}

TEST_CASE("integrate_qmc: standard error shrinks over budget doublings") {
    QmcBox box;
    box.bounds.assign(4, {0.0, 1.0});
    auto f = [](std::span<const double> x) { return std::exp(x[0] * x[1]) * std::cos(x[2] + x[3]); };
    double prev = 1e300;
    for (int k = 0; k <= 4; ++k) {
        box.budget = std::uint64_t{1} << (14 + k);
        const auto e = integrate_qmc(f, box);
        CHECK(e.error <= prev * 1.1);
        prev = e.error;
    }
}

TEST_CASE("integrate_qmc: results do not depend on the thread count") {
    QmcBox box;
    box.bounds.assign(3, {0.0, 1.0});
    box.budget = 1 << 14;
    auto f = [](std::span<const double> x) { return x[0] * x[0] + std::sin(x[1]) * x[2]; };
    const auto a = integrate_qmc(f, box, 1);
    const auto b = integrate_qmc(f, box, 4);
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
}

TEST_CASE("poisson: pmf and cmf identities") {
    CHECK(poisson_cmf(-1, 3.0) == 0.0);
    CHECK(poisson_pmf(-2, 3.0) == 0.0);
    CHECK(poisson_pmf(0, 0.0) == 1.0);
    CHECK(poisson_pmf(3, 0.0) == 0.0);
    CHECK(poisson_pmf(2, 2.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(poisson_cmf(1, 2.0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));

    const double mu = 7.3;
    const double mean = sum_pmf_weighted([&](long k) { return poisson_pmf(k, mu); },
                                         [](long k) { return static_cast<double>(k); }, 1e-12);
    CHECK(std::abs(mean - mu) <= 1e-9);

    // no overflow at large arguments
    const double big = poisson_pmf(10'000, 1e4);
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(1.0 / std::sqrt(2 * pi * 1e4)).epsilon(1e-3));
    CHECK(poisson_pmf(100'000, 1e4) == 0.0);
    CHECK(poisson_cmf(100'000, 1e4) == doctest::Approx(1.0));

    std::vector<double> table(40);
    poisson_pmf_table(mu, table);
    for (long k = 0; k < 40; ++k)
        CHECK(table[static_cast<std::size_t>(k)] == doctest::Approx(poisson_pmf(k, mu)).epsilon(1e-12));
}

TEST_CASE("poisson_truncation_radius: tail below eps at the returned radius") {
    for (int count : {1, 3, 5, 10}) {
        const double r = poisson_truncation_radius(count, 1e-4, 1e-10);
        CHECK(poisson_cmf(count - 1, pi * 1e-4 * r * r) <= 1e-10 * (1 + 1e-9));
        CHECK(poisson_cmf(count - 1, pi * 1e-4 * 0.99 * r * 0.99 * r) > 1e-10);
    }
}

TEST_CASE("parallel_for: every index once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto &h : hits)
        REQUIRE(h.load() == 1);
    CHECK(default_threads() >= 1);
}

TEST_CASE("tagged first moment: QMC agrees with nested quadrature for N_s <= 3") {
    TaggedLoadOptions opts;
    opts.m2_budget = 1 << 14;  // only the first moment is compared
    for (int n_s = 1; n_s <= 3; ++n_s)
        for (int rank = 1; rank <= n_s; ++rank) {
            const auto q = tagged_load_m1(rank, 1e-4, 1e-4, n_s, opts);
            const auto a = tagged_load_m1_quadrature(rank, 1e-4, 1e-4, n_s, {1e-10, 1e-4, 10});
            CAPTURE(n_s);
            CAPTURE(rank);
            CHECK(std::abs(q.value - a.value) <= 3.0 * (q.error + a.error));
        }
}
