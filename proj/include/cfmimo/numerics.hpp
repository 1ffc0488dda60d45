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

// Integration and series engines shared by the load and coverage evaluators.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace cfmimo {

struct Quadrature1D {
    double abs_tol = 1e-12;
    double rel_tol = 1e-6;
    unsigned max_depth = 15; // bisection levels of the adaptive Gauss-Kronrod rule
};

using Quadrature2D = Quadrature1D;

struct Estimate {
    double value = 0.0;
    double error = 0.0;     // error estimate (quadrature) or standard error (QMC)
    bool converged = true;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Exhaustion of max_depth returns the
/// best estimate with converged = false.
Estimate integrate_1d(const std::function<double(double)> &f, double a, double b, const Quadrature1D &tol = {});

/// Nested adaptive quadrature over [ax, bx] x [ay(x), by(x)] with f(x, y).
Estimate integrate_2d(const std::function<double(double, double)> &f, double ax, double bx,
                      const std::function<std::pair<double, double>(double)> &y_range,
                      const Quadrature2D &tol = {});

/// Rectangle convenience overload.
Estimate integrate_2d(const std::function<double(double, double)> &f, double ax, double bx, double ay, double by,
                      const Quadrature2D &tol = {});

struct QmcBox {
    std::vector<std::pair<double, double>> bounds; // per dimension [lo, hi]
    std::uint64_t budget = 1u << 20;               // points per randomization
    int randomizations = 8;
    std::uint64_t seed = 0x5eed;

    double volume() const;
};

/// Randomized quasi-Monte Carlo (Sobol points, independent random shifts) of a
/// vector-valued integrand. `f(x, out)` receives a point in the box and writes
/// `n_out` values; results are integrals over the box with standard errors across
/// randomizations. Randomizations run on `threads` workers; results do not depend
/// on the worker count.
std::vector<Estimate> integrate_qmc(const std::function<void(std::span<const double>, std::span<double>)> &f,
                                    std::size_t n_out, const QmcBox &box, int threads = 0);

/// Scalar convenience overload.
Estimate integrate_qmc(const std::function<double(std::span<const double>)> &f, const QmcBox &box,
                       int threads = 0);

/// Poisson pmf and cmf, log-space; both vanish for n < 0.
double poisson_pmf(long n, double mu);
double poisson_cmf(long n, double mu);

/// pmf(0..n_max) by the multiplicative recurrence; pmf(k) for k > n_max is not formed.
void poisson_pmf_table(double mu, std::span<double> out);

/// sum_k pmf(k) g(k), stopping once the accumulated pmf mass exceeds 1 - tail_eps
/// (or at k_limit).
double sum_pmf_weighted(const std::function<double(long)> &pmf, const std::function<double(long)> &g,
                        double tail_eps = 1e-6, long k_limit = 10'000'000);

/// Smallest radius R with P[Poisson(pi * density * R^2) <= count - 1] < eps, i.e.
/// the distance beyond which fewer than `count` points are inside with negligible
/// probability.
double poisson_truncation_radius(int count, double density, double eps = 1e-10);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware threads).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body);

/// Worker count used when callers pass 0.
int default_threads();

} // namespace cfmimo
