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

#include "cfmimo/numerics.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/random.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace cfmimo {

Estimate integrate_1d(const std::function<double(double)> &f, double a, double b, const Quadrature1D &tol) {
    if (!(a <= b))
        throw Error(ErrorKind::InvalidArgument, "integration bounds out of order");
    if (!(tol.abs_tol > 0.0 && tol.rel_tol > 0.0))
        throw Error(ErrorKind::InvalidArgument, "quadrature tolerances must be positive");
    if (a == b)
        return {};
    double err = 0.0, l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, tol.max_depth, tol.rel_tol, &err, &l1);
    const bool ok = err <= std::max(tol.abs_tol, tol.rel_tol * std::abs(value)) || err <= tol.rel_tol * l1;
    return {value, err, ok};
}

Estimate integrate_2d(const std::function<double(double, double)> &f, double ax, double bx,
                      const std::function<std::pair<double, double>(double)> &y_range, const Quadrature2D &tol) {
    bool ok = true;
    double inner_err = 0.0;
    Quadrature1D inner = tol;
    inner.rel_tol = tol.rel_tol * 0.1;
    inner.abs_tol = tol.abs_tol * 0.1;
    auto outer_f = [&](double x) {
        const auto [lo, hi] = y_range(x);
        if (!(hi > lo))
            return 0.0;
        const auto r = integrate_1d([&](double y) { return f(x, y); }, lo, hi, inner);
        ok = ok && r.converged;
        inner_err = std::max(inner_err, r.error);
        return r.value;
    };
    auto res = integrate_1d(outer_f, ax, bx, tol);
    res.converged = res.converged && ok;
    res.error += inner_err * (bx - ax);
    return res;
}

Estimate integrate_2d(const std::function<double(double, double)> &f, double ax, double bx, double ay, double by,
                      const Quadrature2D &tol) {
    return integrate_2d(f, ax, bx, [=](double) { return std::pair{ay, by}; }, tol);
}

double QmcBox::volume() const {
    double v = 1.0;
    for (const auto &[lo, hi] : bounds)
        v *= hi - lo;
    return v;
}

std::vector<Estimate> integrate_qmc(const std::function<void(std::span<const double>, std::span<double>)> &f,
                                    std::size_t n_out, const QmcBox &box, int threads) {
    const std::size_t dim = box.bounds.size();
    if (dim == 0)
        throw Error(ErrorKind::InvalidArgument, "QMC box has no dimensions");
    for (const auto &[lo, hi] : box.bounds)
        if (!(lo < hi))
            throw Error(ErrorKind::InvalidArgument, "QMC box bounds must satisfy lo < hi");
    if (box.budget < 10'000)
        throw Error(ErrorKind::InvalidArgument, "QMC budget below 10^4 points");
    if (box.randomizations < 2)
        throw Error(ErrorKind::InvalidArgument, "QMC needs at least two randomizations for an error bar");

    const auto reps = static_cast<std::size_t>(box.randomizations);
    const double volume = box.volume();
    std::vector<std::vector<double>> means(reps, std::vector<double>(n_out, 0.0));

    parallel_for(reps, threads, [&](std::size_t rep) {
        Rng rng = make_stream(box.seed, rep);
        std::vector<double> shift(dim);
        for (auto &s : shift)
            s = uniform01(rng);
        boost::random::sobol gen(dim);
        std::vector<double> x(dim), vals(n_out), acc(n_out, 0.0);
        const double scale = 0x1.0p-64;
        for (std::uint64_t i = 0; i < box.budget; ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                double u = static_cast<double>(gen()) * scale + shift[d];
                if (u >= 1.0)
                    u -= 1.0;
                const auto [lo, hi] = box.bounds[d];
                x[d] = lo + (hi - lo) * u;
            }
            std::fill(vals.begin(), vals.end(), 0.0);
            f(x, vals);
            for (std::size_t k = 0; k < n_out; ++k)
                acc[k] += vals[k];
        }
        for (std::size_t k = 0; k < n_out; ++k)
            means[rep][k] = volume * acc[k] / static_cast<double>(box.budget);
    });

    std::vector<Estimate> out(n_out);
    const double r = static_cast<double>(reps);
    for (std::size_t k = 0; k < n_out; ++k) {
        double m = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep)
            m += means[rep][k];
        m /= r;
        double ss = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep)
            ss += (means[rep][k] - m) * (means[rep][k] - m);
        out[k] = {m, std::sqrt(ss / (r - 1.0) / r), true};
    }
    return out;
}

Estimate integrate_qmc(const std::function<double(std::span<const double>)> &f, const QmcBox &box, int threads) {
    auto res = integrate_qmc([&](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, 1, box,
                             threads);
    return res[0];
}

double poisson_pmf(long n, double mu) {
    if (n < 0)
        return 0.0;
    if (!(mu >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "Poisson mean must be nonnegative");
    if (mu == 0.0)
        return n == 0 ? 1.0 : 0.0;
    const double dn = static_cast<double>(n);
    return std::exp(dn * std::log(mu) - mu - std::lgamma(dn + 1.0));
}

double poisson_cmf(long n, double mu) {
    if (n < 0)
        return 0.0;
    if (!(mu >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "Poisson mean must be nonnegative");
    if (mu == 0.0)
        return 1.0;
    return boost::math::gamma_q(static_cast<double>(n) + 1.0, mu);
}

void poisson_pmf_table(double mu, std::span<double> out) {
    if (out.empty())
        return;
    mu = std::max(mu, 0.0);
    out[0] = std::exp(-mu);
    for (std::size_t k = 1; k < out.size(); ++k)
        out[k] = out[k - 1] * mu / static_cast<double>(k);
}

double sum_pmf_weighted(const std::function<double(long)> &pmf, const std::function<double(long)> &g,
                        double tail_eps, long k_limit) {
    double mass = 0.0, total = 0.0;
    for (long k = 0; k <= k_limit; ++k) {
        const double p = pmf(k);
        mass += p;
        total += p * g(k);
        if (mass >= 1.0 - tail_eps)
            break;
    }
    return total;
}

double poisson_truncation_radius(int count, double density, double eps) {
    if (!(density > 0.0) || count < 1)
        throw Error(ErrorKind::InvalidArgument, "truncation radius needs density > 0 and count >= 1");
    double lo = 0.0, hi = 1.0;
    while (poisson_cmf(count - 1, hi) >= eps)
        hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poisson_cmf(count - 1, mid) >= eps ? lo : hi) = mid;
    }
    return std::sqrt(hi / (std::numbers::pi * density));
}

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(threads > 0 ? threads : default_threads()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace cfmimo
