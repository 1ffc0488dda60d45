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

#include "cfmimo/load.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/geometry.hpp"
#include "cfmimo/propagation.hpp"

#include <boost/math/distributions/negative_binomial.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace cfmimo {

namespace {

constexpr double pi = std::numbers::pi;

// The load integrals are evaluated for unit AP density. Lengths scale as
// 1/sqrt(ap_density), so with ratio = user_density / ap_density:
//   E[K_N]   = ratio * I1(N)
//   E[K_N^2] = ratio^2 * I2(N) + E[K_N].

// pmf(0..n-1) of Poisson(mu) by recurrence.
template <std::size_t Cap>
void pmf_row(double mu, int n, std::array<double, Cap> &out) {
    mu = std::max(mu, 0.0);
    out[0] = std::exp(-mu);
    for (int k = 1; k < n; ++k)
        out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k - 1)] * mu / k;
}

// cmf(k) for k = 0..n-1; callers treat negative k as zero mass.
template <std::size_t Cap>
void cmf_row(double mu, int n, std::array<double, Cap> &out) {
    pmf_row(mu, n, out);
    for (int k = 1; k < n; ++k)
        out[static_cast<std::size_t>(k)] += out[static_cast<std::size_t>(k - 1)];
}

constexpr int kMaxServing = 32;
using Row = std::array<double, kMaxServing>;

void check_load_args(double ap_density, double user_density, int n_s) {
    if (!(ap_density > 0.0) || !(user_density > 0.0))
        throw Error(ErrorKind::InvalidArgument, "densities must be positive");
    if (n_s < 1 || n_s > kMaxServing)
        throw Error(ErrorKind::InvalidArgument, "serving-set size must be in 1.." + std::to_string(kMaxServing));
}

// First-moment integrand for every rank, with AP-centered coordinates for the user:
// the user sits at distance r_x from the AP at angle phi from the AP->o direction.
void tagged_m1_integrand(int n_s, double r_o, double r_x, double phi, std::span<double> out) {
    const double lens = lens_area_common_point(r_o, r_x, phi);
    Row in_both{}, o_only{}, x_only{};
    pmf_row(lens, n_s, in_both);
    pmf_row(pi * r_o * r_o - lens, n_s, o_only);
    cmf_row(pi * r_x * r_x - lens, n_s, x_only);
    for (int rank = 1; rank <= n_s; ++rank) {
        double h = 0.0;
        for (int n = 0; n <= rank - 1; ++n)
            h += in_both[static_cast<std::size_t>(n)] * o_only[static_cast<std::size_t>(rank - 1 - n)] *
                 x_only[static_cast<std::size_t>(n_s - 1 - n)];
        out[static_cast<std::size_t>(rank - 1)] = h;
    }
}

// Second-moment pair integrand for every rank. Seven disjoint regions: the triple
// intersection, the three pairwise-only lenses and the three single-disk remainders.
void tagged_m2_integrand(int n_s, double r_o, double r_x, double r_y, double phi_x, double phi_y,
                         std::span<double> out) {
    const double l_ox = lens_area_common_point(r_o, r_x, phi_x);
    const double l_oy = lens_area_common_point(r_o, r_y, phi_y);
    const double l_xy = lens_area_common_point(r_x, r_y, phi_x - phi_y);
    double t = aoi3(r_o, r_x, r_y, phi_x, phi_y);
    t = std::min({t, l_ox, l_oy, l_xy});
    const double a_o = pi * r_o * r_o, a_x = pi * r_x * r_x, a_y = pi * r_y * r_y;

    Row p_oxy{}, p_ox{}, p_oy{}, p_o{}, p_xy{}, c_x{}, c_y{};
    pmf_row(t, n_s, p_oxy);
    pmf_row(l_ox - t, n_s, p_ox);
    pmf_row(l_oy - t, n_s, p_oy);
    pmf_row(a_o - l_ox - l_oy + t, n_s, p_o);
    pmf_row(l_xy - t, n_s, p_xy);
    cmf_row(a_x - l_ox - l_xy + t, n_s, c_x);
    cmf_row(a_y - l_oy - l_xy + t, n_s, c_y);

    // q_sum[a][b] = sum_q P(xy = q) P(x-only <= n_s-1-a-q) P(y-only <= n_s-1-b-q)
    std::array<Row, kMaxServing> q_sum{};
    for (int a = 0; a < n_s; ++a)
        for (int b = 0; b < n_s; ++b) {
            double s = 0.0;
            for (int q = 0; q <= n_s - 1 - std::max(a, b); ++q)
                s += p_xy[static_cast<std::size_t>(q)] * c_x[static_cast<std::size_t>(n_s - 1 - a - q)] *
                     c_y[static_cast<std::size_t>(n_s - 1 - b - q)];
            q_sum[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = s;
        }

    for (int rank = 1; rank <= n_s; ++rank) {
        double h = 0.0;
        for (int n = 0; n <= rank - 1; ++n)
            for (int m = 0; m <= rank - 1 - n; ++m)
                for (int p = 0; p <= rank - 1 - n - m; ++p)
                    h += p_oxy[static_cast<std::size_t>(n)] * p_ox[static_cast<std::size_t>(m)] *
                         p_oy[static_cast<std::size_t>(p)] * p_o[static_cast<std::size_t>(rank - 1 - n - m - p)] *
                         q_sum[static_cast<std::size_t>(n + m)][static_cast<std::size_t>(n + p)];
        out[static_cast<std::size_t>(rank - 1)] = h;
    }
}

struct UnitIntegrals {
    std::vector<Estimate> i1;  // per rank
    std::vector<Estimate> i2;
};

// Radial coordinates are drawn uniformly in area: r = R sqrt(u), r dr = R^2/2 du.
UnitIntegrals unit_tagged_integrals(int n_s, const TaggedLoadOptions &opts) {
    using Key = std::tuple<int, std::uint64_t, std::uint64_t, int, std::uint64_t, double>;
    static std::mutex mu;
    static std::map<Key, UnitIntegrals> cache;
    const Key key{n_s, opts.m1_budget, opts.m2_budget, opts.randomizations, opts.seed, opts.truncation_eps};
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    const double big_r = poisson_truncation_radius(n_s, 1.0, opts.truncation_eps);
    const double half_r2 = 0.5 * big_r * big_r;
    const auto ns = static_cast<std::size_t>(n_s);

    QmcBox box1;
    box1.bounds = {{0.0, 1.0}, {0.0, 1.0}, {0.0, pi}};
    box1.budget = opts.m1_budget;
    box1.randomizations = opts.randomizations;
    box1.seed = opts.seed;
    auto i1 = integrate_qmc(
        [&](std::span<const double> x, std::span<double> out) {
            tagged_m1_integrand(n_s, big_r * std::sqrt(x[0]), big_r * std::sqrt(x[1]), x[2], out);
        },
        ns, box1, opts.threads);
    // 2 pi from the AP angle, 2 from phi in [0, pi), R^2/2 per radial coordinate
    const double f1 = 2.0 * pi * 2.0 * half_r2 * half_r2;
    for (auto &e : i1) {
        e.value *= f1;
        e.error *= f1;
    }

    QmcBox box2;
    box2.bounds = {{0.0, 1.0}, {0.0, 1.0}, {0.0, pi}, {0.0, 1.0}, {0.0, 2.0 * pi}};
    box2.budget = opts.m2_budget;
    box2.randomizations = opts.randomizations;
    box2.seed = splitmix64(opts.seed);
    auto i2 = integrate_qmc(
        [&](std::span<const double> x, std::span<double> out) {
            tagged_m2_integrand(n_s, big_r * std::sqrt(x[0]), big_r * std::sqrt(x[1]), big_r * std::sqrt(x[3]),
                                x[2], x[4], out);
        },
        ns, box2, opts.threads);
    const double f2 = 2.0 * pi * 2.0 * half_r2 * half_r2 * half_r2;
    for (auto &e : i2) {
        e.value *= f2;
        e.error *= f2;
    }

    UnitIntegrals res{std::move(i1), std::move(i2)};
    std::lock_guard lock(mu);
    cache.emplace(key, res);
    return res;
}

void check_rank(int rank, int n_s) {
    if (rank < 1 || rank > n_s)
        throw Error(ErrorKind::InvalidArgument, "rank must be in 1..n_s");
}

} // namespace

std::vector<LoadMoments> tagged_load_moments(double ap_density, double user_density, int n_s,
                                             const TaggedLoadOptions &opts) {
    check_load_args(ap_density, user_density, n_s);
    const auto unit = unit_tagged_integrals(n_s, opts);
    const double ratio = user_density / ap_density;
    std::vector<LoadMoments> out(static_cast<std::size_t>(n_s));
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto &m = out[i];
        m.m1 = ratio * unit.i1[i].value;
        m.m1_error = ratio * unit.i1[i].error;
        m.m2 = ratio * ratio * unit.i2[i].value + m.m1;
        m.m2_error = std::hypot(ratio * ratio * unit.i2[i].error, m.m1_error);
        m.converged = m.m1_error <= opts.rel_tol * m.m1 && m.m2_error <= opts.rel_tol * m.m2;
    }
    return out;
}

Estimate tagged_load_m1(int rank, double ap_density, double user_density, int n_s, const TaggedLoadOptions &opts) {
    check_load_args(ap_density, user_density, n_s);
    check_rank(rank, n_s);
    const auto m = tagged_load_moments(ap_density, user_density, n_s, opts)[static_cast<std::size_t>(rank - 1)];
    return {m.m1, m.m1_error, m.m1_error <= opts.rel_tol * m.m1};
}

Estimate tagged_load_m2(int rank, double ap_density, double user_density, int n_s, const TaggedLoadOptions &opts) {
    check_load_args(ap_density, user_density, n_s);
    check_rank(rank, n_s);
    const auto m = tagged_load_moments(ap_density, user_density, n_s, opts)[static_cast<std::size_t>(rank - 1)];
    return {m.m2, m.m2_error, m.converged};
}

Estimate tagged_load_m1_quadrature(int rank, double ap_density, double user_density, int n_s,
                                   const Quadrature1D &tol) {
    check_load_args(ap_density, user_density, n_s);
    check_rank(rank, n_s);
    const double big_r = poisson_truncation_radius(n_s, 1.0, 1e-10);
    bool ok = true;
    // the typical-user-centered coordinates of the closed form: user x at (d_x, v_x)
    auto h = [&](double r_o, double d_x, double v_x) {
        const double lens = aoi2(r_o, d_x, v_x);
        const double r_x = circle_radius_through_ap(r_o, d_x, v_x);
        double s = 0.0;
        for (int n = 0; n <= rank - 1; ++n)
            s += poisson_pmf(rank - 1 - n, pi * r_o * r_o - lens) * poisson_pmf(n, lens) *
                 poisson_cmf(n_s - n - 1, pi * r_x * r_x - lens);
        return s;
    };
    Quadrature1D inner = tol;
    inner.rel_tol *= 0.1;
    inner.abs_tol *= 0.1;
    auto outer = integrate_1d(
        [&](double r_o) {
            if (r_o <= 0.0)
                return 0.0;
            auto mid = integrate_1d(
                [&](double d_x) {
                    auto in = integrate_1d([&](double v) { return h(r_o, d_x, v); }, 0.0, pi, inner);
                    ok = ok && in.converged;
                    return 2.0 * in.value * d_x;
                },
                0.0, r_o + big_r, inner);
            ok = ok && mid.converged;
            return mid.value * r_o;
        },
        0.0, big_r, tol);
    const double scale = 2.0 * pi * user_density / ap_density;
    return {scale * outer.value, scale * outer.error, ok && outer.converged};
}

LoadMoments typical_load_moments(double ap_density, double user_density, int n_s, const Quadrature1D &tol) {
    check_load_args(ap_density, user_density, n_s);
    const double ratio = user_density / ap_density;
    const double big_r = poisson_truncation_radius(n_s, 1.0, 1e-12);
    auto h = [&](double r_x, double r_y, double u) {
        const double lens = lens_area_common_point(r_x, r_y, u);
        Row both{}, cx{}, cy{};
        pmf_row(lens, n_s, both);
        cmf_row(pi * r_x * r_x - lens, n_s, cx);
        cmf_row(pi * r_y * r_y - lens, n_s, cy);
        double s = 0.0;
        for (int l = 0; l < n_s; ++l)
            s += both[static_cast<std::size_t>(l)] * cx[static_cast<std::size_t>(n_s - 1 - l)] *
                 cy[static_cast<std::size_t>(n_s - 1 - l)];
        return s;
    };
    Quadrature1D inner = tol;
    inner.rel_tol *= 0.1;
    inner.abs_tol *= 0.1;
    double err = 0.0, err_u = 0.0;
    // h is symmetric in (r_x, r_y): integrate r_y <= r_x and double
    auto outer = integrate_1d(
        [&](double r_x) {
            auto mid = integrate_1d(
                [&](double r_y) {
                    auto in = integrate_1d([&](double u) { return h(r_x, r_y, u); }, 0.0, pi, inner);
                    err_u = std::max(err_u, 2.0 * in.error * r_y);
                    return 2.0 * in.value * r_y;
                },
                0.0, r_x, inner);
            err = std::max(err, 2.0 * (mid.error + err_u * r_x) * r_x);
            return 2.0 * mid.value * r_x;
        },
        0.0, big_r, tol);
    LoadMoments m;
    m.m1 = n_s * ratio;
    m.m2 = ratio * ratio * 2.0 * pi * outer.value + m.m1;
    m.m2_error = ratio * ratio * 2.0 * pi * (outer.error + err * big_r);
    // Isolated inner panels may miss their own tolerance; accept the result
    // when the propagated bound meets the requested relative accuracy.
    m.converged = outer.converged && m.m2_error <= std::max(tol.abs_tol, 100.0 * tol.rel_tol * m.m2);
    return m;
}

NegBinParams fit_negbin(const LoadMoments &m) {
    if (!(m.m1 >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "negative first moment");
    if (m.m1 == 0.0)
        return {1.0, 1.0};
    const double v = m.variance();
    if (!(v > m.m1))
        throw Error(ErrorKind::Underdispersed,
                    "variance " + std::to_string(v) + " does not exceed mean " + std::to_string(m.m1));
    return {m.m1 * m.m1 / (v - m.m1), m.m1 / v};
}

LoadPmf::LoadPmf(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    if (p_.empty())
        throw Error(ErrorKind::InvalidArgument, "empty pmf");
    cdf_.resize(p_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) {
        if (!(p_[k] >= 0.0))
            throw Error(ErrorKind::InvalidArgument, "negative probability");
        acc += p_[k];
        cdf_[k] = acc;
    }
}

LoadPmf LoadPmf::negative_binomial(const NegBinParams &nb, double tail_eps) {
    if (nb.p >= 1.0)
        return point_mass_at_zero();
    boost::math::negative_binomial_distribution<double> dist(nb.r, nb.p);
    std::vector<double> p;
    double mass = 0.0;
    for (int k = 0; mass < 1.0 - tail_eps && k < 10'000'000; ++k) {
        const double pk = boost::math::pdf(dist, static_cast<double>(k));
        p.push_back(pk);
        mass += pk;
    }
    return LoadPmf(std::move(p));
}

LoadPmf LoadPmf::poisson(double mean, double tail_eps) {
    if (!(mean > 0.0))
        return point_mass_at_zero();
    std::vector<double> p;
    double mass = 0.0;
    for (long k = 0; mass < 1.0 - tail_eps; ++k) {
        p.push_back(poisson_pmf(k, mean));
        mass += p.back();
    }
    return LoadPmf(std::move(p));
}

LoadPmf LoadPmf::point_mass_at_zero() { return LoadPmf({1.0}); }

LoadPmf LoadPmf::from_samples(const std::vector<int> &counts) {
    if (counts.empty())
        throw Error(ErrorKind::InvalidArgument, "no samples");
    const int top = *std::max_element(counts.begin(), counts.end());
    std::vector<double> p(static_cast<std::size_t>(top) + 1, 0.0);
    for (int c : counts) {
        if (c < 0)
            throw Error(ErrorKind::InvalidArgument, "negative count");
        p[static_cast<std::size_t>(c)] += 1.0;
    }
    for (auto &v : p)
        v /= static_cast<double>(counts.size());
    return LoadPmf(std::move(p));
}

LoadPmf LoadPmf::from_moments(const LoadMoments &m, double tail_eps) {
    try {
        return negative_binomial(fit_negbin(m), tail_eps);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::Underdispersed)
            throw;
        std::clog << "warning: " << e.what() << "; using a Poisson pmf with the same mean\n";
        return poisson(m.m1, tail_eps);
    }
}

double LoadPmf::cdf(int k) const {
    if (k < 0)
        return 0.0;
    return cdf_[static_cast<std::size_t>(std::min(k, k_cap()))];
}

double LoadPmf::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k)
        s += static_cast<double>(k) * p_[k];
    return s;
}

double LoadPmf::second_moment() const {
    double s = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k)
        s += static_cast<double>(k * k) * p_[k];
    return s;
}

double LoadPmf::total_mass() const { return cdf_.back(); }

int LoadPmf::quantile(double u) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        return k_cap();
    return static_cast<int>(it - cdf_.begin());
}

void LoadPmf::write_csv(std::ostream &os) const {
    os << "k,probability\n";
    for (std::size_t k = 0; k < p_.size(); ++k)
        os << k << ',' << p_[k] << '\n';
}

double total_variation(const LoadPmf &a, const LoadPmf &b) {
    const int top = std::max(a.k_cap(), b.k_cap());
    double s = 0.0;
    for (int k = 0; k <= top; ++k)
        s += std::abs(a[k] - b[k]);
    // mass not represented in either table counts fully
    s += std::abs((1.0 - a.total_mass()) - (1.0 - b.total_mass()));
    return 0.5 * s;
}

double scnr_coverage(double c_f, double t_s, const LoadPmf &pmf) {
    return std::clamp(pmf.cdf(max_scheduled_users(c_f, t_s)), 0.0, 1.0);
}

double required_fronthaul(double t_s, double target, const LoadPmf &pmf) {
    if (!(t_s > 0.0))
        throw Error(ErrorKind::InvalidTarget, "SCNR target must be positive");
    if (!(target > 0.0 && target <= pmf.total_mass()))
        throw Error(ErrorKind::InvalidArgument, "coverage target out of reach of the pmf");
    int k = 0;
    while (pmf.cdf(k) < target)
        ++k;
    return std::max(k, 1) * std::log2(1.0 + t_s);
}

double effective_mean_load(int rank, int k_max, const LoadPmf &pmf) {
    if (rank < 2)
        throw Error(ErrorKind::InvalidArgument, "effective mean load is defined for ranks >= 2");
    if (k_max < 1)
        throw Error(ErrorKind::InvalidArgument, "k_max must be >= 1");
    double s = 0.0;
    for (int k = 0; k <= pmf.k_cap(); ++k)
        s += std::min(k, k_max) * pmf[k];
    return 1.0 + s;
}

} // namespace cfmimo
