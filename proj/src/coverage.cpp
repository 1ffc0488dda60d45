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

#include "cfmimo/coverage.hpp"

#include "cfmimo/distances.hpp"
#include "cfmimo/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

namespace cfmimo {

namespace {

constexpr double pi = std::numbers::pi;

double sqrt_gamma(double beta, double tr) { return std::sqrt(tr) * beta / std::sqrt(1.0 + tr * beta); }

// Nearest-AP distance cdf given r_o.
double nearest_cdf(const DistanceLaw &single, int m, double d) {
    return 1.0 - std::pow(1.0 - single.cdf(d), static_cast<double>(m));
}

// Per radial node: the nearest-AP distance at probabilities j / J and the three
// approximated sums there. Independent of K, C_f, N_a and rho_d.
struct TraditionalTable {
    std::vector<double> weights;                           // include the r_o density
    std::vector<std::vector<std::array<double, 3>>> terms; // [node][j]
    bool converged = true;
};

using TableKey = std::tuple<int, double, double, double, double, int, int>;

std::shared_ptr<const TraditionalTable> traditional_table(const TraditionalConfig &cfg,
                                                          const TraditionalOptions &opts) {
    static std::mutex mu;
    static std::map<TableKey, std::shared_ptr<const TraditionalTable>> cache;
    const TableKey key{cfg.m,           cfg.r_s,           cfg.radio.tau_p * cfg.radio.rho_p,
                       cfg.radio.alpha, cfg.radio.d_ref,   opts.radial_panels,
                       opts.quantile_grid};
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    if (opts.radial_panels < 1 || opts.quantile_grid < 2 || opts.quantile_grid % 2 != 0)
        throw Error(ErrorKind::InvalidArgument, "radial panels >= 1 and an even quantile grid >= 2 required");

    // r_o = R_s sqrt(u) with u uniform on [0, 1], Gauss-Legendre panels in u
    using GL = boost::math::quadrature::gauss<double, 30>;
    const auto &xs = GL::abscissa();
    const auto &ws = GL::weights();
    std::vector<double> us, wts;
    const double panel = 1.0 / opts.radial_panels;
    for (int p = 0; p < opts.radial_panels; ++p) {
        const double mid = (p + 0.5) * panel, half = 0.5 * panel;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            us.push_back(mid - half * xs[i]);
            wts.push_back(half * ws[i]);
            us.push_back(mid + half * xs[i]);
            wts.push_back(half * ws[i]);
        }
    }

    auto table = std::make_shared<TraditionalTable>();
    table->weights = wts;
    table->terms.resize(us.size());
    const int grid = opts.quantile_grid;
    std::vector<char> ok(us.size(), 1);
    parallel_for(us.size(), 0, [&](std::size_t node) {
        const double r_o = cfg.r_s * std::sqrt(us[node]);
        const auto single = law_user_to_random_ap(r_o, cfg.r_s);
        const double hi = cfg.r_s + r_o;
        auto &row = table->terms[node];
        row.resize(static_cast<std::size_t>(grid) + 1);
        double lo_bracket = 0.0;
        for (int j = 0; j <= grid; ++j) {
            const double p = static_cast<double>(j) / grid;
            double d;
            if (j == 0) {
                d = 0.0;
            } else if (j == grid) {
                d = hi;
            } else {
                double a = lo_bracket, b = hi;
                while (b - a > 1e-10 * hi) {
                    const double mid = 0.5 * (a + b);
                    (nearest_cdf(single, cfg.m, mid) < p ? a : b) = mid;
                }
                d = 0.5 * (a + b);
                lo_bracket = a;
            }
            const auto t = approx_signal_terms(d, r_o, cfg);
            ok[node] = ok[node] && t.converged;
            row[static_cast<std::size_t>(j)] = {t.i1, t.i2, t.i3};
        }
    });
    table->converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });

    std::lock_guard lock(mu);
    cache.emplace(key, table);
    return table;
}

// Probability that SINR exceeds theta, from the table; `stride` 2 uses every other grid point.
double table_coverage(const TraditionalTable &table, const std::vector<std::vector<double>> &sinr, double theta,
                      int stride) {
    double total = 0.0;
    for (std::size_t node = 0; node < sinr.size(); ++node) {
        const auto &s = sinr[node];
        const std::size_t n = s.size() - 1;
        double covered = 0.0;
        for (std::size_t j = 0; j + static_cast<std::size_t>(stride) <= n; j += static_cast<std::size_t>(stride)) {
            const double a = s[j] - theta;
            const double b = s[j + static_cast<std::size_t>(stride)] - theta;
            double frac;
            if (a > 0.0 && b > 0.0)
                frac = 1.0;
            else if (a <= 0.0 && b <= 0.0)
                frac = 0.0;
            else
                frac = a > 0.0 ? a / (a - b) : b / (b - a);
            covered += frac * stride;
        }
        total += table.weights[node] * covered / static_cast<double>(n);
    }
    return std::clamp(total, 0.0, 1.0);
}

std::vector<std::vector<double>> table_sinr(const TraditionalTable &table, const TraditionalConfig &cfg) {
    std::vector<std::vector<double>> out(table.terms.size());
    for (std::size_t node = 0; node < out.size(); ++node) {
        const auto &row = table.terms[node];
        out[node].resize(row.size());
        for (std::size_t j = 0; j < row.size(); ++j)
            out[node][j] = approx_sinr({row[j][0], row[j][1], row[j][2], true}, cfg);
    }
    return out;
}

} // namespace

void CoverageCurve::write_csv(std::ostream &os) const {
    os << "threshold,probability,stderr\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        os << thresholds[i] << ',' << probabilities[i] << ',' << (i < errors.size() ? errors[i] : 0.0) << '\n';
}

void TraditionalConfig::validate() const {
    radio.validate();
    if (m < 1 || k < 1)
        throw Error(ErrorKind::InvalidConfiguration, "need at least one AP and one user");
    if (!(r_s > 0.0))
        throw Error(ErrorKind::InvalidConfiguration, "disk radius must be positive");
    if (radio.tau_p < k)
        throw Error(ErrorKind::InvalidConfiguration, "orthogonal pilots need tau_p >= K");
    if (!(c_f > 0.0))
        throw Error(ErrorKind::InvalidConfiguration, "fronthaul capacity must be positive");
    if (m * radio.n_antennas < 2 * k)
        std::clog << "warning: M * N_a = " << m * radio.n_antennas << " is small compared with K = " << k << '\n';
}

void UserCentricConfig::validate() const {
    radio.validate();
    if (!(ap_density > 0.0) || !(user_density > 0.0))
        throw Error(ErrorKind::InvalidConfiguration, "densities must be positive");
    if (n_s < 1)
        throw Error(ErrorKind::InvalidConfiguration, "n_s must be >= 1");
    if (!(radio.alpha > 2.0))
        throw Error(ErrorKind::InvalidConfiguration, "out-of-cluster interference needs alpha > 2");
    if (fronthaul.k_max < 1)
        throw Error(ErrorKind::InvalidConfiguration, "fronthaul admits no user (k_max = 0)");
}

SignalTerms approx_signal_terms(double d_oo, double r_o, const TraditionalConfig &cfg) {
    const double hi = cfg.r_s + r_o;
    if (!(d_oo >= 0.0 && d_oo <= hi))
        throw Error(ErrorKind::InvalidArgument, "nearest-AP distance outside the support");
    const double tr = cfg.radio.tau_p * cfg.radio.rho_p;
    const double b0 = large_scale_gain(d_oo, cfg.radio);
    const double sg0 = sqrt_gamma(b0, tr);
    SignalTerms t{sg0, sg0 * sg0, b0, true};
    if (cfg.m == 1)
        return t;
    const auto single = law_user_to_random_ap(r_o, cfg.r_s);
    const double rest = 1.0 - single.cdf(d_oo);
    if (!(rest > 1e-15) || d_oo >= hi)
        return t;
    // integrand kinks: the pdf branch point and the flat part of the path loss
    std::vector<double> cuts{d_oo};
    for (double c : {cfg.r_s - r_o, cfg.radio.d_ref})
        if (c > d_oo && c < hi)
            cuts.push_back(c);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    const Quadrature1D tol{1e-15, 1e-7, 15};
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    double err1 = 0.0, err2 = 0.0, err3 = 0.0;
    const double branch = cfg.r_s - r_o;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        // beyond the branch point the pdf has square-root ends; r = a + (b - a)(1 - cos w)/2 smooths them
        const bool outer = a >= branch;
        auto integrate = [&](auto g) {
            if (!outer)
                return integrate_1d([&](double r) { return g(r) * single.pdf(r); }, a, b, tol);
            const double h = 0.5 * (b - a);
            return integrate_1d(
                [&](double w) {
                    const double r = a + h * (1.0 - std::cos(w));
                    return g(r) * single.pdf(r) * h * std::sin(w);
                },
                0.0, pi, tol);
        };
        const auto e1 = integrate([&](double r) { return sqrt_gamma(large_scale_gain(r, cfg.radio), tr); });
        const auto e2 = integrate([&](double r) {
            const double g = sqrt_gamma(large_scale_gain(r, cfg.radio), tr);
            return g * g;
        });
        const auto e3 = integrate([&](double r) { return large_scale_gain(r, cfg.radio); });
        s1 += e1.value;
        s2 += e2.value;
        s3 += e3.value;
        err1 += e1.error;
        err2 += e2.error;
        err3 += e3.error;
    }
    // judged on the whole range; short pieces next to the sqrt-type endpoints carry little mass
    t.converged = err1 <= 1e-6 * s1 + tol.abs_tol && err2 <= 1e-6 * s2 + tol.abs_tol && err3 <= 1e-6 * s3 + tol.abs_tol;
    const double scale = (cfg.m - 1) / rest;
    t.i1 += scale * s1;
    t.i2 += scale * s2;
    t.i3 += scale * s3;
    return t;
}

double approx_sinr(const SignalTerms &terms, const TraditionalConfig &cfg) {
    const auto split = compression_split(cfg.c_f, cfg.k);
    const double scale = cfg.radio.rho_d * cfg.radio.n_antennas / cfg.k;
    return scale * split.rho_q * terms.i1 * terms.i1 /
           (scale * split.rho_qtilde * terms.i2 + cfg.radio.rho_d * terms.i3 + 1.0);
}

CoverageCurve coverage_curve_traditional(const TraditionalConfig &cfg, const std::vector<double> &thresholds,
                                         const TraditionalOptions &opts) {
    cfg.validate();
    const auto table = traditional_table(cfg, opts);
    if (!table->converged)
        throw Error(ErrorKind::Unconverged, "approx_signal_terms: conditional mean integrals did not converge");
    const auto sinr = table_sinr(*table, cfg);
    CoverageCurve curve;
    curve.method = "analytic";
    for (double t : thresholds) {
        if (!(t > 0.0))
            throw Error(ErrorKind::InvalidArgument, "rate threshold must be positive");
        const double theta = std::exp2(t) - 1.0;
        const double fine = table_coverage(*table, sinr, theta, 1);
        const double coarse = table_coverage(*table, sinr, theta, 2);
        curve.thresholds.push_back(t);
        curve.probabilities.push_back(fine);
        curve.errors.push_back(std::abs(fine - coarse));
    }
    return curve;
}

Estimate rate_coverage_traditional(const TraditionalConfig &cfg, double t_r, const TraditionalOptions &opts) {
    const auto c = coverage_curve_traditional(cfg, {t_r}, opts);
    return {c.probabilities[0], c.errors[0], true};
}

MeanRate mean_user_rate(const CoverageCurve &curve, bool literal) {
    if (curve.thresholds.empty())
        throw Error(ErrorKind::InvalidArgument, "empty coverage curve");
    std::vector<double> t = curve.thresholds, p = curve.probabilities;
    if (t.front() > 0.0) {
        t.insert(t.begin(), 0.0);
        p.insert(p.begin(), 1.0);
    }
    auto g = [&](std::size_t i) { return literal ? t[i] * p[i] : p[i]; };
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        area += 0.5 * (g(i) + g(i + 1)) * (t[i + 1] - t[i]);
    MeanRate out;
    const std::size_t n = t.size() - 1;
    out.curve_too_short = p[n] >= 1e-3;
    if (n >= 1 && p[n] > 0.0 && p[n - 1] > p[n]) {
        const double kappa = std::log(p[n - 1] / p[n]) / (t[n] - t[n - 1]);
        area += literal ? p[n] * (t[n] / kappa + 1.0 / (kappa * kappa)) : p[n] / kappa;
    }
    out.value = area;
    return out;
}

MeanRate mean_rate_traditional(const TraditionalConfig &cfg, double step, const TraditionalOptions &opts) {
    cfg.validate();
    const auto table = traditional_table(cfg, opts);
    if (!table->converged)
        throw Error(ErrorKind::Unconverged, "approx_signal_terms: conditional mean integrals did not converge");
    const auto sinr = table_sinr(*table, cfg);
    CoverageCurve curve;
    for (int i = 1; i <= 4000; ++i) {
        const double t = i * step;
        const double pr = table_coverage(*table, sinr, std::exp2(t) - 1.0, 1);
        curve.thresholds.push_back(t);
        curve.probabilities.push_back(pr);
        if (pr < 1e-4)
            break;
    }
    return mean_user_rate(curve);
}

SumRateScan sum_rate_scan(const TraditionalConfig &base, const std::vector<int> &users, double step,
                          const TraditionalOptions &opts) {
    if (users.empty())
        throw Error(ErrorKind::InvalidArgument, "empty user grid");
    SumRateScan scan;
    double best = -1.0;
    for (int k : users) {
        TraditionalConfig cfg = base;
        cfg.k = k;
        const double v = k * mean_rate_traditional(cfg, step, opts).value;
        scan.users.push_back(k);
        scan.sum_rate.push_back(v);
        if (v > best) {
            best = v;
            scan.argmax = k;
        }
    }
    return scan;
}

double out_of_cluster_mean(double d, double ap_density, const RadioParams &radio) {
    if (!(radio.alpha > 2.0))
        throw Error(ErrorKind::InvalidArgument, "alpha must exceed 2");
    const double d0 = radio.d_ref;
    const double a = radio.alpha;
    if (d >= d0)
        return 2.0 * pi * ap_density * std::pow(d0, a) * std::pow(d, 2.0 - a) / (a - 2.0);
    return 2.0 * pi * ap_density * (0.5 * (d0 * d0 - d * d) + d0 * d0 / (a - 2.0));
}

UserCentricLoads user_centric_loads(const UserCentricConfig &cfg, const TaggedLoadOptions &load_opts) {
    cfg.validate();
    UserCentricLoads out;
    out.tagged = tagged_load_moments(cfg.ap_density, cfg.user_density, cfg.n_s, load_opts);
    for (std::size_t i = 0; i < out.tagged.size(); ++i)
        if (!out.tagged[i].converged)
            throw Error(ErrorKind::Unconverged,
                        "tagged_load_moments: rank " + std::to_string(i + 1) + " standard error above tolerance");
    out.pmf_k1 = LoadPmf::from_moments(out.tagged[0]);
    out.kbar.assign(static_cast<std::size_t>(cfg.n_s), 0.0);
    for (int i = 2; i <= cfg.n_s; ++i)
        out.kbar[static_cast<std::size_t>(i - 1)] = effective_mean_load(
            i, cfg.fronthaul.k_max, LoadPmf::from_moments(out.tagged[static_cast<std::size_t>(i - 1)]));
    return out;
}

CoverageCurve coverage_curve_user_centric(const UserCentricConfig &cfg, const std::vector<double> &thresholds,
                                          const LoadPmf &pmf_k1, const std::vector<double> &kbar,
                                          const UserCentricOptions &opts) {
    cfg.validate();
    if (static_cast<int>(kbar.size()) < cfg.n_s)
        throw Error(ErrorKind::InvalidArgument, "kbar needs one entry per serving rank");
    for (double t : thresholds)
        if (!(t > 0.0))
            throw Error(ErrorKind::InvalidArgument, "rate threshold must be positive");
    const int n_s = cfg.n_s;
    const double k_max = cfg.fronthaul.k_max;
    const double c_f = cfg.fronthaul.c_f;
    const auto &radio = cfg.radio;
    const double a = pi * cfg.ap_density;

    // rank >= 2 splits do not depend on the sample
    std::vector<CompressionSplit> rest_split(static_cast<std::size_t>(n_s));
    for (int i = 2; i <= n_s; ++i)
        rest_split[static_cast<std::size_t>(i - 1)] = compression_split_effective(c_f, kbar[static_cast<std::size_t>(i - 1)]);

    QmcBox box;
    box.bounds.assign(static_cast<std::size_t>(n_s) + 1, {0.0, 1.0});
    box.budget = opts.budget;
    box.randomizations = opts.randomizations;
    box.seed = opts.seed;
    const auto n_out = thresholds.size();
    auto res = integrate_qmc(
        [&](std::span<const double> x, std::span<double> out) {
            std::array<double, 64> d{};
            const double u0 = std::clamp(x[0], 1e-300, 1.0 - 1e-16);
            const double d_n = std::sqrt(boost::math::gamma_p_inv(static_cast<double>(n_s), u0) / a);
            for (int i = 1; i < n_s; ++i)
                d[static_cast<std::size_t>(i - 1)] = d_n * std::sqrt(x[static_cast<std::size_t>(i)]);
            std::sort(d.begin(), d.begin() + (n_s - 1));
            d[static_cast<std::size_t>(n_s - 1)] = d_n;
            const int k1 = pmf_k1.quantile(x[static_cast<std::size_t>(n_s)]);

            double s1 = 0.0, s2 = 0.0, b = 0.0;
            for (int i = 1; i <= n_s; ++i) {
                const double beta = large_scale_gain(d[static_cast<std::size_t>(i - 1)], radio);
                const double g = estimation_variance(beta, 0.0, radio);
                const CompressionSplit split =
                    i == 1 ? compression_split(c_f, std::min(k1 + 1, static_cast<int>(k_max)))
                           : rest_split[static_cast<std::size_t>(i - 1)];
                s1 += std::sqrt(g * split.rho_q);
                s2 += g * split.rho_qtilde;
                b += beta;
            }
            const double na = radio.n_antennas;
            const double coherent = opts.literal_hcov ? na / k_max * s1 : na / k_max * s1 * s1;
            const double rhs = out_of_cluster_mean(d_n, cfg.ap_density, radio) + na / k_max * s2 + b + 1.0 / radio.rho_d;
            // covered iff 2^t - 1 <= coherent / rhs
            const double t_star = std::log2(1.0 + coherent / rhs);
            for (std::size_t i = 0; i < n_out; ++i)
                out[i] = t_star >= thresholds[i] ? 1.0 : 0.0;
        },
        n_out, box, opts.threads);

    CoverageCurve curve;
    curve.method = "analytic";
    curve.thresholds = thresholds;
    for (const auto &e : res) {
        curve.probabilities.push_back(std::clamp(e.value, 0.0, 1.0));
        curve.errors.push_back(e.error);
    }
    return curve;
}

Estimate rate_coverage_user_centric(const UserCentricConfig &cfg, double t_r, const LoadPmf &pmf_k1,
                                    const std::vector<double> &kbar, const UserCentricOptions &opts) {
    const auto c = coverage_curve_user_centric(cfg, {t_r}, pmf_k1, kbar, opts);
    return {c.probabilities[0], c.errors[0], c.errors[0] <= opts.max_stderr};
}

} // namespace cfmimo
