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

// Load statistics of the user-centric network: moments of the number of users
// served by the typical AP and by each of the typical user's serving APs, the
// negative-binomial fit, and the quantities derived from the fitted pmf.

#pragma once

#include "cfmimo/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cfmimo {

struct LoadMoments {
    double m1 = 0.0;
    double m2 = 0.0;
    double m1_error = 0.0;  // quadrature error or QMC standard error
    double m2_error = 0.0;
    bool converged = true;

    double variance() const { return m2 - m1 * m1; }
};

struct NegBinParams {
    double r = 1.0;
    double p = 1.0;

    double mean() const { return (1.0 - p) * r / p; }
    double second_moment() const { return (1.0 - p) * r * (1.0 + (1.0 - p) * r) / (p * p); }
};

class LoadPmf {
public:
    LoadPmf() = default;
    explicit LoadPmf(std::vector<double> probabilities);

    /// Negative binomial truncated at the smallest k whose tail mass is below tail_eps.
    static LoadPmf negative_binomial(const NegBinParams &nb, double tail_eps = 1e-6);
    static LoadPmf poisson(double mean, double tail_eps = 1e-6);
    static LoadPmf point_mass_at_zero();
    /// Empirical pmf from observed counts.
    static LoadPmf from_samples(const std::vector<int> &counts);
    /// Moment-matched negative binomial; underdispersed pairs fall back to Poisson
    /// with the same mean (a warning is written to std::clog).
    static LoadPmf from_moments(const LoadMoments &m, double tail_eps = 1e-6);

    const std::vector<double> &probabilities() const { return p_; }
    int k_cap() const { return static_cast<int>(p_.size()) - 1; }
    double operator[](int k) const { return (k < 0 || k > k_cap()) ? 0.0 : p_[static_cast<std::size_t>(k)]; }
    double cdf(int k) const;
    double mean() const;
    double second_moment() const;
    double total_mass() const;
    /// Smallest k with cdf(k) >= u.
    int quantile(double u) const;

    void write_csv(std::ostream &os) const;

private:
    std::vector<double> p_;
    std::vector<double> cdf_;
};

double total_variation(const LoadPmf &a, const LoadPmf &b);

struct TaggedLoadOptions {
    std::uint64_t m1_budget = 1u << 16;   // QMC points per randomization, first moment
    std::uint64_t m2_budget = 1u << 20;   // QMC points per randomization, second moment
    int randomizations = 8;
    std::uint64_t seed = 0x10ad;
    double truncation_eps = 1e-10;
    double rel_tol = 1e-2;                // QMC standard error above this (relative) is flagged
    int threads = 0;
};

/// Moments of K_N (users other than the typical one served by the typical user's
/// N-th nearest AP) for every rank N = 1..n_s, index N - 1.
std::vector<LoadMoments> tagged_load_moments(double ap_density, double user_density, int n_s,
                                             const TaggedLoadOptions &opts = {});

Estimate tagged_load_m1(int rank, double ap_density, double user_density, int n_s,
                        const TaggedLoadOptions &opts = {});
Estimate tagged_load_m2(int rank, double ap_density, double user_density, int n_s,
                        const TaggedLoadOptions &opts = {});

/// First moment by nested adaptive quadrature in the (r_o, d_x, v_x) coordinates
/// of the closed form; slower, used to cross-check the QMC path.
Estimate tagged_load_m1_quadrature(int rank, double ap_density, double user_density, int n_s,
                                   const Quadrature1D &tol = {1e-10, 1e-5, 12});

/// Typical-AP moments; m1 is closed form, m2 by nested adaptive quadrature.
LoadMoments typical_load_moments(double ap_density, double user_density, int n_s,
                                 const Quadrature1D &tol = {1e-12, 1e-6, 15});

/// Moment matching: p = m1 / v, r = m1^2 / (v - m1). m1 == 0 gives the point mass
/// at zero (p = 1). Throws Underdispersed when v <= m1.
NegBinParams fit_negbin(const LoadMoments &m);

/// P[SCNR >= t_s] = P[K <= floor(c_f / log2(1 + t_s))].
double scnr_coverage(double c_f, double t_s, const LoadPmf &pmf);

/// Smallest fronthaul capacity with P[SCNR >= t_s] >= target.
double required_fronthaul(double t_s, double target, const LoadPmf &pmf);

/// 1 + sum_k min(k, k_max) P[K_i = k] for ranks i >= 2.
double effective_mean_load(int rank, int k_max, const LoadPmf &pmf);

} // namespace cfmimo
