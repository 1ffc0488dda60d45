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

// Analytical rate coverage for the finite (every AP serves every user) network and
// for the user-centric network, plus mean-rate and sum-rate helpers.

#pragma once

#include "cfmimo/load.hpp"
#include "cfmimo/numerics.hpp"
#include "cfmimo/propagation.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cfmimo {

struct CoverageCurve {
    std::vector<double> thresholds;     // bits/s/Hz, ascending
    std::vector<double> probabilities;
    std::vector<double> errors;
    std::string method;                 // "analytic" or "simulated"

    void write_csv(std::ostream &os) const;
};

struct TraditionalConfig {
    int m = 32;          // APs
    int k = 20;          // users
    double r_s = 500.0;  // disk radius, meters
    RadioParams radio;
    double c_f = 10.0;

    /// Throws InvalidConfiguration when tau_p < k; warns when m * n_antennas < 2k.
    void validate() const;
};

struct UserCentricConfig {
    double ap_density = 1e-4;
    double user_density = 1e-4;
    int n_s = 5;
    RadioParams radio;
    FronthaulParams fronthaul;

    void validate() const;
};

struct SignalTerms {
    double i1 = 0.0;  // sum of sqrt(gamma)
    double i2 = 0.0;  // sum of gamma
    double i3 = 0.0;  // sum of beta
    bool converged = true;
};

/// Nearest-AP contribution plus (m - 1) times the conditional mean of the rest.
SignalTerms approx_signal_terms(double d_oo, double r_o, const TraditionalConfig &cfg);

/// SINR of the finite network with the three sums replaced by `terms`.
double approx_sinr(const SignalTerms &terms, const TraditionalConfig &cfg);

struct TraditionalOptions {
    int radial_panels = 3;    // 30-point Gauss-Legendre panels over r_o^2
    int quantile_grid = 512;  // nearest-AP distance grid, equally spaced in probability
};

/// P[log2(1 + SINR) > t_r] for a uniformly placed user. The error is the change
/// when the distance grid is halved.
Estimate rate_coverage_traditional(const TraditionalConfig &cfg, double t_r, const TraditionalOptions &opts = {});

CoverageCurve coverage_curve_traditional(const TraditionalConfig &cfg, const std::vector<double> &thresholds,
                                         const TraditionalOptions &opts = {});

struct MeanRate {
    double value = 0.0;
    bool curve_too_short = false;  // last probability not below 1e-3
};

/// Mean rate from a coverage curve: integral of the survival function by the
/// trapezoid rule with an exponential tail beyond the last point. `literal`
/// integrates t * R_c(t) instead.
MeanRate mean_user_rate(const CoverageCurve &curve, bool literal = false);

/// Mean rate of the finite network on an automatically extended threshold grid.
MeanRate mean_rate_traditional(const TraditionalConfig &cfg, double step = 0.05,
                               const TraditionalOptions &opts = {});

struct SumRateScan {
    std::vector<int> users;
    std::vector<double> sum_rate;
    int argmax = 0;  // users value of the maximum
};

/// K * mean rate for each K in `users`; other parameters from `base`.
SumRateScan sum_rate_scan(const TraditionalConfig &base, const std::vector<int> &users, double step = 0.05,
                          const TraditionalOptions &opts = {});

struct UserCentricOptions {
    std::uint64_t budget = 1u << 15;  // QMC points per randomization
    int randomizations = 8;
    std::uint64_t seed = 0xc0fe;
    bool literal_hcov = false;        // do not square the coherent sum
    double max_stderr = 0.01;         // larger standard errors are flagged
    int threads = 0;
};

/// Load inputs of the coverage expression: pmf of K_1 and effective loads of ranks 2..n_s.
struct UserCentricLoads {
    LoadPmf pmf_k1;
    std::vector<double> kbar;               // index i - 1 for rank i; kbar[0] unused
    std::vector<LoadMoments> tagged;
};

UserCentricLoads user_centric_loads(const UserCentricConfig &cfg, const TaggedLoadOptions &load_opts = {});

/// Mean out-of-cluster gain 2 pi lambda_r int_d^inf r / l(r) dr.
double out_of_cluster_mean(double d, double ap_density, const RadioParams &radio);

Estimate rate_coverage_user_centric(const UserCentricConfig &cfg, double t_r, const LoadPmf &pmf_k1,
                                    const std::vector<double> &kbar, const UserCentricOptions &opts = {});

/// Same evaluation for a threshold grid with common QMC points (monotone by construction).
CoverageCurve coverage_curve_user_centric(const UserCentricConfig &cfg, const std::vector<double> &thresholds,
                                          const LoadPmf &pmf_k1, const std::vector<double> &kbar,
                                          const UserCentricOptions &opts = {});

} // namespace cfmimo
