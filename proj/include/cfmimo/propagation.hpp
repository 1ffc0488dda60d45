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

#pragma once

#include <cmath>

namespace cfmimo {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Radio parameters. SNRs are linear; use from_db() at the configuration boundary.
struct RadioParams {
    int n_antennas = 1;      // antennas per AP
    double rho_d = 1.0;      // downlink transmit SNR
    double rho_p = 1.0;      // pilot symbol SNR
    int tau_p = 1;           // pilot length in symbols
    double alpha = 3.7;      // path-loss exponent
    double d_ref = 1.0;      // distance below which the loss is flat

    static RadioParams from_db(int n_antennas, double rho_d_db, double rho_p_db, int tau_p,
                               double alpha = 3.7, double d_ref = 1.0);

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
};

struct FronthaulParams {
    double c_f = 1.0;   // bits/s/Hz per link
    double t_s = 1.0;   // SCNR target, linear
    int k_max = 1;      // users an AP schedules per resource

    /// k_max derived from the SCNR target.
    static FronthaulParams from_target(double c_f, double t_s);
};

struct CompressionSplit {
    double rho_q = 0.0;       // signal share
    double rho_qtilde = 0.0;  // compression-noise share

    double scnr() const { return rho_q / rho_qtilde; }
};

/// l(d) = (d / d_ref)^alpha beyond d_ref, 1 inside. The large-scale gain is 1 / l(d).
double path_loss(double d, const RadioParams &params);

inline double large_scale_gain(double d, const RadioParams &params) { return 1.0 / path_loss(d, params); }

/// MMSE estimate variance gamma = tau rho beta^2 / (1 + tau rho (beta + copilot)).
/// `copilot_beta_sum` excludes beta_k; pass 0 for the contamination-free case.
double estimation_variance(double beta_k, double copilot_beta_sum, const RadioParams &params);

/// Unit-power split into signal and compression noise for an AP serving k users.
/// Throws NoLoad for k == 0.
CompressionSplit compression_split(double c_f, int k);

/// Same split for a non-integer effective load (k > 0).
CompressionSplit compression_split_effective(double c_f, double k);

/// floor(c_f / log2(1 + t_s)); throws InvalidTarget for t_s <= 0.
int max_scheduled_users(double c_f, double t_s);

} // namespace cfmimo
