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

#include "cfmimo/propagation.hpp"

#include "cfmimo/error.hpp"

#include <cmath>

namespace cfmimo {

RadioParams RadioParams::from_db(int n_antennas, double rho_d_db, double rho_p_db, int tau_p, double alpha,
                                 double d_ref) {
    RadioParams p;
    p.n_antennas = n_antennas;
    p.rho_d = db_to_linear(rho_d_db);
    p.rho_p = db_to_linear(rho_p_db);
    p.tau_p = tau_p;
    p.alpha = alpha;
    p.d_ref = d_ref;
    p.validate();
    return p;
}

void RadioParams::validate() const {
    if (n_antennas < 1)
        throw Error(ErrorKind::InvalidArgument, "n_antennas must be >= 1");
    if (!(rho_d > 0.0) || !(rho_p > 0.0))
        throw Error(ErrorKind::InvalidArgument, "transmit SNRs must be positive");
    if (tau_p < 1)
        throw Error(ErrorKind::InvalidArgument, "tau_p must be >= 1");
    if (!(alpha > 0.0) || !(d_ref > 0.0))
        throw Error(ErrorKind::InvalidArgument, "path-loss exponent and reference distance must be positive");
}

FronthaulParams FronthaulParams::from_target(double c_f, double t_s) {
    if (!(c_f > 0.0))
        throw Error(ErrorKind::InvalidArgument, "fronthaul capacity must be positive");
    FronthaulParams f;
    f.c_f = c_f;
    f.t_s = t_s;
    f.k_max = max_scheduled_users(c_f, t_s);
    return f;
}

double path_loss(double d, const RadioParams &params) {
    if (!(d >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "negative distance");
    if (d <= params.d_ref)
        return 1.0;
    return std::pow(d / params.d_ref, params.alpha);
}

double estimation_variance(double beta_k, double copilot_beta_sum, const RadioParams &params) {
    if (!(beta_k >= 0.0) || !(copilot_beta_sum >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "gains must be nonnegative");
    const double tr = params.tau_p * params.rho_p;
    return tr * beta_k * beta_k / (1.0 + tr * (beta_k + copilot_beta_sum));
}

CompressionSplit compression_split(double c_f, int k) {
    if (k <= 0)
        throw Error(ErrorKind::NoLoad, "AP with no scheduled users has no compression split");
    return compression_split_effective(c_f, static_cast<double>(k));
}

CompressionSplit compression_split_effective(double c_f, double k) {
    if (!(k > 0.0))
        throw Error(ErrorKind::NoLoad, "effective load must be positive");
    if (!(c_f > 0.0))
        throw Error(ErrorKind::InvalidArgument, "fronthaul capacity must be positive");
    const double noise = std::exp2(-c_f / k);
    return {1.0 - noise, noise};
}

int max_scheduled_users(double c_f, double t_s) {
    if (!(t_s > 0.0))
        throw Error(ErrorKind::InvalidTarget, "SCNR target must be positive");
    if (!(c_f > 0.0))
        throw Error(ErrorKind::InvalidArgument, "fronthaul capacity must be positive");
    // A capacity computed as k * log2(1 + t_s) must give back k despite roundoff.
    const double ratio = c_f / std::log2(1.0 + t_s);
    const double cap = std::floor(ratio * (1.0 + 1e-12));
    return cap > 2147483647.0 ? 2147483647 : static_cast<int>(cap);
}

} // namespace cfmimo
