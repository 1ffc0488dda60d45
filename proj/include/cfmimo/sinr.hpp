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

// Conditional achievable-rate SINR of one user under conjugate beamforming with
// equal power 1/K_max per scheduled user and a compressed fronthaul.

#pragma once

#include "cfmimo/geometry.hpp"
#include "cfmimo/propagation.hpp"

#include <array>
#include <span>
#include <vector>

namespace cfmimo {

struct Association {
    std::vector<std::vector<int>> serving_sets; // per user, AP indices nearest-first
    std::vector<int> loads;                     // per AP, users associated
    std::vector<std::vector<int>> scheduled;    // per AP, scheduled user indices (<= k_max)
    std::vector<int> pilot_plan;                // per user, pilot index
    int k_max = 1;

    /// Checks the structural invariants against a realization; throws InvalidConfiguration.
    void validate(const NetworkRealization &net) const;
};

/// Full-network SINR of `user` (serving APs, loads and copilot users from `assoc`).
/// The effective load of AP l is the size of its schedule. Empty serving set gives 0.
double sinr_user_centric(int user, const NetworkRealization &net, const Association &assoc,
                         const RadioParams &radio, const FronthaulParams &fh);

/// Finite-network SINR when every AP serves all K users with orthogonal pilots.
double sinr_traditional(std::span<const double> user_to_ap_distances, const RadioParams &radio, double c_f,
                        int n_users);

/// Mean powers of the seven signal components, desired signal first. T5 and T6 are
/// returned at their full-occupancy bounds and T7 is the coherent contamination
/// part, so that t[0] / (t[1] + ... + t[6] + 1) equals sinr_user_centric exactly.
/// T3 keeps the (N_a + 1) coefficient; its extra N_a^0 share is the piece that the
/// compact SINR form absorbs into the sum of large-scale gains.
struct TermVariances {
    std::array<double, 7> t{};

    double sinr() const { return t[0] / (t[1] + t[2] + t[3] + t[4] + t[5] + t[6] + 1.0); }
};

TermVariances term_variances(int user, const NetworkRealization &net, const Association &assoc,
                             const RadioParams &radio, const FronthaulParams &fh);

} // namespace cfmimo
