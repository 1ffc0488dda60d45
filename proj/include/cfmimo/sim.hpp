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

// Monte Carlo drops: sample the network, associate and schedule, evaluate the
// conditional SINR, and collect coverage and load statistics.

#pragma once

#include "cfmimo/coverage.hpp"
#include "cfmimo/geometry.hpp"
#include "cfmimo/load.hpp"
#include "cfmimo/sinr.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace cfmimo {

struct PilotPolicy {
    int reuse_pilots = 0;  // 0: orthogonal pilots; P > 0: each user draws one of P pilots

    bool orthogonal() const { return reuse_pilots <= 0; }
};

struct SimConfig {
    std::variant<TraditionalConfig, UserCentricConfig> deployment;
    int trials = 10'000;
    std::uint64_t seed = 1;
    double window_radius = 2000.0;  // user-centric drops only
    double guard = 500.0;
    PilotPolicy pilots;
    std::vector<double> thresholds;  // rate grid for the empirical coverage curve
    int threads = 0;

    void validate() const;
};

struct SimResult {
    CoverageCurve coverage;
    std::vector<double> sinr;                      // per trial, evaluated user
    std::vector<std::vector<int>> tagged_loads;    // [rank - 1][trial], excluding the typical user
    std::vector<long> typical_load_counts;         // histogram of interior-AP loads over all trials
    std::vector<double> typical_load_trial_mean;   // per trial mean interior-AP load
    std::vector<double> pilot_term;                // per trial contamination power (0 when orthogonal)

    LoadPmf tagged_pmf(int rank) const;
    LoadPmf typical_pmf() const;

    void write_json(std::ostream &os, const SimConfig &cfg) const;
};

/// Serving sets are the n_s nearest APs (ties to the lower index). APs with more
/// than k_max users schedule a uniform k_max-subset that always contains
/// `forced_user` when it is one of their users. Throws InsufficientAps.
Association associate_and_schedule(const NetworkRealization &net, int n_s, int k_max, Rng &rng,
                                   int forced_user = -1);

SimResult simulate_traditional(const SimConfig &cfg);
SimResult simulate_user_centric(const SimConfig &cfg);

/// Empirical coverage of per-trial SINR values on a rate grid, with binomial standard errors.
CoverageCurve empirical_coverage(const std::vector<double> &sinr, const std::vector<double> &thresholds);

} // namespace cfmimo
