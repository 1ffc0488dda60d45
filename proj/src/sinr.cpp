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

#include "cfmimo/sinr.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cfmimo {

namespace {

struct Ingredients {
    std::vector<double> beta;      // gain from every AP to the user
    std::vector<double> gamma;     // estimate variance at every AP for the user
    std::vector<int> copilots;     // other users on the same pilot
};

Ingredients gather(int user, const NetworkRealization &net, const Association &assoc, const RadioParams &radio) {
    const auto n_aps = net.aps.size();
    const Point2D u = net.users[static_cast<std::size_t>(user)];
    Ingredients in;
    in.beta.resize(n_aps);
    in.gamma.resize(n_aps);
    if (!assoc.pilot_plan.empty()) {
        const int pilot = assoc.pilot_plan[static_cast<std::size_t>(user)];
        for (std::size_t j = 0; j < assoc.pilot_plan.size(); ++j)
            if (static_cast<int>(j) != user && assoc.pilot_plan[j] == pilot)
                in.copilots.push_back(static_cast<int>(j));
    }
    for (std::size_t l = 0; l < n_aps; ++l) {
        in.beta[l] = large_scale_gain(distance(net.aps[l], u), radio);
        double copilot_sum = 0.0;
        for (int j : in.copilots)
            copilot_sum += large_scale_gain(distance(net.aps[l], net.users[static_cast<std::size_t>(j)]), radio);
        in.gamma[l] = estimation_variance(in.beta[l], copilot_sum, radio);
    }
    return in;
}

int effective_load(const Association &assoc, int ap, int user) {
    const auto &sched = assoc.scheduled[static_cast<std::size_t>(ap)];
    if (std::find(sched.begin(), sched.end(), user) == sched.end())
        throw Error(ErrorKind::InvalidConfiguration,
                    "user " + std::to_string(user) + " is not scheduled at serving AP " + std::to_string(ap));
    return static_cast<int>(sched.size());
}

} // namespace

void Association::validate(const NetworkRealization &net) const {
    if (serving_sets.size() != net.users.size() || loads.size() != net.aps.size() ||
        scheduled.size() != net.aps.size())
        throw Error(ErrorKind::InvalidConfiguration, "association sizes do not match the realization");
    if (!pilot_plan.empty() && pilot_plan.size() != net.users.size())
        throw Error(ErrorKind::InvalidConfiguration, "pilot plan size does not match the user count");
    std::vector<int> counted(net.aps.size(), 0);
    for (std::size_t u = 0; u < serving_sets.size(); ++u) {
        double prev = -1.0;
        for (int l : serving_sets[u]) {
            const double d = distance(net.aps[static_cast<std::size_t>(l)], net.users[u]);
            if (d < prev)
                throw Error(ErrorKind::InvalidConfiguration, "serving set not sorted by distance");
            prev = d;
            ++counted[static_cast<std::size_t>(l)];
        }
    }
    for (std::size_t l = 0; l < loads.size(); ++l) {
        if (counted[l] != loads[l])
            throw Error(ErrorKind::InvalidConfiguration, "load of AP " + std::to_string(l) + " inconsistent");
        if (static_cast<int>(scheduled[l].size()) > k_max)
            throw Error(ErrorKind::InvalidConfiguration, "schedule exceeds k_max at AP " + std::to_string(l));
    }
}

double sinr_user_centric(int user, const NetworkRealization &net, const Association &assoc,
                         const RadioParams &radio, const FronthaulParams &fh) {
    const auto &serving = assoc.serving_sets[static_cast<std::size_t>(user)];
    if (serving.empty())
        return 0.0;
    const auto in = gather(user, net, assoc, radio);
    const double rho_n = radio.rho_d * radio.n_antennas;
    const double k_max = assoc.k_max;

    double coherent = 0.0, compression = 0.0;
    for (int l : serving) {
        const auto split = compression_split(fh.c_f, effective_load(assoc, l, user));
        const double g = in.gamma[static_cast<std::size_t>(l)];
        coherent += std::sqrt(g * split.rho_q / k_max);
        compression += g * split.rho_qtilde / k_max;
    }
    double beta_sum = 0.0;
    for (double b : in.beta)
        beta_sum += b;
    double contamination = 0.0;
    for (int i : in.copilots) {
        double s = 0.0;
        for (int l : assoc.serving_sets[static_cast<std::size_t>(i)])
            s += std::sqrt(in.gamma[static_cast<std::size_t>(l)] / k_max);
        contamination += s * s;
    }
    const double num = rho_n * coherent * coherent;
    const double den = rho_n * compression + radio.rho_d * beta_sum + rho_n * contamination + 1.0;
    return num / den;
}

TermVariances term_variances(int user, const NetworkRealization &net, const Association &assoc,
                             const RadioParams &radio, const FronthaulParams &fh) {
    TermVariances tv;
    const auto &serving = assoc.serving_sets[static_cast<std::size_t>(user)];
    if (serving.empty())
        return tv;
    const auto in = gather(user, net, assoc, radio);
    const double rho = radio.rho_d;
    const double n_a = radio.n_antennas;
    const double k_max = assoc.k_max;

    std::vector<char> is_serving(net.aps.size(), 0);
    double coherent = 0.0;
    for (int l : serving) {
        is_serving[static_cast<std::size_t>(l)] = 1;
        const auto split = compression_split(fh.c_f, effective_load(assoc, l, user));
        const double g = in.gamma[static_cast<std::size_t>(l)];
        const double b = in.beta[static_cast<std::size_t>(l)];
        coherent += std::sqrt(g * split.rho_q / k_max);
        tv.t[1] += rho * g * split.rho_q / k_max;
        tv.t[2] += rho * (n_a + 1.0) * g * split.rho_qtilde / k_max;
        tv.t[3] += rho * (b - g) / k_max;
        tv.t[4] += rho * (k_max - 1.0) / k_max * b;
    }
    tv.t[0] = rho * n_a * coherent * coherent;
    for (std::size_t l = 0; l < net.aps.size(); ++l)
        if (!is_serving[l])
            tv.t[5] += rho * in.beta[l];
    for (int i : in.copilots) {
        double s = 0.0;
        for (int l : assoc.serving_sets[static_cast<std::size_t>(i)])
            s += std::sqrt(in.gamma[static_cast<std::size_t>(l)] / k_max);
        tv.t[6] += rho * n_a * s * s;
    }
    return tv;
}

double sinr_traditional(std::span<const double> user_to_ap_distances, const RadioParams &radio, double c_f,
                        int n_users) {
    if (n_users < 1)
        throw Error(ErrorKind::InvalidArgument, "traditional SINR needs at least one user");
    if (user_to_ap_distances.empty())
        throw Error(ErrorKind::InvalidArgument, "traditional SINR needs at least one AP");
    const double k = n_users;
    const auto split = compression_split(c_f, n_users);
    double sum_sqrt_gamma = 0.0, sum_gamma = 0.0, sum_beta = 0.0;
    for (double d : user_to_ap_distances) {
        const double b = large_scale_gain(d, radio);
        const double g = estimation_variance(b, 0.0, radio);
        sum_sqrt_gamma += std::sqrt(g);
        sum_gamma += g;
        sum_beta += b;
    }
    const double scale = radio.rho_d * radio.n_antennas / k;
    const double num = scale * split.rho_q * sum_sqrt_gamma * sum_sqrt_gamma;
    const double den = scale * split.rho_qtilde * sum_gamma + radio.rho_d * sum_beta + 1.0;
    return num / den;
}

} // namespace cfmimo
