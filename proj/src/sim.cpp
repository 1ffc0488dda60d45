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

#include "cfmimo/sim.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/numerics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cfmimo {

namespace {

// Uniform bucket grid over the square enclosing a disk.
class GridIndex {
public:
    GridIndex(const std::vector<Point2D> &pts, const DiskRegion &region) : pts_(pts) {
        const double area = 4.0 * region.radius * region.radius;
        cell_ = std::max(1e-9, std::sqrt(area / std::max<std::size_t>(pts.size(), 1)) * 1.5);
        origin_ = {region.center.x - region.radius, region.center.y - region.radius};
        n_ = std::max(1, static_cast<int>(std::ceil(2.0 * region.radius / cell_)));
        cells_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), {});
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells_[index(cell_of(pts[i].x - origin_.x), cell_of(pts[i].y - origin_.y))].push_back(static_cast<int>(i));
    }

    // k nearest point indices ordered by (distance, index)
    void nearest(Point2D p, int k, std::vector<std::pair<double, int>> &best) const {
        best.clear();
        const int cx = cell_of(p.x - origin_.x), cy = cell_of(p.y - origin_.y);
        auto visit = [&](int i, int j) {
            if (i < 0 || j < 0 || i >= n_ || j >= n_)
                return;
            for (int idx : cells_[index(i, j)]) {
                const std::pair<double, int> cand{distance(p, pts_[static_cast<std::size_t>(idx)]), idx};
                if (static_cast<int>(best.size()) < k) {
                    best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
                } else if (cand < best.back()) {
                    best.pop_back();
                    best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
                }
            }
        };
        for (int ring = 0; ring <= n_; ++ring) {
            if (ring == 0) {
                visit(cx, cy);
            } else {
                for (int i = cx - ring; i <= cx + ring; ++i) {
                    visit(i, cy - ring);
                    visit(i, cy + ring);
                }
                for (int j = cy - ring + 1; j <= cy + ring - 1; ++j) {
                    visit(cx - ring, j);
                    visit(cx + ring, j);
                }
            }
            // anything unvisited is farther than ring * cell from p
            if (static_cast<int>(best.size()) == k && best.back().first <= ring * cell_)
                return;
        }
    }

private:
    int cell_of(double v) const { return std::clamp(static_cast<int>(v / cell_), 0, n_ - 1); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    const std::vector<Point2D> &pts_;
    double cell_ = 1.0;
    Point2D origin_;
    int n_ = 1;
    std::vector<std::vector<int>> cells_;
};

nlohmann::json radio_json(const RadioParams &r) {
    return {{"n_antennas", r.n_antennas}, {"rho_d_db", linear_to_db(r.rho_d)}, {"rho_p_db", linear_to_db(r.rho_p)},
            {"tau_p", r.tau_p},           {"alpha", r.alpha},                  {"d_ref", r.d_ref}};
}

void check_thresholds(const std::vector<double> &t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0))
            throw Error(ErrorKind::InvalidArgument, "rate thresholds must be positive");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "rate thresholds must be ascending");
    }
}

} // namespace

void SimConfig::validate() const {
    if (trials < 1)
        throw Error(ErrorKind::InvalidConfiguration, "trials must be >= 1");
    if (!(guard >= 0.0 && guard < window_radius))
        throw Error(ErrorKind::InvalidConfiguration, "guard ring must be smaller than the window");
    check_thresholds(thresholds);
    std::visit([](const auto &d) { d.validate(); }, deployment);
}

CoverageCurve empirical_coverage(const std::vector<double> &sinr, const std::vector<double> &thresholds) {
    check_thresholds(thresholds);
    CoverageCurve c;
    c.method = "simulated";
    c.thresholds = thresholds;
    std::vector<double> rate(sinr.size());
    std::transform(sinr.begin(), sinr.end(), rate.begin(), [](double s) { return std::log2(1.0 + s); });
    std::sort(rate.begin(), rate.end());
    const double n = static_cast<double>(rate.size());
    for (double t : thresholds) {
        const auto above = rate.end() - std::upper_bound(rate.begin(), rate.end(), t);
        const double p = n > 0 ? static_cast<double>(above) / n : 0.0;
        c.probabilities.push_back(p);
        c.errors.push_back(n > 1 ? std::sqrt(p * (1.0 - p) / n) : 0.0);
    }
    return c;
}

LoadPmf SimResult::tagged_pmf(int rank) const {
    if (rank < 1 || rank > static_cast<int>(tagged_loads.size()))
        throw Error(ErrorKind::InvalidArgument, "rank outside the simulated serving set");
    return LoadPmf::from_samples(tagged_loads[static_cast<std::size_t>(rank - 1)]);
}

LoadPmf SimResult::typical_pmf() const {
    long total = 0;
    for (long c : typical_load_counts)
        total += c;
    if (total == 0)
        throw Error(ErrorKind::InvalidArgument, "no interior APs were observed");
    std::vector<double> p(typical_load_counts.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = static_cast<double>(typical_load_counts[k]) / static_cast<double>(total);
    return LoadPmf(std::move(p));
}

void SimResult::write_json(std::ostream &os, const SimConfig &cfg) const {
    nlohmann::json j;
    nlohmann::json conf{{"trials", cfg.trials}, {"seed", cfg.seed}, {"pilots", cfg.pilots.reuse_pilots}};
    if (const auto *t = std::get_if<TraditionalConfig>(&cfg.deployment)) {
        conf["architecture"] = "traditional";
        conf["M"] = t->m;
        conf["K"] = t->k;
        conf["R_s"] = t->r_s;
        conf["c_f"] = t->c_f;
        conf["radio"] = radio_json(t->radio);
    } else {
        const auto &u = std::get<UserCentricConfig>(cfg.deployment);
        conf["architecture"] = "user_centric";
        conf["lambda_r"] = u.ap_density;
        conf["lambda_u"] = u.user_density;
        conf["N_s"] = u.n_s;
        conf["c_f"] = u.fronthaul.c_f;
        conf["t_s"] = u.fronthaul.t_s;
        conf["k_max"] = u.fronthaul.k_max;
        conf["window"] = cfg.window_radius;
        conf["guard"] = cfg.guard;
        conf["radio"] = radio_json(u.radio);
    }
    j["config"] = conf;
    j["coverage"] = {{"thresholds", coverage.thresholds},
                     {"probabilities", coverage.probabilities},
                     {"stderr", coverage.errors}};
    nlohmann::json loads = nlohmann::json::array();
    for (std::size_t r = 0; r < tagged_loads.size(); ++r)
        loads.push_back({{"rank", r + 1}, {"pmf", tagged_pmf(static_cast<int>(r + 1)).probabilities()}});
    j["tagged_load_pmf"] = loads;
    if (!typical_load_counts.empty())
        j["typical_load_pmf"] = typical_pmf().probabilities();
    os << j.dump(2) << '\n';
}

Association associate_and_schedule(const NetworkRealization &net, int n_s, int k_max, Rng &rng, int forced_user) {
    if (n_s < 1 || k_max < 1)
        throw Error(ErrorKind::InvalidArgument, "n_s and k_max must be >= 1");
    if (static_cast<int>(net.aps.size()) < n_s)
        throw Error(ErrorKind::InsufficientAps, std::to_string(net.aps.size()) + " APs in the window, need " +
                                                    std::to_string(n_s));
    Association a;
    a.k_max = k_max;
    a.serving_sets.resize(net.users.size());
    a.loads.assign(net.aps.size(), 0);
    a.scheduled.resize(net.aps.size());
    std::vector<std::vector<int>> members(net.aps.size());
    const GridIndex grid(net.aps, net.region);
    std::vector<std::pair<double, int>> best;
    for (std::size_t u = 0; u < net.users.size(); ++u) {
        grid.nearest(net.users[u], n_s, best);
        auto &set = a.serving_sets[u];
        set.reserve(best.size());
        for (const auto &[d, l] : best) {
            set.push_back(l);
            ++a.loads[static_cast<std::size_t>(l)];
            members[static_cast<std::size_t>(l)].push_back(static_cast<int>(u));
        }
    }
    for (std::size_t l = 0; l < members.size(); ++l) {
        auto &mem = members[l];
        if (static_cast<int>(mem.size()) <= k_max) {
            a.scheduled[l] = mem;
            continue;
        }
        // partial Fisher-Yates; the forced user is moved to the front first
        if (auto it = std::find(mem.begin(), mem.end(), forced_user); it != mem.end())
            std::iter_swap(mem.begin(), it);
        const std::size_t start = (forced_user >= 0 && mem.front() == forced_user) ? 1 : 0;
        for (std::size_t i = start; i < static_cast<std::size_t>(k_max); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, mem.size() - 1);
            std::swap(mem[i], mem[pick(rng)]);
        }
        a.scheduled[l].assign(mem.begin(), mem.begin() + k_max);
        std::sort(a.scheduled[l].begin(), a.scheduled[l].end());
    }
    return a;
}

SimResult simulate_traditional(const SimConfig &cfg) {
    cfg.validate();
    const auto *tc = std::get_if<TraditionalConfig>(&cfg.deployment);
    if (!tc)
        throw Error(ErrorKind::InvalidConfiguration, "simulate_traditional needs a traditional deployment");
    const TraditionalConfig t = *tc;
    SimResult res;
    res.sinr.resize(static_cast<std::size_t>(cfg.trials));
    res.pilot_term.assign(static_cast<std::size_t>(cfg.trials), 0.0);
    const DiskRegion region({0.0, 0.0}, t.r_s);
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t trial) {
        Rng rng = make_stream(cfg.seed, trial);
        const auto aps = sample_bpp(t.m, region, rng);
        const auto users = sample_bpp(t.k, region, rng);
        std::uniform_int_distribution<int> pick(0, t.k - 1);
        const Point2D u = users[static_cast<std::size_t>(pick(rng))];
        std::vector<double> d(aps.size());
        for (std::size_t m = 0; m < aps.size(); ++m)
            d[m] = distance(aps[m], u);
        res.sinr[trial] = sinr_traditional(d, t.radio, t.c_f, t.k);
    });
    res.coverage = empirical_coverage(res.sinr, cfg.thresholds);
    return res;
}

SimResult simulate_user_centric(const SimConfig &cfg) {
    cfg.validate();
    const auto *uc = std::get_if<UserCentricConfig>(&cfg.deployment);
    if (!uc)
        throw Error(ErrorKind::InvalidConfiguration, "simulate_user_centric needs a user-centric deployment");
    const UserCentricConfig u = *uc;
    const auto trials = static_cast<std::size_t>(cfg.trials);
    const auto ns = static_cast<std::size_t>(u.n_s);
    const double interior = cfg.window_radius - cfg.guard;

    SimResult res;
    res.sinr.resize(trials);
    res.pilot_term.resize(trials);
    res.tagged_loads.assign(ns, std::vector<int>(trials, 0));
    res.typical_load_trial_mean.resize(trials);
    std::vector<std::vector<int>> typical(trials);

    parallel_for(trials, cfg.threads, [&](std::size_t trial) {
        Rng rng = make_stream(cfg.seed, trial);
        NetworkRealization net;
        net.region = DiskRegion({0.0, 0.0}, cfg.window_radius);
        net.model = PppDensities{u.ap_density, u.user_density};
        net.aps = sample_ppp(u.ap_density, net.region, rng);
        net.users.push_back({0.0, 0.0});  // typical user
        const auto others = sample_ppp(u.user_density, net.region, rng);
        net.users.insert(net.users.end(), others.begin(), others.end());

        auto assoc = associate_and_schedule(net, u.n_s, u.fronthaul.k_max, rng, 0);
        if (!cfg.pilots.orthogonal()) {
            std::uniform_int_distribution<int> pilot(0, cfg.pilots.reuse_pilots - 1);
            assoc.pilot_plan.resize(net.users.size());
            for (auto &p : assoc.pilot_plan)
                p = pilot(rng);
        }
        res.sinr[trial] = sinr_user_centric(0, net, assoc, u.radio, u.fronthaul);
        res.pilot_term[trial] = term_variances(0, net, assoc, u.radio, u.fronthaul).t[6];

        const auto &serving = assoc.serving_sets[0];
        for (std::size_t r = 0; r < ns; ++r)
            res.tagged_loads[r][trial] = assoc.loads[static_cast<std::size_t>(serving[r])] - 1;
        auto &typ = typical[trial];
        for (std::size_t l = 0; l < net.aps.size(); ++l) {
            if (norm(net.aps[l]) > interior)
                continue;
            int k = assoc.loads[l];
            if (std::find(serving.begin(), serving.end(), static_cast<int>(l)) != serving.end())
                --k;  // the typical user is an added point, not part of the user process
            typ.push_back(k);
        }
        double s = 0.0;
        for (int k : typ)
            s += k;
        res.typical_load_trial_mean[trial] = typ.empty() ? 0.0 : s / static_cast<double>(typ.size());
    });

    for (const auto &typ : typical)
        for (int k : typ) {
            if (static_cast<std::size_t>(k) >= res.typical_load_counts.size())
                res.typical_load_counts.resize(static_cast<std::size_t>(k) + 1, 0);
            ++res.typical_load_counts[static_cast<std::size_t>(k)];
        }
    res.coverage = empirical_coverage(res.sinr, cfg.thresholds);
    return res;
}

} // namespace cfmimo
