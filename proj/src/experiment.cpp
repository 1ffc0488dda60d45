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

#include "cfmimo/experiment.hpp"

#include "cfmimo/coverage.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/load.hpp"
#include "cfmimo/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

namespace cfmimo {

namespace {

const std::map<std::string, double> &numeric_defaults() {
    static const std::map<std::string, double> d = {
        {"m", 32},           {"k", 20},
        {"r_s", 500},        {"n_a", 4},
        {"total_antennas", 0}, {"rho_d_db", 100},
        {"rho_p_db", 100},   {"tau_p", 80},
        {"alpha", 3.7},      {"d_ref", 1},
        {"c_f", 0},          {"t_s_db", 15},
        {"scnr_target", 0.95}, {"ap_density", 1e-4},
        {"user_density", 1e-4}, {"n_s", 5},
        {"window_radius", 2000}, {"guard", 500},
        {"pilots", 0},       {"load_budget", 131072},
        {"qmc_budget", 32768}, {"rate_step", 0.05},
        {"t_r", 1},
    };
    return d;
}

const std::set<std::string> &integer_keys() {
    static const std::set<std::string> s = {"m", "k", "n_a", "total_antennas", "tau_p", "n_s", "pilots",
                                            "load_budget", "qmc_budget"};
    return s;
}

const std::set<std::string> &text_keys() {
    static const std::set<std::string> s = {"name",   "mode",   "architecture", "metric",    "sweep",
                                            "grid",   "series", "output",       "trials",    "seed",
                                            "threads", "tolerance", "literal_mean_rate", "literal_hcov"};
    return s;
}

const std::map<std::string, std::string> &sweep_keys() {
    static const std::map<std::string, std::string> s = {{"T_r", "t_r"}, {"K", "k"},     {"C_f", "c_f"},
                                                         {"T_s", "t_s_db"}, {"N_s", "n_s"}, {"N_a", "n_a"}};
    return s;
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (auto &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] void spec_error(const std::string &source, int line, const std::string &msg) {
    std::string where = source;
    if (line > 0)
        where += ":" + std::to_string(line);
    throw Error(ErrorKind::InvalidSpec, where + ": " + msg);
}

bool parse_double(const std::string &text, double &out) {
    const std::string t = trim(text);
    if (t.empty())
        return false;
    char *end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        parts.emplace_back();
    return parts;
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// "a:step:b" (inclusive) or "v1, v2, ...".
std::vector<double> parse_values(const std::string &text, const std::string &source, int line,
                                 const std::string &field) {
    std::vector<double> out;
    const std::string t = trim(text);
    if (t.empty())
        spec_error(source, line, field + ": empty grid");
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        double a = 0, step = 0, b = 0;
        if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], step) ||
            !parse_double(parts[2], b))
            spec_error(source, line, field + ": range must be start:step:stop");
        if (!(step > 0.0) || b < a)
            spec_error(source, line, field + ": range needs step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
        for (long i = 0; i < n; ++i)
            out.push_back(std::stod(fmt12(a + static_cast<double>(i) * step)));
    } else {
        for (const auto &p : split(t, ',')) {
            double v = 0;
            if (!parse_double(p, v))
                spec_error(source, line, field + ": '" + p + "' is not a number");
            out.push_back(v);
        }
    }
    if (out.empty())
        spec_error(source, line, field + ": empty grid");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            spec_error(source, line, field + ": values must be strictly ascending");
    return out;
}

std::string canonical_key(const std::string &name) {
    if (const auto it = sweep_keys().find(name); it != sweep_keys().end())
        return it->second;
    return lower(name);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Parameter set of one evaluation point.
struct Params {
    const ExperimentSpec *spec = nullptr;
    std::map<std::string, double> values;
    bool auto_cf = true;

    double operator[](const std::string &k) const { return values.at(k); }
    int integer(const std::string &k) const { return static_cast<int>(std::lround(values.at(k))); }

    void set(const std::string &key, double v) {
        if (integer_keys().count(key) && std::round(v) != v) {
            const auto it = spec->entries.find(key);
            spec_error(spec->source, it == spec->entries.end() ? 0 : it->second.line,
                       key + ": expected an integer, got " + fmt(v));
        }
        values[key] = v;
        if (key == "c_f")
            auto_cf = false;
    }
};

struct Row {
    Row(double s, double xv, std::string c, int kv = -1) : series(s), x(xv), curve(std::move(c)), k(kv) {}

    double series = std::numeric_limits<double>::quiet_NaN();
    double x = 0.0;
    std::string curve;
    int k = -1;
    std::optional<double> analytic, analytic_error, simulated, simulated_error;
};

using LoadsKey = std::tuple<int, double, double, int>;
using TypicalKey = std::tuple<int, double, double>;

class Runner {
public:
    Runner(const ExperimentSpec &spec, const RunOverrides &ov, std::ostream *log)
        : spec_(spec), log_(log) {
        trials_ = ov.trials.value_or(spec.trials);
        seed_ = ov.seed.value_or(spec.seed);
        threads_ = ov.threads.value_or(spec.threads);
        dir_ = ov.output.value_or(std::filesystem::path(spec.output));
        if (trials_ < 1)
            throw Error(ErrorKind::InvalidSpec, "trials: must be at least 1");
    }

    RunSummary run();

private:
    bool analytic() const { return spec_.mode != RunMode::Simulate; }
    bool simulate() const { return spec_.mode != RunMode::Analytic; }

    void note(const std::string &msg) const {
        if (log_)
            *log_ << "[" << spec_.name << "] " << msg << std::endl;
    }

    Params base() const {
        Params p;
        p.spec = &spec_;
        p.auto_cf = spec_.auto_fronthaul();
        for (const auto &[k, v] : numeric_defaults())
            p.values[k] = k == "c_f" ? v : spec_.number(k);
        if (!p.auto_cf)
            p.values["c_f"] = spec_.number("c_f");
        return p;
    }

    RadioParams radio(const Params &p) const {
        return RadioParams::from_db(p.integer("n_a"), p["rho_d_db"], p["rho_p_db"], p.integer("tau_p"), p["alpha"],
                                    p["d_ref"]);
    }

    TraditionalConfig traditional(const Params &p) const {
        TraditionalConfig c;
        c.k = p.integer("k");
        c.r_s = p["r_s"];
        c.radio = radio(p);
        const int total = p.integer("total_antennas");
        if (total > 0) {
            if (total % c.radio.n_antennas != 0)
                spec_error(spec_.source, line_of("total_antennas"),
                           "total_antennas: " + std::to_string(total) + " is not a multiple of n_a = " +
                               std::to_string(c.radio.n_antennas));
            c.m = total / c.radio.n_antennas;
        } else {
            c.m = p.integer("m");
        }
        c.c_f = p.auto_cf ? c.k * std::log2(1.0 + db_to_linear(p["t_s_db"])) : p["c_f"];
        c.validate();
        return c;
    }

    const LoadPmf &typical_pmf(const Params &p) {
        const TypicalKey key{p.integer("n_s"), p["ap_density"], p["user_density"]};
        if (auto it = typical_.find(key); it != typical_.end())
            return it->second;
        note("typical-AP load moments, N_s = " + std::to_string(p.integer("n_s")));
        const auto m = typical_load_moments(p["ap_density"], p["user_density"], p.integer("n_s"));
        if (!m.converged)
            throw Error(ErrorKind::Unconverged, "typical_load_moments: second-moment quadrature did not converge");
        return typical_.emplace(key, LoadPmf::from_moments(m)).first->second;
    }

    UserCentricConfig user_centric(const Params &p) {
        UserCentricConfig c;
        c.ap_density = p["ap_density"];
        c.user_density = p["user_density"];
        c.n_s = p.integer("n_s");
        c.radio = radio(p);
        const double t_s = db_to_linear(p["t_s_db"]);
        const double c_f = p.auto_cf ? required_fronthaul(t_s, p["scnr_target"], typical_pmf(p)) : p["c_f"];
        c.fronthaul = FronthaulParams::from_target(c_f, t_s);
        c.validate();
        return c;
    }

    TaggedLoadOptions load_options(const Params &p) const {
        TaggedLoadOptions o;
        o.m2_budget = static_cast<std::uint64_t>(p.integer("load_budget"));
        o.m1_budget = std::min<std::uint64_t>(o.m1_budget, o.m2_budget);
        o.threads = threads_;
        return o;
    }

    const UserCentricLoads &loads(const UserCentricConfig &c, const Params &p) {
        const LoadsKey key{c.n_s, c.ap_density, c.user_density, c.fronthaul.k_max};
        if (auto it = loads_.find(key); it != loads_.end())
            return it->second;
        note("tagged-AP load moments, N_s = " + std::to_string(c.n_s));
        return loads_.emplace(key, user_centric_loads(c, load_options(p))).first->second;
    }

    CoverageCurve uc_curve(const UserCentricConfig &c, const Params &p, const std::vector<double> &grid) {
        const auto &l = loads(c, p);
        UserCentricOptions o;
        o.budget = static_cast<std::uint64_t>(p.integer("qmc_budget"));
        o.literal_hcov = spec_.flag("literal_hcov");
        o.threads = threads_;
        auto curve = coverage_curve_user_centric(c, grid, l.pmf_k1, l.kbar, o);
        for (double e : curve.errors)
            if (e > o.max_stderr)
                throw Error(ErrorKind::Unconverged,
                            "rate_coverage_user_centric: QMC standard error " + fmt(e) + " above " + fmt(o.max_stderr));
        return curve;
    }

    std::vector<double> rate_grid(const Params &p) const {
        const double step = p["rate_step"];
        std::vector<double> g;
        for (int i = 1; i * step <= 30.0 + 1e-12; ++i)
            g.push_back(i * step);
        return g;
    }

    double analytic_mean_rate(const Params &p) {
        const bool literal = spec_.flag("literal_mean_rate");
        MeanRate r;
        if (spec_.architecture == Architecture::Traditional) {
            const auto c = traditional(p);
            r = literal ? mean_user_rate(coverage_curve_traditional(c, rate_grid(p)), true)
                        : mean_rate_traditional(c, p["rate_step"]);
        } else {
            const auto c = user_centric(p);
            r = mean_user_rate(uc_curve(c, p, rate_grid(p)), literal);
        }
        if (r.curve_too_short)
            throw Error(ErrorKind::Unconverged, "mean_user_rate: coverage curve does not reach its tail");
        return r.value;
    }

    SimConfig sim_config(const Params &p, std::vector<double> thresholds) {
        SimConfig s;
        if (spec_.architecture == Architecture::Traditional)
            s.deployment = traditional(p);
        else
            s.deployment = user_centric(p);
        s.trials = trials_;
        s.seed = seed_;
        s.window_radius = p["window_radius"];
        s.guard = p["guard"];
        s.pilots.reuse_pilots = p.integer("pilots");
        s.thresholds = std::move(thresholds);
        s.threads = threads_;
        return s;
    }

    SimResult run_sim(const SimConfig &s) const {
        return spec_.architecture == Architecture::Traditional ? simulate_traditional(s) : simulate_user_centric(s);
    }

    // Mean of log2(1 + SINR), or of half its square for the literal mean-rate form.
    std::pair<double, double> sim_mean_rate(const SimResult &r) const {
        const bool literal = spec_.flag("literal_mean_rate");
        double s = 0, ss = 0;
        for (double v : r.sinr) {
            const double rate = std::log2(1.0 + v);
            const double x = literal ? 0.5 * rate * rate : rate;
            s += x;
            ss += x * x;
        }
        const double n = static_cast<double>(r.sinr.size());
        const double mean = s / n;
        const double var = n > 1 ? std::max(0.0, (ss - n * mean * mean) / (n - 1)) : 0.0;
        return {mean, std::sqrt(var / n)};
    }

    void series_rows(const Params &p, double sv);
    void coverage_rows(const Params &p, double sv);
    void load_rows(const Params &p, double sv);

    int line_of(const std::string &key) const {
        const auto it = spec_.entries.find(key);
        return it == spec_.entries.end() ? 0 : it->second.line;
    }

    const ExperimentSpec &spec_;
    std::ostream *log_;
    int trials_ = 0;
    std::uint64_t seed_ = 0;
    int threads_ = 0;
    std::filesystem::path dir_;
    std::vector<Row> rows_;
    std::vector<std::filesystem::path> sim_files_;
    std::map<TypicalKey, LoadPmf> typical_;
    std::map<LoadsKey, UserCentricLoads> loads_;
};

void Runner::coverage_rows(const Params &p, double sv) {
    const auto &grid = spec_.grid;
    CoverageCurve a, s;
    if (analytic()) {
        note("analytic coverage");
        a = spec_.architecture == Architecture::Traditional ? coverage_curve_traditional(traditional(p), grid)
                                                           : uc_curve(user_centric(p), p, grid);
    }
    if (simulate()) {
        note("simulating " + std::to_string(trials_) + " drops");
        const auto cfg = sim_config(p, grid);
        const auto r = run_sim(cfg);
        s = r.coverage;
        const auto file = dir_ / ("sim_" + std::to_string(sim_files_.size()) + ".json");
        std::ofstream os(file);
        r.write_json(os, cfg);
        sim_files_.push_back(file.filename());
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Row row{sv, grid[i], "coverage"};
        if (analytic()) {
            row.analytic = a.probabilities[i];
            row.analytic_error = a.errors.empty() ? 0.0 : a.errors[i];
        }
        if (simulate()) {
            row.simulated = s.probabilities[i];
            row.simulated_error = s.errors[i];
        }
        rows_.push_back(row);
    }
}

void Runner::load_rows(const Params &base_p, double sv) {
    for (double x : spec_.grid) {
        Params p = base_p;
        p.set("n_s", x);
        const int n_s = p.integer("n_s");
        std::vector<std::pair<std::string, LoadPmf>> a, s;
        if (analytic()) {
            a.emplace_back("typical", typical_pmf(p));
            note("tagged-AP load moments, N_s = " + std::to_string(n_s));
            const auto tagged = tagged_load_moments(p["ap_density"], p["user_density"], n_s, load_options(p));
            for (int i = 0; i < n_s; ++i) {
                if (!tagged[static_cast<std::size_t>(i)].converged)
                    throw Error(ErrorKind::Unconverged,
                                "tagged_load_moments: rank " + std::to_string(i + 1) + " standard error above tolerance");
                a.emplace_back("tagged_" + std::to_string(i + 1), LoadPmf::from_moments(tagged[static_cast<std::size_t>(i)]));
            }
        }
        if (simulate()) {
            note("simulating " + std::to_string(trials_) + " drops");
            const auto r = run_sim(sim_config(p, {1.0}));
            s.emplace_back("typical", r.typical_pmf());
            for (int i = 1; i <= n_s; ++i)
                s.emplace_back("tagged_" + std::to_string(i), r.tagged_pmf(i));
        }
        const std::size_t curves = std::max(a.size(), s.size());
        for (std::size_t c = 0; c < curves; ++c) {
            const auto &name = a.empty() ? s[c].first : a[c].first;
            int cap = 0;
            if (!a.empty())
                cap = std::max(cap, a[c].second.k_cap());
            if (!s.empty())
                cap = std::max(cap, s[c].second.k_cap());
            for (int k = 0; k <= cap; ++k) {
                Row row{sv, x, name, k};
                if (!a.empty()) {
                    row.analytic = a[c].second[k];
                    row.analytic_error = 0.0;
                }
                if (!s.empty()) {
                    row.simulated = s[c].second[k];
                    row.simulated_error = 0.0;
                }
                rows_.push_back(row);
            }
        }
    }
}

void Runner::series_rows(const Params &base_p, double sv) {
    switch (spec_.metric) {
    case Metric::Coverage:
        coverage_rows(base_p, sv);
        return;
    case Metric::LoadPmf:
        load_rows(base_p, sv);
        return;
    default:
        break;
    }
    const std::string key = canonical_key(spec_.sweep);
    std::map<int, SimResult> sim_by_ns;  // load-only metrics reuse one drop set per N_s
    for (double x : spec_.grid) {
        Params p = base_p;
        p.set(key, x);
        Row row{sv, x, to_string(spec_.metric)};
        const double t_s = db_to_linear(p["t_s_db"]);
        switch (spec_.metric) {
        case Metric::SumRate: {
            const int k = p.integer("k");
            if (analytic()) {
                note("analytic mean rate, K = " + std::to_string(k));
                row.analytic = k * analytic_mean_rate(p);
                row.analytic_error = 0.0;
            }
            if (simulate()) {
                const auto [m, e] = sim_mean_rate(run_sim(sim_config(p, {1.0})));
                row.simulated = k * m;
                row.simulated_error = k * e;
            }
            break;
        }
        case Metric::MeanRate:
            if (analytic()) {
                note("analytic mean rate, " + spec_.sweep + " = " + fmt(x));
                row.analytic = analytic_mean_rate(p);
                row.analytic_error = 0.0;
            }
            if (simulate()) {
                const auto [m, e] = sim_mean_rate(run_sim(sim_config(p, {1.0})));
                row.simulated = m;
                row.simulated_error = e;
            }
            break;
        case Metric::ScnrCoverage:
        case Metric::RequiredFronthaul: {
            const bool scnr = spec_.metric == Metric::ScnrCoverage;
            auto value = [&](const LoadPmf &pmf) {
                return scnr ? scnr_coverage(p["c_f"], t_s, pmf) : required_fronthaul(t_s, p["scnr_target"], pmf);
            };
            if (analytic()) {
                row.analytic = value(typical_pmf(p));
                row.analytic_error = 0.0;
            }
            if (simulate()) {
                const int n_s = p.integer("n_s");
                auto it = sim_by_ns.find(n_s);
                if (it == sim_by_ns.end()) {
                    note("simulating " + std::to_string(trials_) + " drops, N_s = " + std::to_string(n_s));
                    it = sim_by_ns.emplace(n_s, run_sim(sim_config(p, {1.0}))).first;
                }
                const auto pmf = it->second.typical_pmf();
                row.simulated = value(pmf);
                const double q = *row.simulated;
                row.simulated_error = scnr ? std::sqrt(std::max(0.0, q * (1.0 - q)) / trials_) : 0.0;
            }
            break;
        }
        default:
            break;
        }
        rows_.push_back(row);
    }
}

RunSummary Runner::run() {
    const auto started = iso_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(dir_);

    std::vector<double> series = spec_.series_values;
    const bool has_series = !spec_.series_key.empty();
    if (!has_series)
        series = {std::numeric_limits<double>::quiet_NaN()};
    for (double sv : series) {
        Params p = base();
        if (has_series) {
            p.set(spec_.series_key, sv);
            note(spec_.series_key + " = " + fmt(sv));
        }
        series_rows(p, sv);
    }

    // results.csv
    const std::string series_header = has_series ? spec_.series_key : "series";
    const auto csv_path = dir_ / "results.csv";
    {
        std::ofstream os(csv_path);
        os << series_header << ',' << spec_.sweep << ",curve,k,analytic,analytic_error,simulated,simulated_error\n";
        auto opt = [](const std::optional<double> &v) { return v ? fmt(*v) : std::string(); };
        for (const auto &r : rows_) {
            os << (has_series ? fmt(r.series) : std::string()) << ',' << fmt(r.x) << ',' << r.curve << ','
               << (r.k >= 0 ? std::to_string(r.k) : std::string()) << ',' << opt(r.analytic) << ','
               << opt(r.analytic_error) << ',' << opt(r.simulated) << ',' << opt(r.simulated_error) << '\n';
        }
    }

    RunSummary summary;
    summary.directory = dir_;
    if (spec_.mode == RunMode::Both) {
        std::map<std::tuple<double, double, std::string>, Agreement> by_curve;
        for (const auto &r : rows_) {
            if (!r.analytic || !r.simulated)
                continue;
            const bool pmf = r.k >= 0;
            const double xkey = pmf ? r.x : 0.0;
            auto &ag = by_curve[{has_series ? r.series : 0.0, xkey, r.curve}];
            ag.series = has_series ? spec_.series_key + "=" + fmt(r.series) : std::string("all");
            ag.curve = pmf ? r.curve + " (" + spec_.sweep + "=" + fmt(r.x) + ")" : r.curve;
            ag.total_variation = pmf;
            const double d = std::abs(*r.analytic - *r.simulated);
            ag.max_gap = pmf ? ag.max_gap + 0.5 * d : std::max(ag.max_gap, d);
        }
        for (const auto &[key, ag] : by_curve) {
            summary.agreement.push_back(ag);
            summary.max_gap = std::max(summary.max_gap, ag.max_gap);
        }
        if (spec_.tolerance)
            summary.within_tolerance = summary.max_gap <= *spec_.tolerance;
        std::ofstream os(dir_ / "agreement.txt");
        os << "experiment " << spec_.name << '\n';
        for (const auto &ag : summary.agreement)
            os << ag.series << ' ' << ag.curve << ' ' << (ag.total_variation ? "tv " : "max_gap ") << fmt(ag.max_gap)
               << '\n';
        os << "overall " << fmt(summary.max_gap);
        if (spec_.tolerance)
            os << " tolerance " << fmt(*spec_.tolerance) << ' ' << (summary.within_tolerance ? "PASS" : "FAIL");
        os << '\n';
    }

    nlohmann::ordered_json manifest;
    manifest["name"] = spec_.name;
    manifest["source"] = spec_.source;
    manifest["mode"] = to_string(spec_.mode);
    manifest["architecture"] = to_string(spec_.architecture);
    manifest["metric"] = to_string(spec_.metric);
    manifest["sweep"] = spec_.sweep;
    manifest["grid"] = spec_.grid;
    if (has_series)
        manifest["series"] = {{"key", spec_.series_key}, {"values", spec_.series_values}};
    manifest["seed"] = seed_;
    manifest["trials"] = trials_;
    nlohmann::ordered_json params;
    const Params p = base();
    for (const auto &[k, v] : p.values)
        params[k] = v;
    if (p.auto_cf)
        params["c_f"] = "auto";
    manifest["parameters"] = params;
    nlohmann::ordered_json outputs = {"results.csv"};
    if (spec_.mode == RunMode::Both)
        outputs.push_back("agreement.txt");
    for (const auto &f : sim_files_)
        outputs.push_back(f.string());
    manifest["outputs"] = outputs;
    if (spec_.mode == RunMode::Both) {
        nlohmann::ordered_json ags = nlohmann::ordered_json::array();
        for (const auto &ag : summary.agreement)
            ags.push_back({{"series", ag.series},
                           {"curve", ag.curve},
                           {ag.total_variation ? "total_variation" : "max_gap", ag.max_gap}});
        manifest["agreement"] = ags;
        manifest["max_gap"] = summary.max_gap;
        if (spec_.tolerance) {
            manifest["tolerance"] = *spec_.tolerance;
            manifest["within_tolerance"] = summary.within_tolerance;
        }
    }
    std::ofstream(dir_ / "manifest.json") << manifest.dump(2) << '\n';

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::ordered_json meta = {
        {"started", started}, {"finished", iso_now()}, {"wall_seconds", wall}, {"threads", threads_}};
    std::ofstream(dir_ / "metadata.json") << meta.dump(2) << '\n';
    return summary;
}

template <class E>
E parse_enum(const ExperimentSpec &spec, const std::string &key, const std::map<std::string, E> &options, E fallback,
             bool required) {
    const auto it = spec.entries.find(key);
    if (it == spec.entries.end()) {
        if (required)
            spec_error(spec.source, 0, key + ": missing");
        return fallback;
    }
    const auto v = lower(it->second.value);
    if (const auto o = options.find(v); o != options.end())
        return o->second;
    std::string allowed;
    for (const auto &[name, e] : options)
        allowed += (allowed.empty() ? "" : "|") + name;
    spec_error(spec.source, it->second.line, key + ": '" + it->second.value + "' is not one of " + allowed);
}

} // namespace

std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::Analytic: return "analytic";
    case RunMode::Simulate: return "simulate";
    case RunMode::Both: return "both";
    }
    return "?";
}

std::string to_string(Architecture a) {
    return a == Architecture::Traditional ? "traditional" : "user_centric";
}

std::string to_string(Metric m) {
    switch (m) {
    case Metric::Coverage: return "coverage";
    case Metric::SumRate: return "sum_rate";
    case Metric::MeanRate: return "mean_rate";
    case Metric::LoadPmf: return "load_pmf";
    case Metric::ScnrCoverage: return "scnr_coverage";
    case Metric::RequiredFronthaul: return "required_cf";
    }
    return "?";
}

double ExperimentSpec::number(const std::string &key) const {
    const auto d = numeric_defaults().find(key);
    if (d == numeric_defaults().end())
        throw Error(ErrorKind::InvalidSpec, source + ": unknown numeric parameter '" + key + "'");
    const auto it = entries.find(key);
    if (it == entries.end())
        return d->second;
    double v = 0;
    if (!parse_double(it->second.value, v))
        spec_error(source, it->second.line, key + ": '" + it->second.value + "' is not a number");
    return v;
}

bool ExperimentSpec::flag(const std::string &key) const {
    const auto it = entries.find(key);
    if (it == entries.end())
        return false;
    const auto v = lower(it->second.value);
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    spec_error(source, it->second.line, key + ": expected true or false");
}

bool ExperimentSpec::auto_fronthaul() const {
    const auto it = entries.find("c_f");
    return it == entries.end() || lower(it->second.value) == "auto";
}

ExperimentSpec ExperimentSpec::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidSpec, path.string() + ": cannot open spec file");
    auto spec = parse(in, path.string());
    if (!spec.entries.count("name"))
        spec.name = path.stem().string();
    if (!spec.entries.count("output"))
        spec.output = "out/" + spec.name;
    return spec;
}

ExperimentSpec ExperimentSpec::parse(std::istream &in, const std::string &source) {
    ExperimentSpec s;
    s.source = source;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            spec_error(source, line, "expected 'key = value'");
        const std::string key = lower(trim(text.substr(0, eq)));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            spec_error(source, line, "missing key before '='");
        if (!text_keys().count(key) && !numeric_defaults().count(key))
            spec_error(source, line, "unknown key '" + key + "'");
        if (value.empty())
            spec_error(source, line, key + ": missing value");
        if (s.entries.count(key))
            spec_error(source, line, key + ": duplicate (first set on line " + std::to_string(s.entries[key].line) + ")");
        s.entries[key] = {value, line};
    }

    auto line_of = [&](const std::string &k) {
        const auto it = s.entries.find(k);
        return it == s.entries.end() ? 0 : it->second.line;
    };
    auto text_of = [&](const std::string &k, const std::string &fallback) {
        const auto it = s.entries.find(k);
        return it == s.entries.end() ? fallback : it->second.value;
    };

    s.name = text_of("name", "experiment");
    s.mode = parse_enum<RunMode>(s, "mode", {{"analytic", RunMode::Analytic}, {"simulate", RunMode::Simulate},
                                            {"both", RunMode::Both}},
                                 RunMode::Analytic, false);
    s.architecture = parse_enum<Architecture>(
        s, "architecture", {{"traditional", Architecture::Traditional}, {"user_centric", Architecture::UserCentric}},
        Architecture::Traditional, true);
    s.metric = parse_enum<Metric>(s, "metric",
                                  {{"coverage", Metric::Coverage},
                                   {"sum_rate", Metric::SumRate},
                                   {"mean_rate", Metric::MeanRate},
                                   {"load_pmf", Metric::LoadPmf},
                                   {"scnr_coverage", Metric::ScnrCoverage},
                                   {"required_cf", Metric::RequiredFronthaul}},
                                  Metric::Coverage, true);
    s.output = text_of("output", "out/" + s.name);

    // sweep
    if (!s.entries.count("sweep"))
        spec_error(source, 0, "sweep: missing (one of T_r, K, C_f, T_s, N_s, N_a)");
    s.sweep = s.entries["sweep"].value;
    if (!sweep_keys().count(s.sweep))
        spec_error(source, line_of("sweep"), "sweep: '" + s.sweep + "' is not one of T_r, K, C_f, T_s, N_s, N_a");
    if (!s.entries.count("grid"))
        spec_error(source, 0, "grid: missing");
    s.grid = parse_values(s.entries["grid"].value, source, line_of("grid"), "grid");
    const std::string sweep_key = canonical_key(s.sweep);
    if (integer_keys().count(sweep_key))
        for (double v : s.grid)
            if (std::round(v) != v || v < 1)
                spec_error(source, line_of("grid"), "grid: " + s.sweep + " values must be positive integers");
    if (s.entries.count(sweep_key))
        spec_error(source, line_of(sweep_key), sweep_key + ": also the sweep variable; remove one of them");

    // series
    if (s.entries.count("series")) {
        const auto &v = s.entries["series"].value;
        const auto colon = v.find(':');
        if (colon == std::string::npos)
            spec_error(source, line_of("series"), "series: expected 'name: v1, v2, ...'");
        const std::string name = trim(v.substr(0, colon));
        s.series_key = canonical_key(name);
        if (!numeric_defaults().count(s.series_key))
            spec_error(source, line_of("series"), "series: unknown parameter '" + name + "'");
        if (s.series_key == sweep_key)
            spec_error(source, line_of("series"), "series: must differ from the sweep variable");
        if (s.entries.count(s.series_key))
            spec_error(source, line_of(s.series_key), s.series_key + ": also the series variable; remove one of them");
        s.series_values = parse_values(v.substr(colon + 1), source, line_of("series"), "series");
        if (integer_keys().count(s.series_key))
            for (double x : s.series_values)
                if (std::round(x) != x)
                    spec_error(source, line_of("series"), "series: " + s.series_key + " values must be integers");
    }

    // run controls
    if (s.entries.count("trials")) {
        double t = 0;
        if (!parse_double(s.entries["trials"].value, t) || t < 1 || std::round(t) != t)
            spec_error(source, line_of("trials"), "trials: must be a positive integer");
        s.trials = static_cast<int>(t);
    }
    if (s.entries.count("seed")) {
        try {
            std::size_t pos = 0;
            s.seed = std::stoull(s.entries["seed"].value, &pos, 0);
            if (pos != s.entries["seed"].value.size())
                throw std::invalid_argument("seed");
        } catch (const std::exception &) {
            spec_error(source, line_of("seed"), "seed: must be an unsigned integer");
        }
    }
    if (s.entries.count("threads")) {
        double t = 0;
        if (!parse_double(s.entries["threads"].value, t) || t < 0 || std::round(t) != t)
            spec_error(source, line_of("threads"), "threads: must be a nonnegative integer");
        s.threads = static_cast<int>(t);
    }
    if (s.entries.count("tolerance")) {
        double t = 0;
        if (!parse_double(s.entries["tolerance"].value, t) || !(t > 0))
            spec_error(source, line_of("tolerance"), "tolerance: must be a positive number");
        s.tolerance = t;
    }

    // every numeric value must parse; c_f also accepts "auto"
    for (const auto &[k, e] : s.entries) {
        if (!numeric_defaults().count(k) || (k == "c_f" && lower(e.value) == "auto"))
            continue;
        const double v = s.number(k);
        if (integer_keys().count(k) && std::round(v) != v)
            spec_error(source, e.line, k + ": expected an integer");
    }
    s.flag("literal_mean_rate");
    s.flag("literal_hcov");

    // metric and architecture combinations
    const bool uc = s.architecture == Architecture::UserCentric;
    const int ml = line_of("metric");
    switch (s.metric) {
    case Metric::Coverage:
        if (s.sweep != "T_r")
            spec_error(source, ml, "metric: coverage needs sweep = T_r");
        for (double v : s.grid)
            if (!(v > 0))
                spec_error(source, line_of("grid"), "grid: rate thresholds must be positive");
        break;
    case Metric::SumRate:
        if (uc || s.sweep != "K")
            spec_error(source, ml, "metric: sum_rate needs architecture = traditional and sweep = K");
        break;
    case Metric::MeanRate:
        if (s.sweep == "T_r")
            spec_error(source, ml, "metric: mean_rate integrates over T_r; sweep another variable");
        break;
    case Metric::LoadPmf:
    case Metric::RequiredFronthaul:
        if (!uc || s.sweep != "N_s")
            spec_error(source, ml, "metric: " + to_string(s.metric) + " needs architecture = user_centric and sweep = N_s");
        break;
    case Metric::ScnrCoverage:
        if (!uc || (s.sweep != "N_s" && s.sweep != "C_f"))
            spec_error(source, ml, "metric: scnr_coverage needs architecture = user_centric and sweep = N_s or C_f");
        if (s.sweep != "C_f" && s.series_key != "c_f" && s.auto_fronthaul())
            spec_error(source, line_of("c_f"), "c_f: scnr_coverage needs a numeric fronthaul capacity");
        break;
    }
    if (!uc && (s.sweep == "N_s" || s.series_key == "n_s"))
        spec_error(source, line_of("sweep"), "N_s applies to the user_centric architecture only");
    static const std::set<std::string> traditional_only = {"m", "k", "r_s", "total_antennas"};
    static const std::set<std::string> user_centric_only = {"n_s",        "ap_density", "user_density", "load_budget",
                                                            "qmc_budget", "window_radius", "guard", "scnr_target"};
    const auto &foreign = uc ? traditional_only : user_centric_only;
    for (const auto &[k, e] : s.entries)
        if (foreign.count(k))
            spec_error(source, e.line, k + ": not used by the " + to_string(s.architecture) + " architecture");
    auto swept = [&](const std::string &k) {
        if (foreign.count(k))
            spec_error(source, line_of(k == sweep_key ? "sweep" : "series"),
                       k + ": not used by the " + to_string(s.architecture) + " architecture");
    };
    swept(sweep_key);
    if (!s.series_key.empty())
        swept(s.series_key);
    return s;
}

RunSummary run_experiment(const ExperimentSpec &spec, const RunOverrides &overrides, std::ostream *log) {
    Runner r(spec, overrides, log);
    return r.run();
}

} // namespace cfmimo
