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

// Declarative experiment specs and the runner behind the command-line tool.
//
// A spec is a text file of `key = value` lines; `#` starts a comment. Units are
// part of the key name (rho_d_db, r_s in meters, densities per m^2).

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cfmimo {

enum class RunMode { Analytic, Simulate, Both };
enum class Architecture { Traditional, UserCentric };
enum class Metric { Coverage, SumRate, MeanRate, LoadPmf, ScnrCoverage, RequiredFronthaul };

struct SpecEntry {
    std::string value;
    int line = 0;
};

struct ExperimentSpec {
    std::string source = "<spec>";
    std::map<std::string, SpecEntry> entries;  // every key as written, lower-cased

    std::string name;
    RunMode mode = RunMode::Analytic;
    Architecture architecture = Architecture::Traditional;
    Metric metric = Metric::Coverage;
    std::string sweep;                 // T_r, K, C_f, T_s, N_s or N_a
    std::vector<double> grid;
    std::string series_key;            // empty: a single series
    std::vector<double> series_values;
    std::string output = "out";
    int trials = 10'000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::optional<double> tolerance;   // agreement bound checked in "both" mode

    /// Throws InvalidSpec with a "source:line: message" diagnostic.
    static ExperimentSpec parse(std::istream &in, const std::string &source = "<spec>");
    static ExperimentSpec load(const std::filesystem::path &path);

    /// Numeric parameter by key with the built-in default; throws InvalidSpec for unknown keys.
    double number(const std::string &key) const;
    bool flag(const std::string &key) const;
    /// True when c_f is given as "auto".
    bool auto_fronthaul() const;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::filesystem::path> output;
    std::optional<int> threads;
};

struct Agreement {
    std::string series;
    std::string curve;
    double max_gap = 0.0;  // max |analytic - simulated|; total variation for pmfs
    bool total_variation = false;
};

struct RunSummary {
    std::filesystem::path directory;
    std::vector<Agreement> agreement;
    double max_gap = 0.0;
    bool within_tolerance = true;
};

/// Runs the analytic and/or simulation paths and writes results.csv,
/// manifest.json, metadata.json (timestamps) and, in "both" mode, agreement.txt.
/// Numerical failures raise Unconverged naming the operation.
RunSummary run_experiment(const ExperimentSpec &spec, const RunOverrides &overrides = {},
                          std::ostream *log = nullptr);

std::string to_string(RunMode m);
std::string to_string(Architecture a);
std::string to_string(Metric m);

} // namespace cfmimo
