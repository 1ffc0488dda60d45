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

// cfmimo: run an experiment spec and write its tables.
//
// Exit status: 0 success, 1 runtime error, 2 invalid spec, 3 unconverged
// numerics, 4 analytic/simulation gap above the spec tolerance.

#include "cfmimo/error.hpp"
#include "cfmimo/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"Cell-free massive MIMO coverage and load experiments"};
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> out;
    std::optional<int> threads;
    bool quiet = false;
    app.add_option("spec", spec_path, "Experiment spec file")->required();
    app.add_option("--seed", seed, "Override the spec seed");
    app.add_option("--trials", trials, "Override the number of Monte Carlo drops")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "Output directory (default: the spec's output key)");
    app.add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    app.add_flag("-q,--quiet", quiet, "No progress messages");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto spec = cfmimo::ExperimentSpec::load(spec_path);
        cfmimo::RunOverrides ov;
        ov.seed = seed;
        ov.trials = trials;
        ov.threads = threads;
        if (out)
            ov.output = *out;
        const auto summary = cfmimo::run_experiment(spec, ov, quiet ? nullptr : &std::clog);
        std::cout << "wrote " << (summary.directory / "results.csv").string() << '\n';
        if (spec.mode == cfmimo::RunMode::Both) {
            for (const auto &ag : summary.agreement)
                std::cout << "  " << ag.series << ' ' << ag.curve << (ag.total_variation ? " tv " : " max_gap ")
                          << ag.max_gap << '\n';
            std::cout << "max gap " << summary.max_gap;
            if (spec.tolerance)
                std::cout << " (tolerance " << *spec.tolerance << ", " << (summary.within_tolerance ? "PASS" : "FAIL")
                          << ')';
            std::cout << '\n';
        }
        return summary.within_tolerance ? 0 : 4;
    } catch (const cfmimo::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
        case cfmimo::ErrorKind::InvalidSpec:
            return 2;
        case cfmimo::ErrorKind::Unconverged:
            return 3;
        default:
            return 1;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
