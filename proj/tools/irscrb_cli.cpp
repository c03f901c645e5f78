// SPDX-License-Identifier: Apache-2.0
//
// irscrb: Cramer-Rao bound evaluation and beamforming design for
// reflecting-surface assisted non-line-of-sight sensing.
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

// irscrb command-line front end: `run` executes a YAML experiment, `validate` only checks it.

#include "irscrb/experiment.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void configure_logging() {
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("IRSCRB_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(env));
    spdlog::set_pattern("[%l] %v");
}

/// Prints diagnostics to stderr; returns true when none of them is an error.
bool report(const irscrb::cli::ParseResult& parsed, const std::string& source) {
    for (const auto& d : parsed.diagnostics) std::cerr << irscrb::cli::format(d, source) << "\n";
    return parsed.ok();
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Cramer-Rao bound evaluation and beamforming design for reflecting-surface NLoS sensing"};
    app.set_version_flag("--version", std::string(irscrb::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    irscrb::cli::Overrides overrides;
    std::uint64_t seed = 0;
    std::string out_dir;
    int trials = 0;
    int threads = 0;

    auto* run = app.add_subcommand("run", "Run an experiment and write <id>.csv and <id>.json");
    run->add_option("config", config_path, "Experiment YAML file")->required()->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", seed, "Override scenario.seed");
    auto* out_opt = run->add_option("--out", out_dir, "Override output.directory");
    auto* trials_opt = run->add_option("--trials", trials, "Override experiment.trials")->check(CLI::PositiveNumber);
    auto* threads_opt =
        run->add_option("--threads", threads, "Override output.threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a config and print diagnostics");
    validate->add_option("config", config_path, "Experiment YAML file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto parsed = irscrb::cli::load_config(config_path);
        const bool ok = report(parsed, config_path);

        if (validate->parsed()) {
            if (ok) std::cout << config_path << ": ok (hash " << irscrb::cli::config_hash(*parsed.config) << ")\n";
            return ok ? EXIT_SUCCESS : EXIT_FAILURE;
        }
        if (!ok) return EXIT_FAILURE;

        if (*seed_opt) overrides.seed = seed;
        if (*out_opt) overrides.out_dir = out_dir;
        if (*trials_opt) overrides.trials = trials;
        if (*threads_opt) overrides.threads = threads;
        irscrb::cli::ExperimentConfig config = *parsed.config;
        irscrb::cli::apply(overrides, config);

        const auto out = irscrb::cli::run_and_write(config);
        std::cout << out.csv_path << "\n" << out.json_path << "\n";
        return EXIT_SUCCESS;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return EXIT_FAILURE;
    }
}
