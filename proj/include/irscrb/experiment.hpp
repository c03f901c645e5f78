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

#ifndef IRSCRB_EXPERIMENT_HPP
#define IRSCRB_EXPERIMENT_HPP

#include "irscrb/core.hpp"
#include "irscrb/opt_point.hpp"
#include "irscrb/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

/// Declarative experiment runner behind the command-line tool.
namespace irscrb::cli {

enum class Kind { crb_point, crb_extended, optimize_point, optimize_extended, mse_sweep, convergence };
enum class Axis { none, p0_dbm, antennas, elements, trials };
enum class Scheme { joint, snr_max, reflective_only, transmit_only, isotropic };

const char* to_string(Kind kind);
const char* to_string(Axis axis);
const char* to_string(Scheme scheme);

struct ExperimentConfig {
    std::string id = "experiment";
    Kind kind = Kind::crb_point;
    Axis axis = Axis::none;
    std::vector<double> values;
    std::vector<Scheme> schemes{Scheme::joint};
    int realizations = 1;   // channel / target draws averaged per point
    int trials = 100;       // Monte-Carlo trials per point
    bool redraw = false;    // fresh channel and target per Monte-Carlo trial
    std::optional<double> design_theta_deg;  // design angle; defaults to the true angle
    bool record_wall_time = false;

    Scenario scenario;  // powers overwritten from the dBm fields below
    double tx_power_dbm = 30.0;
    double noise_power_dbm = -120.0;
    double k0_db = -30.0;

    OptimizerParams optimizer;
    std::string output_dir = "results";
    int threads = 1;

    /// Scenario at one sweep value (linear units).
    Scenario scenario_at(double axis_value) const;
    int trials_at(double axis_value) const;
};

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    int line = 0;  // 1-based; 0 when unknown
    std::string message;
};

std::string format(const Diagnostic& d, const std::string& source);

struct ParseResult {
    std::optional<ExperimentConfig> config;  // present iff no errors
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return config.has_value(); }
};

/// Parses and validates a YAML config held in memory.
ParseResult parse_config(const std::string& text);
/// Reads then parses; throws std::runtime_error if the file cannot be read.
ParseResult load_config(const std::string& path);

struct ResultRow {
    std::string experiment;
    std::string scheme;
    std::string axis;
    double axis_value = 0.0;
    double crb = kInf;
    std::optional<double> mse;
    std::optional<double> mse_stderr;
    std::optional<double> iterations;
    std::optional<double> wall_ms;
    std::uint64_t seed = 0;
    std::string config_hash;
};

inline constexpr const char* kCsvHeader =
    "experiment,scheme,axis,axis_value,crb_linear,crb_db,mse_linear,mse_db,mse_stderr,iterations,wall_ms,seed,"
    "config_hash";

/// Canonical JSON of the fully resolved config (sorted keys, defaults filled in).
std::string resolved_json(const ExperimentConfig& config);
/// FNV-1a of resolved_json, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Executes every sweep point and scheme; rows come back in sweep order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string to_csv(const std::vector<ResultRow>& rows);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> trials;
    std::optional<int> threads;
};

void apply(const Overrides& overrides, ExperimentConfig& config);

struct RunOutput {
    std::vector<ResultRow> rows;
    std::string csv_path;
    std::string json_path;
    std::string config_hash;
};

/// run_experiment plus the CSV and JSON sidecar written to config.output_dir.
RunOutput run_and_write(const ExperimentConfig& config);

}  // namespace irscrb::cli

#endif  // IRSCRB_EXPERIMENT_HPP
