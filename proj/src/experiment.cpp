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

#include "irscrb/experiment.hpp"

#include "irscrb/baselines.hpp"
#include "irscrb/estimate.hpp"
#include "irscrb/opt_extended.hpp"
#include "irscrb/sensing.hpp"

#include <json.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace irscrb::cli {

namespace {

using Severity = Diagnostic::Severity;

const std::map<std::string, Kind> kKinds{
    {"crb-point", Kind::crb_point},           {"crb-extended", Kind::crb_extended},
    {"optimize-point", Kind::optimize_point}, {"optimize-extended", Kind::optimize_extended},
    {"mse-sweep", Kind::mse_sweep},           {"convergence", Kind::convergence},
};

const std::map<std::string, Axis> kAxes{
    {"P0_dbm", Axis::p0_dbm}, {"M", Axis::antennas}, {"N", Axis::elements}, {"trials", Axis::trials}};

const std::map<std::string, Scheme> kSchemes{
    {"joint", Scheme::joint},
    {"snr-max", Scheme::snr_max},
    {"reflective-only", Scheme::reflective_only},
    {"transmit-only", Scheme::transmit_only},
    {"isotropic", Scheme::isotropic},
};

template <typename E>
std::string name_of(const std::map<std::string, E>& table, E value) {
    for (const auto& [k, v] : table)
        if (v == value) return k;
    return "unknown";
}

bool point_kind(Kind k) { return k == Kind::crb_point || k == Kind::optimize_point || k == Kind::convergence; }
bool extended_kind(Kind k) { return k == Kind::crb_extended || k == Kind::optimize_extended; }

/// Collects diagnostics while walking the YAML tree.
class Reader {
public:
    std::vector<Diagnostic> diagnostics;
    std::map<std::string, int> lines;  // dotted path -> line of its value

    static int line_of(const YAML::Node& node) {
        if (!node.IsDefined()) return 0;
        const int line = node.Mark().line;
        return line >= 0 ? line + 1 : 0;
    }

    void error(int line, const std::string& message) { diagnostics.push_back({Severity::error, line, message}); }
    void warning(int line, const std::string& message) { diagnostics.push_back({Severity::warning, line, message}); }

    int line(const std::string& path) const {
        const auto it = lines.find(path);
        return it == lines.end() ? 0 : it->second;
    }

    bool expect_map(const YAML::Node& node, const std::string& path) {
        if (node.IsMap()) return true;
        error(line_of(node), path + ": expected a mapping");
        return false;
    }

    void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& path) {
        for (auto it = map.begin(); it != map.end(); ++it) {
            const std::string key = it->first.Scalar();
            if (!allowed.count(key)) error(line_of(it->first), "unknown key '" + join(path, key) + "'");
        }
    }

    template <typename T>
    bool get(const YAML::Node& map, const std::string& key, T& out, const std::string& path, const char* what) {
        const YAML::Node node = map[key];
        if (!node.IsDefined()) return false;
        const std::string full = join(path, key);
        lines[full] = line_of(node);
        try {
            if (!node.IsScalar()) throw YAML::Exception(node.Mark(), "not a scalar");
            out = node.as<T>();
            return true;
        } catch (const YAML::Exception&) {
            error(line_of(node), full + ": expected " + what);
            return false;
        }
    }

    bool get_double(const YAML::Node& map, const std::string& key, double& out, const std::string& path) {
        const YAML::Node node = map[key];
        if (node.IsDefined() && node.IsScalar()) {
            std::string s = node.Scalar();
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
            if (s == "inf" || s == "infinity" || s == ".inf" || s == "+inf") {
                lines[join(path, key)] = line_of(node);
                out = kInf;
                return true;
            }
        }
        return get(map, key, out, path, "a number");
    }

    bool get_point(const YAML::Node& map, const std::string& key, Eigen::Vector2d& out, const std::string& path) {
        const YAML::Node node = map[key];
        if (!node.IsDefined()) return false;
        const std::string full = join(path, key);
        lines[full] = line_of(node);
        try {
            if (!node.IsSequence() || node.size() != 2) throw YAML::Exception(node.Mark(), "");
            out = {node[0].as<double>(), node[1].as<double>()};
            return true;
        } catch (const YAML::Exception&) {
            error(line_of(node), full + ": expected a 2-element list [x, y] in meters");
            return false;
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

void parse_experiment(const YAML::Node& node, ExperimentConfig& c, Reader& r) {
    const std::string p = "experiment";
    if (!r.expect_map(node, p)) return;
    r.check_keys(node,
                 {"id", "kind", "schemes", "sweep", "realizations", "trials", "redraw", "design_theta_deg",
                  "record_wall_time"},
                 p);
    std::string kind;
    if (r.get(node, "kind", kind, p, "a string")) {
        const auto it = kKinds.find(kind);
        if (it == kKinds.end()) {
            r.error(r.line("experiment.kind"),
                    "experiment.kind: unknown kind '" + kind +
                        "' (expected crb-point, crb-extended, optimize-point, optimize-extended, mse-sweep or "
                        "convergence)");
        } else {
            c.kind = it->second;
        }
    } else if (!node["kind"].IsDefined()) {
        r.error(Reader::line_of(node), "experiment.kind: missing");
    }
    if (!r.get(node, "id", c.id, p, "a string")) c.id = kind.empty() ? "experiment" : kind;
    if (c.id.empty() || c.id.find_first_of("/\\,\n") != std::string::npos)
        r.error(r.line("experiment.id"), "experiment.id: must be non-empty and free of '/', '\\' and ','");

    const YAML::Node schemes = node["schemes"];
    if (schemes.IsDefined()) {
        r.lines["experiment.schemes"] = Reader::line_of(schemes);
        if (!schemes.IsSequence() || schemes.size() == 0) {
            r.error(Reader::line_of(schemes), "experiment.schemes: expected a non-empty list");
        } else {
            c.schemes.clear();
            for (const auto& s : schemes) {
                const auto it = kSchemes.find(s.IsScalar() ? s.Scalar() : "");
                if (it == kSchemes.end()) {
                    r.error(Reader::line_of(s), "experiment.schemes: unknown scheme '" +
                                                    (s.IsScalar() ? s.Scalar() : std::string("?")) + "'");
                } else if (std::find(c.schemes.begin(), c.schemes.end(), it->second) != c.schemes.end()) {
                    r.error(Reader::line_of(s), "experiment.schemes: duplicate scheme '" + s.Scalar() + "'");
                } else {
                    c.schemes.push_back(it->second);
                }
            }
        }
    }

    const YAML::Node sweep = node["sweep"];
    if (sweep.IsDefined() && r.expect_map(sweep, "experiment.sweep")) {
        r.lines["experiment.sweep"] = Reader::line_of(sweep);
        r.check_keys(sweep, {"axis", "values"}, "experiment.sweep");
        std::string axis;
        if (r.get(sweep, "axis", axis, "experiment.sweep", "a string")) {
            const auto it = kAxes.find(axis);
            if (it == kAxes.end()) {
                r.error(r.line("experiment.sweep.axis"),
                        "experiment.sweep.axis: unknown axis '" + axis + "' (expected P0_dbm, M, N or trials)");
            } else {
                c.axis = it->second;
            }
        } else if (!sweep["axis"].IsDefined()) {
            r.error(Reader::line_of(sweep), "experiment.sweep.axis: missing");
        }
        const YAML::Node values = sweep["values"];
        r.lines["experiment.sweep.values"] = Reader::line_of(values.IsDefined() ? values : sweep);
        if (!values.IsDefined() || !values.IsSequence() || values.size() == 0) {
            r.error(r.line("experiment.sweep.values"), "experiment.sweep.values: expected a non-empty list");
        } else {
            for (const auto& v : values) {
                try {
                    c.values.push_back(v.as<double>());
                } catch (const YAML::Exception&) {
                    r.error(Reader::line_of(v), "experiment.sweep.values: expected numbers");
                }
            }
        }
    }

    r.get(node, "realizations", c.realizations, p, "an integer");
    r.get(node, "trials", c.trials, p, "an integer");
    r.get(node, "redraw", c.redraw, p, "a boolean");
    r.get(node, "record_wall_time", c.record_wall_time, p, "a boolean");
    double theta = 0.0;
    if (r.get_double(node, "design_theta_deg", theta, p)) c.design_theta_deg = theta;
}

void parse_scenario(const YAML::Node& node, ExperimentConfig& c, Reader& r) {
    const std::string p = "scenario";
    if (!r.expect_map(node, p)) return;
    r.check_keys(node,
                 {"ap_position", "irs_position", "target", "antennas", "elements", "dwell", "tx_power_dbm",
                  "noise_power_dbm", "rician_factor", "pathloss", "spacing_ratio", "seed"},
                 p);
    Scenario& s = c.scenario;
    r.get_point(node, "ap_position", s.ap_position, p);
    r.get_point(node, "irs_position", s.irs_position, p);
    r.get(node, "antennas", s.antennas, p, "an integer");
    r.get(node, "elements", s.elements, p, "an integer");
    r.get(node, "dwell", s.dwell, p, "an integer");
    r.get_double(node, "tx_power_dbm", c.tx_power_dbm, p);
    r.get_double(node, "noise_power_dbm", c.noise_power_dbm, p);
    r.get_double(node, "rician_factor", s.rician_factor, p);
    r.get_double(node, "spacing_ratio", s.spacing_ratio, p);
    r.get(node, "seed", s.seed, p, "an unsigned 64-bit integer");

    const YAML::Node pl = node["pathloss"];
    if (pl.IsDefined() && r.expect_map(pl, "scenario.pathloss")) {
        r.check_keys(pl, {"k0_db", "d0", "exponent"}, "scenario.pathloss");
        r.get_double(pl, "k0_db", c.k0_db, "scenario.pathloss");
        r.get_double(pl, "d0", s.pathloss.d0, "scenario.pathloss");
        r.get_double(pl, "exponent", s.pathloss.exponent, "scenario.pathloss");
    }

    const YAML::Node tg = node["target"];
    if (tg.IsDefined() && r.expect_map(tg, "scenario.target")) {
        r.lines["scenario.target"] = Reader::line_of(tg);
        std::string kind = "point";
        r.get(tg, "kind", kind, "scenario.target", "a string");
        if (kind == "point") {
            r.check_keys(tg, {"kind", "position"}, "scenario.target");
            PointTargetSpec spec;
            r.get_point(tg, "position", spec.position, "scenario.target");
            s.target = spec;
        } else if (kind == "extended") {
            r.check_keys(tg, {"kind", "center", "radius", "count"}, "scenario.target");
            ExtendedTargetSpec spec;
            r.get_point(tg, "center", spec.center, "scenario.target");
            r.get_double(tg, "radius", spec.radius, "scenario.target");
            r.get(tg, "count", spec.count, "scenario.target", "an integer");
            s.target = spec;
        } else {
            r.error(r.line("scenario.target.kind"), "scenario.target.kind: expected 'point' or 'extended'");
        }
    }
}

void parse_optimizer(const YAML::Node& node, ExperimentConfig& c, Reader& r) {
    const std::string p = "optimizer";
    if (!r.expect_map(node, p)) return;
    r.check_keys(node, {"randomizations", "tol_outer", "max_outer", "tol_inner", "max_inner"}, p);
    OptimizerParams& o = c.optimizer;
    r.get(node, "randomizations", o.randomizations, p, "an integer");
    r.get_double(node, "tol_outer", o.tol_outer, p);
    r.get(node, "max_outer", o.max_outer, p, "an integer");
    r.get_double(node, "tol_inner", o.tol_inner, p);
    r.get(node, "max_inner", o.max_inner, p, "an integer");
}

void parse_solver(const YAML::Node& node, ExperimentConfig& c, Reader& r) {
    const std::string p = "solver";
    if (!r.expect_map(node, p)) return;
    r.check_keys(node, {"gap_tolerance", "accept_tolerance", "max_iterations", "presolve_tolerance"}, p);
    sdp::Settings& s = c.optimizer.solver;
    r.get_double(node, "gap_tolerance", s.gap_tolerance, p);
    r.get_double(node, "accept_tolerance", s.accept_tolerance, p);
    r.get(node, "max_iterations", s.max_iterations, p, "an integer");
    r.get_double(node, "presolve_tolerance", s.presolve_tolerance, p);
}

void parse_output(const YAML::Node& node, ExperimentConfig& c, Reader& r) {
    const std::string p = "output";
    if (!r.expect_map(node, p)) return;
    r.check_keys(node, {"directory", "threads"}, p);
    r.get(node, "directory", c.output_dir, p, "a path");
    r.get(node, "threads", c.threads, p, "an integer");
}

void check_semantics(const ExperimentConfig& c, Reader& r) {
    auto at = [&](const std::string& path) { return r.line(path); };
    const Scenario& s = c.scenario;

    if (s.antennas <= 1) r.error(at("scenario.antennas"), "scenario.antennas: need M > 1");
    if (s.elements <= 1) r.error(at("scenario.elements"), "scenario.elements: need N > 1");
    if (s.dwell < 1) r.error(at("scenario.dwell"), "scenario.dwell: need T >= 1");
    if (!std::isfinite(c.tx_power_dbm)) r.error(at("scenario.tx_power_dbm"), "scenario.tx_power_dbm: must be finite");
    if (!std::isfinite(c.noise_power_dbm))
        r.error(at("scenario.noise_power_dbm"), "scenario.noise_power_dbm: must be finite");
    if (!(s.rician_factor >= 0.0)) r.error(at("scenario.rician_factor"), "scenario.rician_factor: must be >= 0");
    if (!(s.spacing_ratio > 0.0)) r.error(at("scenario.spacing_ratio"), "scenario.spacing_ratio: must be > 0");
    if (!(s.pathloss.d0 > 0.0)) r.error(at("scenario.pathloss.d0"), "scenario.pathloss.d0: must be > 0");
    if (!std::isfinite(c.k0_db)) r.error(at("scenario.pathloss.k0_db"), "scenario.pathloss.k0_db: must be finite");
    if ((s.ap_position - s.irs_position).norm() <= 0.0)
        r.error(at("scenario.irs_position"), "scenario.irs_position: must differ from the AP position");
    if (const auto* ext = std::get_if<ExtendedTargetSpec>(&s.target)) {
        if (ext->count < 1) r.error(at("scenario.target.count"), "scenario.target.count: need at least one scatterer");
        if (!(ext->radius >= 0.0)) r.error(at("scenario.target.radius"), "scenario.target.radius: must be >= 0");
        if ((ext->center - s.irs_position).norm() <= ext->radius)
            r.error(at("scenario.target.center"),
                    "scenario.target.center: scatterer circle must not contain the IRS position");
    } else {
        const auto& pt = std::get<PointTargetSpec>(s.target);
        if ((pt.position - s.irs_position).norm() <= 0.0)
            r.error(at("scenario.target.position"), "scenario.target.position: must differ from the IRS position");
    }

    if (c.realizations < 1) r.error(at("experiment.realizations"), "experiment.realizations: need >= 1");
    if (c.trials < 1) r.error(at("experiment.trials"), "experiment.trials: need >= 1");
    if (c.threads < 1) r.error(at("output.threads"), "output.threads: need >= 1");
    const OptimizerParams& o = c.optimizer;
    if (o.randomizations < 0) r.error(at("optimizer.randomizations"), "optimizer.randomizations: need >= 0");
    if (o.max_outer < 1) r.error(at("optimizer.max_outer"), "optimizer.max_outer: need >= 1");
    if (o.max_inner < 1) r.error(at("optimizer.max_inner"), "optimizer.max_inner: need >= 1");
    if (!(o.tol_outer > 0.0)) r.error(at("optimizer.tol_outer"), "optimizer.tol_outer: must be > 0");
    if (!(o.tol_inner > 0.0)) r.error(at("optimizer.tol_inner"), "optimizer.tol_inner: must be > 0");
    if (!(o.solver.gap_tolerance > 0.0) || !(o.solver.accept_tolerance >= o.solver.gap_tolerance))
        r.error(at("solver.accept_tolerance"), "solver: need 0 < gap_tolerance <= accept_tolerance");
    if (o.solver.max_iterations < 1) r.error(at("solver.max_iterations"), "solver.max_iterations: need >= 1");

    // Sweep.
    const bool needs_sweep = c.kind != Kind::convergence;
    if (needs_sweep && c.axis == Axis::none && !r.lines.count("experiment.sweep"))
        r.error(0, "experiment.sweep: required for kind '" + std::string(to_string(c.kind)) + "'");
    if (c.kind == Kind::convergence && r.lines.count("experiment.sweep"))
        r.error(at("experiment.sweep"), "experiment.sweep: not used by kind 'convergence'");
    for (std::size_t i = 1; i < c.values.size(); ++i)
        if (!(c.values[i] > c.values[i - 1])) {
            r.error(at("experiment.sweep.values"), "experiment.sweep.values: must be strictly increasing");
            break;
        }
    for (double v : c.values) {
        if (!std::isfinite(v)) {
            r.error(at("experiment.sweep.values"), "experiment.sweep.values: must be finite");
            break;
        }
        if (c.axis == Axis::antennas || c.axis == Axis::elements || c.axis == Axis::trials) {
            if (v != std::floor(v) || v < (c.axis == Axis::trials ? 1.0 : 2.0)) {
                r.error(at("experiment.sweep.values"), std::string("experiment.sweep.values: axis ") +
                                                           to_string(c.axis) + " needs integers >= " +
                                                           (c.axis == Axis::trials ? "1" : "2"));
                break;
            }
        }
    }
    if (c.axis == Axis::trials && c.kind != Kind::mse_sweep)
        r.error(at("experiment.sweep.axis"), "experiment.sweep.axis: 'trials' only applies to mse-sweep");

    // Target model and schemes.
    const bool ext = s.extended();
    if (point_kind(c.kind) && ext)
        r.error(at("scenario.target"), std::string("scenario.target: kind '") + to_string(c.kind) +
                                           "' needs a point target");
    if (extended_kind(c.kind) && !ext)
        r.error(at("scenario.target"), std::string("scenario.target: kind '") + to_string(c.kind) +
                                           "' needs an extended target");
    for (Scheme sc : c.schemes) {
        bool ok = true;
        if (c.kind == Kind::optimize_point || c.kind == Kind::convergence) ok = sc == Scheme::joint;
        else if (ext) ok = sc == Scheme::joint || sc == Scheme::isotropic;
        if (!ok)
            r.error(at("experiment.schemes"), std::string("experiment.schemes: scheme '") + to_string(sc) +
                                                  "' is not available for kind '" + to_string(c.kind) + "'" +
                                                  (ext ? " with an extended target" : ""));
    }

    // Static estimability.
    std::vector<double> points = c.values.empty() ? std::vector<double>{0.0} : c.values;
    for (double v : points) {
        const int m = c.axis == Axis::antennas ? static_cast<int>(v) : s.antennas;
        const int n = c.axis == Axis::elements ? static_cast<int>(v) : s.elements;
        if (ext && m < n) {
            r.error(at(c.axis == Axis::antennas || c.axis == Axis::elements ? "experiment.sweep.values"
                                                                            : "scenario.antennas"),
                    fmt::format("target response matrix not estimable: rank(G) <= M < N (M={}, N={}); the "
                                "extended-target bound needs rank(G) = N",
                                m, n));
            break;
        }
    }
    if (!ext && std::isinf(s.rician_factor))
        r.warning(at("scenario.rician_factor"),
                  "scenario.rician_factor: line-of-sight-only channel has rank 1, so the angle is not estimable "
                  "and every bound will be reported as inf");
}

}  // namespace

const char* to_string(Kind kind) {
    switch (kind) {
        case Kind::crb_point: return "crb-point";
        case Kind::crb_extended: return "crb-extended";
        case Kind::optimize_point: return "optimize-point";
        case Kind::optimize_extended: return "optimize-extended";
        case Kind::mse_sweep: return "mse-sweep";
        case Kind::convergence: return "convergence";
    }
    return "unknown";
}

const char* to_string(Axis axis) {
    switch (axis) {
        case Axis::none: return "none";
        case Axis::p0_dbm: return "P0_dbm";
        case Axis::antennas: return "M";
        case Axis::elements: return "N";
        case Axis::trials: return "trials";
    }
    return "unknown";
}

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::joint: return "joint";
        case Scheme::snr_max: return "snr-max";
        case Scheme::reflective_only: return "reflective-only";
        case Scheme::transmit_only: return "transmit-only";
        case Scheme::isotropic: return "isotropic";
    }
    return "unknown";
}

Scenario ExperimentConfig::scenario_at(double axis_value) const {
    Scenario s = scenario;
    s.tx_power = dbm_to_watts(axis == Axis::p0_dbm ? axis_value : tx_power_dbm);
    s.noise_power = dbm_to_watts(noise_power_dbm);
    s.pathloss.k0 = db_to_linear(k0_db);
    if (axis == Axis::antennas) s.antennas = static_cast<int>(axis_value);
    if (axis == Axis::elements) s.elements = static_cast<int>(axis_value);
    return s;
}

int ExperimentConfig::trials_at(double axis_value) const {
    return axis == Axis::trials ? static_cast<int>(axis_value) : trials;
}

std::string format(const Diagnostic& d, const std::string& source) {
    const char* sev = d.severity == Diagnostic::Severity::error ? "error" : "warning";
    if (d.line > 0) return fmt::format("{}:{}: {}: {}", source, d.line, sev, d.message);
    return fmt::format("{}: {}: {}", source, sev, d.message);
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    Reader r;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        result.diagnostics.push_back({Severity::error, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg});
        return result;
    }
    if (!root.IsMap()) {
        result.diagnostics.push_back({Severity::error, Reader::line_of(root), "config root must be a mapping"});
        return result;
    }

    ExperimentConfig c;
    r.check_keys(root, {"experiment", "scenario", "optimizer", "solver", "output"}, "");
    if (root["experiment"].IsDefined()) {
        parse_experiment(root["experiment"], c, r);
    } else {
        r.error(0, "experiment: missing section");
    }
    if (root["scenario"].IsDefined()) parse_scenario(root["scenario"], c, r);
    if (root["optimizer"].IsDefined()) parse_optimizer(root["optimizer"], c, r);
    if (root["solver"].IsDefined()) parse_solver(root["solver"], c, r);
    if (root["output"].IsDefined()) parse_output(root["output"], c, r);
    check_semantics(c, r);

    result.diagnostics = std::move(r.diagnostics);
    std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    const bool has_error = std::any_of(result.diagnostics.begin(), result.diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::error;
    });
    if (!has_error) result.config = std::move(c);
    return result;
}

ParseResult load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// ---------------------------------------------------------------- canonical form

namespace {

nlohmann::json point_json(const Eigen::Vector2d& p) { return nlohmann::json::array({p.x(), p.y()}); }

nlohmann::json number_or_inf(double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); }

nlohmann::json to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    json schemes = json::array();
    for (Scheme s : c.schemes) schemes.push_back(to_string(s));
    json exp{{"id", c.id},
             {"kind", to_string(c.kind)},
             {"schemes", schemes},
             {"sweep", {{"axis", to_string(c.axis)}, {"values", c.values}}},
             {"realizations", c.realizations},
             {"trials", c.trials},
             {"redraw", c.redraw},
             {"design_theta_deg", c.design_theta_deg ? json(*c.design_theta_deg) : json(nullptr)},
             {"record_wall_time", c.record_wall_time}};

    const Scenario& s = c.scenario;
    json target;
    if (const auto* pt = std::get_if<PointTargetSpec>(&s.target)) {
        target = {{"kind", "point"}, {"position", point_json(pt->position)}};
    } else {
        const auto& e = std::get<ExtendedTargetSpec>(s.target);
        target = {{"kind", "extended"}, {"center", point_json(e.center)}, {"radius", e.radius}, {"count", e.count}};
    }
    json scen{{"ap_position", point_json(s.ap_position)},
              {"irs_position", point_json(s.irs_position)},
              {"target", target},
              {"antennas", s.antennas},
              {"elements", s.elements},
              {"dwell", s.dwell},
              {"tx_power_dbm", c.tx_power_dbm},
              {"noise_power_dbm", c.noise_power_dbm},
              {"rician_factor", number_or_inf(s.rician_factor)},
              {"pathloss", {{"k0_db", c.k0_db}, {"d0", s.pathloss.d0}, {"exponent", s.pathloss.exponent}}},
              {"spacing_ratio", s.spacing_ratio},
              {"seed", s.seed}};
    const OptimizerParams& o = c.optimizer;
    json opt{{"randomizations", o.randomizations},
             {"tol_outer", o.tol_outer},
             {"max_outer", o.max_outer},
             {"tol_inner", o.tol_inner},
             {"max_inner", o.max_inner}};
    json solver{{"gap_tolerance", o.solver.gap_tolerance},
                {"accept_tolerance", o.solver.accept_tolerance},
                {"max_iterations", o.solver.max_iterations},
                {"presolve_tolerance", o.solver.presolve_tolerance}};
    // Output location and thread count do not change results and stay out of the hash.
    return json{{"experiment", exp}, {"scenario", scen}, {"optimizer", opt}, {"solver", solver}};
}

}  // namespace

std::string resolved_json(const ExperimentConfig& config) { return to_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
    return fmt::format("{:016x}", hash_tag(resolved_json(config)));
}

// ---------------------------------------------------------------- execution

namespace {

struct Instance {
    Channel channel;
    TargetModel target;
};

Instance draw_instance(const Scenario& s, const Stream& base, int realization) {
    Stream ch = base.substream("channel", static_cast<std::uint64_t>(realization));
    Stream tg = base.substream("target", static_cast<std::uint64_t>(realization));
    Channel channel = make_channel(s, ch);
    TargetModel target = make_target(s, tg);
    return {std::move(channel), std::move(target)};
}

double design_angle(const ExperimentConfig& c, double true_theta) {
    return c.design_theta_deg ? *c.design_theta_deg * kPi / 180.0 : true_theta;
}

BeamformerPair point_design(Scheme scheme, const Scenario& s, const Channel& ch, double theta,
                            const OptimizerParams& params, Stream& rng, double* iterations) {
    switch (scheme) {
        case Scheme::joint: {
            const Algorithm1Trace trace = algorithm1(s, ch, theta, params, rng);
            if (iterations) *iterations = trace.outer_iterations();
            return {trace.final().rx, trace.final().v};
        }
        case Scheme::snr_max: return snr_max_design(ch, theta, s.tx_power, s.spacing_ratio, params, rng);
        case Scheme::reflective_only: return reflective_only(s, ch, theta, params, rng);
        case Scheme::transmit_only: return transmit_only(s, ch, theta, params, rng);
        case Scheme::isotropic: {
            Stream init = rng.substream("initial-phases");
            return {isotropic_extended(s), init.unit_modulus_vector(ch.elements())};
        }
    }
    throw ContractError("point_design: unknown scheme");
}

CMatrix extended_design(Scheme scheme, const Scenario& s, const Channel& ch) {
    if (scheme == Scheme::joint) return optimal_rx_extended(ch, s.tx_power, s.dwell, s.noise_power).rx;
    return isotropic_extended(s);
}

double mean_or_inf(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return kInf;
    return v.empty() ? kInf : pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

struct Task {
    double axis_value;
    Scheme scheme;
};

std::vector<ResultRow> run_task(const ExperimentConfig& c, const Task& task, const Stream& base, int mc_threads) {
    const Scenario s = c.scenario_at(task.axis_value);
    ResultRow proto;
    proto.experiment = c.id;
    proto.scheme = to_string(task.scheme);
    proto.axis = to_string(c.axis);
    proto.axis_value = task.axis_value;
    proto.seed = s.seed;

    std::vector<ResultRow> rows;
    switch (c.kind) {
        case Kind::crb_point:
        case Kind::optimize_point: {
            std::vector<double> crbs;
            std::vector<double> iters;
            for (int r = 0; r < c.realizations; ++r) {
                const Instance inst = draw_instance(s, base, r);
                const auto& pt = std::get<PointTarget>(inst.target);
                Stream rng = base.substream("design", static_cast<std::uint64_t>(r)).substream(proto.scheme);
                double it = 0.0;
                try {
                    const BeamformerPair pair =
                        point_design(task.scheme, s, inst.channel, design_angle(c, pt.theta), c.optimizer, rng, &it);
                    crbs.push_back(crb_point(inst.channel, pair.v, pair.rx, pt.theta, pt.alpha, s.dwell,
                                             s.noise_power, s.spacing_ratio)
                                       .value);
                } catch (const EstimabilityError& e) {
                    spdlog::info("{} = {}: {}", proto.axis, task.axis_value, e.what());
                    crbs.push_back(kInf);
                }
                iters.push_back(it);
            }
            ResultRow row = proto;
            row.crb = mean_or_inf(crbs);
            if (task.scheme == Scheme::joint) row.iterations = pairwise_sum(iters.data(), iters.size()) / iters.size();
            rows.push_back(row);
            break;
        }
        case Kind::crb_extended: {
            std::vector<double> crbs;
            for (int r = 0; r < c.realizations; ++r) {
                const Instance inst = draw_instance(s, base, r);
                try {
                    crbs.push_back(
                        crb_extended(inst.channel, extended_design(task.scheme, s, inst.channel), s.dwell, s.noise_power)
                            .value);
                } catch (const EstimabilityError&) {
                    crbs.push_back(kInf);
                }
            }
            ResultRow row = proto;
            row.crb = mean_or_inf(crbs);
            rows.push_back(row);
            break;
        }
        case Kind::optimize_extended: {
            std::vector<double> closed, numeric, iters;
            for (int r = 0; r < c.realizations; ++r) {
                const Instance inst = draw_instance(s, base, r);
                try {
                    if (task.scheme == Scheme::joint) {
                        closed.push_back(optimal_rx_extended(inst.channel, s.tx_power, s.dwell, s.noise_power).crb);
                        const ExtendedSdpResult sdp = sdp_cross_check(inst.channel, s.tx_power, c.optimizer.solver);
                        numeric.push_back(sdp.status == sdp::Status::optimal
                                              ? crb_extended(inst.channel, sdp.rx, s.dwell, s.noise_power).value
                                              : kInf);
                        iters.push_back(sdp.iterations);
                    } else {
                        closed.push_back(isotropic_crb(inst.channel, s.tx_power, s.dwell, s.noise_power));
                    }
                } catch (const EstimabilityError&) {
                    closed.push_back(kInf);
                    numeric.push_back(kInf);
                    iters.push_back(0.0);
                }
            }
            ResultRow row = proto;
            row.crb = mean_or_inf(closed);
            rows.push_back(row);
            if (task.scheme == Scheme::joint) {
                ResultRow sdp_row = proto;
                sdp_row.scheme = "joint-sdp";
                sdp_row.crb = mean_or_inf(numeric);
                sdp_row.iterations = pairwise_sum(iters.data(), iters.size()) / iters.size();
                rows.push_back(sdp_row);
            }
            break;
        }
        case Kind::mse_sweep: {
            const Scheme scheme = task.scheme;
            const OptimizerParams& params = c.optimizer;
            Designer designer = [&](const Channel& ch, const TargetModel& target, Stream& rng) -> BeamformerPair {
                if (const auto* pt = std::get_if<PointTarget>(&target))
                    return point_design(scheme, s, ch, design_angle(c, pt->theta), params, rng, nullptr);
                return {extended_design(scheme, s, ch), rng.unit_modulus_vector(ch.elements())};
            };
            MonteCarloOptions mc;
            mc.trials = c.trials_at(task.axis_value);
            mc.redraw = c.redraw;
            mc.threads = mc_threads;
            ResultRow row = proto;
            try {
                const MseReport rep = monte_carlo_mse(s, designer, mc, base.substream("monte-carlo"));
                row.crb = rep.crb;
                row.mse = rep.mse;
                row.mse_stderr = rep.stderr_mse;
                if (rep.failures > 0)
                    spdlog::warn("{} = {}: {} of {} trials failed", proto.axis, task.axis_value, rep.failures, mc.trials);
            } catch (const EstimabilityError& e) {
                spdlog::info("{} = {}: {}", proto.axis, task.axis_value, e.what());
            }
            rows.push_back(row);
            break;
        }
        case Kind::convergence: {
            const Instance inst = draw_instance(s, base, 0);
            const auto& pt = std::get<PointTarget>(inst.target);
            Stream rng = base.substream("design", 0).substream(proto.scheme);
            try {
                const Algorithm1Trace trace =
                    algorithm1(s, inst.channel, design_angle(c, pt.theta), c.optimizer, rng);
                for (int l = 0; l < trace.outer_iterations(); ++l) {
                    const OuterRecord& rec = trace.records[static_cast<std::size_t>(l)];
                    ResultRow row = proto;
                    row.axis = "outer_iteration";
                    row.axis_value = l + 1;
                    row.crb = crb_point(inst.channel, rec.v, rec.rx, pt.theta, pt.alpha, s.dwell, s.noise_power,
                                        s.spacing_ratio)
                                  .value;
                    row.iterations = rec.inner_iterations;
                    rows.push_back(row);
                }
            } catch (const EstimabilityError& e) {
                spdlog::info("convergence: {}", e.what());
                ResultRow row = proto;
                row.axis = "outer_iteration";
                row.axis_value = 1;
                rows.push_back(row);
            }
            break;
        }
    }
    return rows;
}

std::string fmt_number(double v, const char* spec) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format(fmt::runtime(spec), v);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    const Stream base(config.scenario.seed, "experiment");
    const std::string hash = config_hash(config);

    std::vector<Task> tasks;
    const std::vector<double> points = config.values.empty() ? std::vector<double>{0.0} : config.values;
    for (double v : points)
        for (Scheme s : config.schemes) tasks.push_back({v, s});

    // Monte-Carlo runs parallelize over trials; everything else over sweep points.
    const bool mc = config.kind == Kind::mse_sweep;
    const int outer_threads = mc ? 1 : std::clamp(config.threads, 1, static_cast<int>(tasks.size()));
    const int inner_threads = mc ? config.threads : 1;

    std::vector<std::vector<ResultRow>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            spdlog::debug("{}: {} {} = {}", config.id, to_string(tasks[i].scheme), to_string(config.axis),
                         tasks[i].axis_value);
            results[i] = run_task(config, tasks[i], base, inner_threads);
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            for (auto& row : results[i]) {
                row.config_hash = hash;
                if (config.record_wall_time) row.wall_ms = ms;
            }
        }
    };
    if (outer_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < outer_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<ResultRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        const auto opt = [](const std::optional<double>& v, const char* spec) {
            return v ? fmt_number(*v, spec) : std::string();
        };
        const auto db = [](double v) { return v > 0.0 ? fmt_number(to_db(v), "{:.6f}") : std::string("nan"); };
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_escape(r.experiment), r.scheme, r.axis,
                           fmt_number(r.axis_value, "{:g}"), fmt_number(r.crb, "{:.9e}"),
                           db(r.crb), opt(r.mse, "{:.9e}"),
                           r.mse ? db(*r.mse) : std::string(), opt(r.mse_stderr, "{:.3e}"),
                           opt(r.iterations, "{:g}"), opt(r.wall_ms, "{:.3f}"), r.seed, r.config_hash);
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

void apply(const Overrides& o, ExperimentConfig& c) {
    if (o.seed) c.scenario.seed = *o.seed;
    if (o.out_dir) c.output_dir = *o.out_dir;
    if (o.trials) {
        require(*o.trials >= 1, "--trials must be >= 1");
        c.trials = *o.trials;
    }
    if (o.threads) {
        require(*o.threads >= 1, "--threads must be >= 1");
        c.threads = *o.threads;
    }
}

RunOutput run_and_write(const ExperimentConfig& config) {
    RunOutput out;
    out.rows = run_experiment(config);
    out.config_hash = config_hash(config);
    const std::filesystem::path dir(config.output_dir);
    out.csv_path = (dir / (config.id + ".csv")).string();
    out.json_path = (dir / (config.id + ".json")).string();

    nlohmann::json sidecar{{"config", to_json(config)},
                           {"version", kVersion},
                           {"config_hash", out.config_hash},
                           {"rows", out.rows.size()},
                           {"csv", std::filesystem::path(out.csv_path).filename().string()}};
    write_atomic(out.csv_path, to_csv(out.rows));
    write_atomic(out.json_path, sidecar.dump(2) + "\n");
    return out;
}

}  // namespace irscrb::cli
