#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptile/generators.hpp"

namespace ptile::lab {

inline constexpr const char* kVersion = "ptile-lab 1.0";

enum class Scenario {
    hole_scan,
    greedy_tiling,
    factor_decision,
    absorber_census,
    absorbing_pipeline,
    appendix_invariants,
    threshold_sweep
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

/// Metric columns of a scenario, in CSV order.
const std::vector<std::string>& scenario_metrics(Scenario s);

struct ExperimentConfig {
    Scenario scenario = Scenario::hole_scan;
    std::optional<GenSpec> gen;
    std::string graph_path; // used when gen is empty
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    int instances = 1;
    bool record_timing = false;
    std::string csv_path;
    std::string json_path;
    nlohmann::json canonical; // the config document minus "output"
    std::string hash;
};

/// Parses and validates a config document. Relative paths resolve against base_dir.
/// Throws ptile::Error (message starting with "config:") on any problem, before work starts.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 over the sorted-key dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

struct ResultRecord {
    std::string config_hash;
    std::string scenario;
    nlohmann::json instance; // {index, seed, gen | graph}
    std::vector<std::pair<std::string, nlohmann::json>> metrics;
    std::string status = "ok"; // "ok" or "error"
    std::string error;
    double wall_ms = 0.0;
    std::string version = kVersion;

    const nlohmann::json* metric(const std::string& name) const;
};

/// Instance descriptors in run order.
std::vector<nlohmann::json> instances(const ExperimentConfig& cfg);

/// Evaluates one serialized instance. Failures are captured in the record.
ResultRecord evaluate(const ExperimentConfig& cfg, const nlohmann::json& instance);

/// Worker count: LAB_THREADS when set (>= 1), else hardware concurrency, capped by the job count.
int worker_count(std::size_t jobs);

/// Runs every instance on a worker pool; the result order matches instances(cfg).
std::vector<ResultRecord> run(const ExperimentConfig& cfg, int threads = 0);

std::string records_to_csv(const std::vector<ResultRecord>& records, bool with_timing);
nlohmann::json records_to_json(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> records_from_json(const nlohmann::json& doc);

/// Writes the configured CSV/JSON outputs.
void write_outputs(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records);

enum class PlotKind { line, heatmap };
PlotKind plot_kind_from_name(const std::string& name);

struct PlotOptions {
    std::string x; // empty: scenario default
    std::string y;
    std::string value; // heatmap cell value; empty: record count
};

/// Deterministic self-contained SVG. Line plots average y per distinct x; heatmaps place one
/// cell per distinct (x, y). Throws on an empty set, mixed scenarios, or unknown metrics.
std::string render_plot(const std::vector<ResultRecord>& records, PlotKind kind, const PlotOptions& opt = {});
void emit_plot(const std::vector<ResultRecord>& records, PlotKind kind, const std::string& path,
               const PlotOptions& opt = {});

} // namespace ptile::lab
