#pragma once

#include <string>

#include <json.hpp>

#include "rpf/baselines.hpp"
#include "rpf/metrics.hpp"
#include "rpf/pipeline.hpp"
#include "rpf/theory.hpp"

namespace rpf {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

Json to_json(const ForestParams& params);
Json to_json(const KMeansConfig& cfg);
Json to_json(const PipelineConfig& cfg);
Json to_json(const MetricReport& metrics);
Json to_json(const KernelBlockStats& stats);
Json to_json(const TuneResult& tuning, bool include_cells = false);
Json to_json(const SigmaSearchResult& search);
Json to_json(const StretchReport& stretch);
Json to_json(const SeparationExperiment& ex);
Json to_json(const BatteryResult& result);
Json to_json(const TreeSeparationReport& report);
Json to_json(const ShrinkageStats& stats);

/// Report skeleton: {"schema_version", "command", "deterministic": {...}, "timings": {...}}.
/// Everything that may differ between identical runs goes under "timings".
Json make_report(const std::string& command);

/// Fills report["deterministic"] with config, selected hyperparameters,
/// kernel statistics and metrics, and report["timings"] with stage timings.
void add_cluster_run(Json& report, const PipelineConfig& cfg, const ClusterRun& run, const TuneResult* tuning = nullptr);

/// Pretty-printed JSON followed by a newline.
std::string dump_report(const Json& report);

}  // namespace rpf
