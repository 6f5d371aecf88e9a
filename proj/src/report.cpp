#include "rpf/report.hpp"

#include <cmath>

namespace rpf {

namespace {

// NaN and infinities are not JSON numbers
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json to_json(const ForestParams& params) {
  return Json{{"trees", params.trees},
              {"leaf_size", params.leaf_size},
              {"split_rule", to_string(params.split_rule)},
              {"seed", params.seed}};
}

Json to_json(const KMeansConfig& cfg) {
  return Json{{"K", cfg.K},
              {"max_iterations", cfg.max_iterations},
              {"restarts", cfg.restarts},
              {"seed", cfg.seed},
              {"init", cfg.init == KMeansInit::KMeansPlusPlus ? "kmeans++" : "random-partition"}};
}

Json to_json(const PipelineConfig& cfg) {
  Json j{{"forest", to_json(cfg.forest)},
         {"beta1", cfg.beta1},
         {"beta2", cfg.beta2},
         {"K", cfg.K},
         {"variant", to_string(cfg.variant)},
         {"split_selection", cfg.split_selection == SplitSelection::BestNcut ? "best-ncut" : "largest"},
         {"literal_exp", cfg.literal_exp}};
  if (cfg.variant == SpectralVariant::NJW) j["njw_kmeans"] = to_json(cfg.njw_kmeans);
  return j;
}

Json to_json(const MetricReport& metrics) {
  return Json{{"rho_c", metrics.rho_c}, {"rho_r", metrics.rho_r}, {"n", metrics.n}, {"K", metrics.K}, {"l", metrics.l}};
}

Json to_json(const KernelBlockStats& stats) {
  return Json{{"within_mean", number(stats.within_mean)},
              {"between_mean", number(stats.between_mean)},
              {"block_means", matrix_rows(stats.block_means)}};
}

Json to_json(const TuneResult& tuning, bool include_cells) {
  Json j{{"beta1", tuning.beta1}, {"beta2", tuning.beta2}, {"score", number(tuning.score)},
         {"cells_evaluated", tuning.cells.size()}};
  if (include_cells) {
    Json cells = Json::array();
    for (const auto& c : tuning.cells)
      cells.push_back(Json{{"beta1", c.beta1}, {"beta2", c.beta2}, {"score", number(c.score)},
                           {"secondary", number(c.secondary)}});
    j["cells"] = std::move(cells);
  }
  return j;
}

Json to_json(const SigmaSearchResult& search) {
  Json cand = Json::array(), gaps = Json::array();
  for (double c : search.candidates) cand.push_back(number(c));
  for (double g : search.gaps) gaps.push_back(number(g));
  return Json{{"sigma", number(search.sigma)}, {"eigengap", number(search.eigengap)}, {"candidates", cand},
              {"gaps", gaps}};
}

Json to_json(const StretchReport& stretch) {
  return Json{{"rho", number(stretch.rho)},
              {"achieving_pair", {stretch.achieving_pair.first, stretch.achieving_pair.second}},
              {"neck_estimate", number(stretch.neck_estimate)},
              {"neck_directions_sampled", stretch.neck_directions_sampled}};
}

Json to_json(const SeparationExperiment& ex) {
  return Json{{"pair", {ex.a, ex.b}},
              {"distance", number(ex.distance)},
              {"rho", number(ex.rho)},
              {"trials", ex.trials},
              {"separated", ex.separated},
              {"degenerate", ex.degenerate},
              {"empirical_probability", number(ex.empirical_probability)},
              {"bound", number(ex.bound)},
              {"corrected_bound", number(ex.corrected_bound)},
              {"standard_error", number(ex.standard_error)},
              {"bound_holds", ex.bound_holds}};
}

Json to_json(const BatteryResult& result) {
  Json j{{"name", result.name}, {"dim", result.dim}};
  j.update(to_json(result.experiment));
  return j;
}

Json to_json(const TreeSeparationReport& report) {
  Json forests = Json::array();
  for (const auto& f : report.forests) {
    Json tails = Json::array();
    for (const auto& t : f.tails)
      tails.push_back(Json{{"delta", t.delta}, {"empirical", number(t.empirical)},
                           {"normal_approximation", number(t.normal_approximation)}});
    forests.push_back(Json{{"trees", f.trees}, {"mean", number(f.mean)}, {"sd", number(f.sd)},
                           {"binomial_sd", number(f.binomial_sd)}, {"tails", std::move(tails)}});
  }
  return Json{{"pair", {report.a, report.b}},
              {"distance", number(report.distance)},
              {"rho", number(report.rho)},
              {"root_bound", number(report.root_bound)},
              {"single_trees", report.single_trees},
              {"separation_frequency", number(report.separation_frequency)},
              {"forests", std::move(forests)},
              {"fitted_exponent", number(report.fitted_exponent)}};
}

Json to_json(const ShrinkageStats& stats) {
  return Json{{"gamma_min", number(stats.gamma_min)}, {"gamma_max", number(stats.gamma_max)},
              {"gamma_mean", number(stats.gamma_mean)}, {"splits_min", stats.splits_min},
              {"splits_max", stats.splits_max}, {"nodes_measured", stats.nodes_measured}};
}

Json make_report(const std::string& command) {
  return Json{{"schema_version", kReportSchemaVersion},
              {"command", command},
              {"deterministic", Json::object()},
              {"timings", Json::object()}};
}

void add_cluster_run(Json& report, const PipelineConfig& cfg, const ClusterRun& run, const TuneResult* tuning) {
  Json& det = report["deterministic"];
  det["config"] = to_json(cfg);
  if (tuning) det["tuning"] = to_json(*tuning);
  det["selected"] = Json{{"beta1", tuning ? tuning->beta1 : cfg.beta1}, {"beta2", tuning ? tuning->beta2 : cfg.beta2}};
  det["kernel"] = Json{{"n", run.kernel.size()},
                       {"nonzeros", run.diagnostics.kernel_nonzeros},
                       {"thresholded_nonzeros", run.diagnostics.thresholded_nonzeros}};
  if (run.diagnostics.blocks) det["kernel"]["blocks"] = to_json(*run.diagnostics.blocks);
  Json sizes = Json::array();
  for (const auto& c : run.assignment.clusters()) sizes.push_back(c.size());
  det["cluster_sizes"] = std::move(sizes);
  if (run.diagnostics.metrics) det["metrics"] = to_json(*run.diagnostics.metrics);
  for (const auto& [stage, ms] : run.diagnostics.timings_ms) report["timings"][stage + "_ms"] = ms;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace rpf
