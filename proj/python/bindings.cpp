// Python bindings for the rpf library. Matrices cross as numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "rpf/baselines.hpp"
#include "rpf/dataset.hpp"
#include "rpf/kernel.hpp"
#include "rpf/metrics.hpp"
#include "rpf/pipeline.hpp"
#include "rpf/rpforest.hpp"
#include "rpf/spectral.hpp"
#include "rpf/theory.hpp"

namespace py = pybind11;
using namespace rpf;

namespace {

ForestParams forest_params(Index trees, Index leaf_size, std::uint64_t seed, const std::string& rule) {
  ForestParams fp;
  fp.trees = trees;
  fp.leaf_size = leaf_size;
  fp.seed = seed;
  fp.split_rule = split_rule_from_string(rule);
  fp.validate();
  return fp;
}

DataMatrix as_data(const RowMatrix& x, const std::optional<std::vector<int>>& labels) {
  if (!labels) return DataMatrix(x);
  // relabel by first appearance so arbitrary ids are accepted
  return DataMatrix(x, ClusterAssignment::from_labels(*labels).labels);
}

py::dict metrics_dict(const MetricReport& m) {
  py::dict d;
  d["rho_c"] = m.rho_c;
  d["rho_r"] = m.rho_r;
  d["n"] = m.n;
  d["K"] = m.K;
  d["l"] = m.l;
  return d;
}

py::tuple load(const std::string& path, std::optional<py::object> label_column, bool header) {
  CsvOptions opt;
  opt.has_header = header;
  if (label_column && !label_column->is_none()) {
    if (py::isinstance<py::str>(*label_column))
      opt.label_column = ColumnSelector{label_column->cast<std::string>()};
    else
      opt.label_column = ColumnSelector{label_column->cast<Index>()};
  }
  const DataMatrix d = load_csv(path, opt);
  py::object labels = py::none();
  if (d.has_labels()) labels = py::cast(d.labels());
  return py::make_tuple(d.values(), labels, d.feature_names(), d.class_names());
}

Eigen::MatrixXd kernel(const RowMatrix& x, Index trees, Index leaf_size, std::uint64_t seed, const std::string& rule) {
  py::gil_scoped_release release;
  return rpf_kernel(grow_forest(x, forest_params(trees, leaf_size, seed, rule))).matrix();
}

std::vector<std::vector<Index>> leaves(const RowMatrix& x, Index leaf_size, std::uint64_t seed,
                                       const std::string& rule) {
  ForestParams fp = forest_params(1, leaf_size, seed, rule);
  Rng rng = tree_stream(seed, 0);
  return leaf_partition(grow_tree(x, fp, rng));
}

py::dict cluster(const RowMatrix& x, Index K, std::optional<std::vector<int>> labels, Index trees, Index leaf_size,
                 std::uint64_t seed, double beta1, double beta2, const std::string& variant,
                 const std::string& tune_mode, bool fast_grid, const std::string& rule) {
  PipelineConfig cfg;
  cfg.K = K;
  cfg.forest = forest_params(trees, leaf_size, seed, rule);
  cfg.beta1 = beta1;
  cfg.beta2 = beta2;
  cfg.variant = spectral_variant_from_string(variant);
  cfg.njw_kmeans.seed = seed;
  const DataMatrix data = as_data(x, labels);

  std::optional<TunedRun> tuned;
  std::optional<ClusterRun> plain;
  {
    py::gil_scoped_release release;
    if (tune_mode == "none") {
      plain = rpf_cluster(data, cfg);
    } else {
      TuneCriterion c;
      if (tune_mode == "eigengap")
        c = TuneCriterion::Eigengap;
      else if (tune_mode == "oracle")
        c = TuneCriterion::Oracle;
      else
        throw ConfigError("tune must be none, eigengap or oracle");
      tuned = rpf_cluster_tuned(data, cfg, fast_grid ? TuneGrid::fast() : TuneGrid::full(), c);
      cfg.beta1 = tuned->tuning.beta1;
      cfg.beta2 = tuned->tuning.beta2;
    }
  }
  const ClusterRun& run = tuned ? tuned->run : *plain;
  py::dict out;
  out["labels"] = run.assignment.labels;
  out["beta1"] = cfg.beta1;
  out["beta2"] = cfg.beta2;
  out["kernel"] = run.kernel.matrix();
  if (run.diagnostics.metrics) out["metrics"] = metrics_dict(*run.diagnostics.metrics);
  return out;
}

py::dict bipartition(const Eigen::MatrixXd& s) {
  const Bipartition b = fiedler_bipartition(SimilarityMatrix(s));
  py::dict d;
  d["nonnegative"] = b.nonnegative;
  d["negative"] = b.negative;
  d["eigenvector"] = b.eigenvector;
  d["normalized_eigenvector"] = b.normalized_eigenvector;
  d["eigenvalue"] = b.eigenvalue;
  d["residual"] = b.residual;
  d["disconnected"] = b.disconnected;
  d["fallback"] = b.fallback;
  return d;
}

py::dict kmeans_py(const RowMatrix& x, Index K, Index restarts, Index max_iterations, std::uint64_t seed) {
  KMeansConfig cfg;
  cfg.K = K;
  cfg.restarts = restarts;
  cfg.max_iterations = max_iterations;
  cfg.seed = seed;
  KMeansResult r;
  {
    py::gil_scoped_release release;
    r = kmeans(x, cfg);
  }
  py::dict d;
  d["labels"] = r.labels;
  d["centroids"] = r.centroids;
  d["objective"] = r.objective;
  d["iterations"] = r.iterations;
  d["history"] = r.history;
  return d;
}

py::dict separation(const RowMatrix& points, Index a, Index b, Index trials, std::uint64_t seed,
                    const std::string& rule) {
  SeparationExperiment e;
  {
    py::gil_scoped_release release;
    e = separation_probability(points, a, b, split_rule_from_string(rule), trials, seed);
  }
  py::dict d;
  d["distance"] = e.distance;
  d["rho"] = e.rho;
  d["trials"] = e.trials;
  d["separated"] = e.separated;
  d["degenerate"] = e.degenerate;
  d["empirical_probability"] = e.empirical_probability;
  d["bound"] = e.bound;
  d["corrected_bound"] = e.corrected_bound;
  d["standard_error"] = e.standard_error;
  d["bound_holds"] = e.bound_holds;
  return d;
}

py::dict stretch(const RowMatrix& points, Index directions, std::uint64_t seed) {
  const StretchReport r = principal_stretch(points, directions, seed);
  py::dict d;
  d["rho"] = r.rho;
  d["achieving_pair"] = r.achieving_pair;
  d["neck_estimate"] = r.neck_estimate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random projection forest kernel and spectral clustering";

  // translators run newest first, so the base class goes in first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("load_csv", &load, py::arg("path"), py::arg("label_column") = py::none(), py::arg("header") = true,
        "Returns (X, labels or None, feature_names, class_names).");
  m.def("rpf_kernel", &kernel, py::arg("X"), py::arg("trees") = 400, py::arg("leaf_size") = 30, py::arg("seed") = 0,
        py::arg("split_rule") = "uniform");
  m.def("tree_leaves", &leaves, py::arg("X"), py::arg("leaf_size") = 30, py::arg("seed") = 0,
        py::arg("split_rule") = "uniform", "Leaf index sets of tree 0 of the forest with this seed.");
  m.def("cluster", &cluster, py::arg("X"), py::arg("K"), py::arg("labels") = py::none(), py::arg("trees") = 400,
        py::arg("leaf_size") = 30, py::arg("seed") = 0, py::arg("beta1") = 0.0, py::arg("beta2") = 1.0,
        py::arg("variant") = "ncut", py::arg("tune") = "none", py::arg("fast_grid") = true,
        py::arg("split_rule") = "uniform");
  m.def(
      "threshold_kernel",
      [](const Eigen::MatrixXd& s, double beta1) { return threshold_kernel(SimilarityMatrix(s), beta1).matrix(); },
      py::arg("S"), py::arg("beta1"));
  m.def(
      "rescale_kernel",
      [](const Eigen::MatrixXd& s, double beta2, bool literal) {
        return rescale_kernel(SimilarityMatrix(s), beta2, literal).matrix();
      },
      py::arg("S"), py::arg("beta2"), py::arg("literal_exp") = false);
  m.def("fiedler_bipartition", &bipartition, py::arg("S"));
  m.def(
      "ncut_recursive", [](const Eigen::MatrixXd& s, Index K) { return ncut_recursive(SimilarityMatrix(s), K).labels; },
      py::arg("S"), py::arg("K"));
  m.def(
      "ncut_objective",
      [](const Eigen::MatrixXd& s, const std::vector<IndexSet>& parts) { return ncut_objective(s, parts); },
      py::arg("S"), py::arg("parts"));
  m.def(
      "njw_cluster",
      [](const Eigen::MatrixXd& s, Index K, Index restarts, std::uint64_t seed) {
        KMeansConfig cfg;
        cfg.restarts = restarts;
        cfg.seed = seed;
        return njw_cluster(SimilarityMatrix(s), K, cfg).labels;
      },
      py::arg("S"), py::arg("K"), py::arg("restarts") = 10, py::arg("seed") = 0);
  m.def(
      "eigengap", [](const Eigen::MatrixXd& s, Index K) { return eigengap(SimilarityMatrix(s), K); }, py::arg("S"),
      py::arg("K"));
  m.def("kmeans", &kmeans_py, py::arg("X"), py::arg("K"), py::arg("restarts") = 100,
        py::arg("max_iterations") = 1000, py::arg("seed") = 0);
  m.def(
      "gaussian_kernel", [](const RowMatrix& x, double sigma) { return gaussian_kernel(x, sigma).matrix(); },
      py::arg("X"), py::arg("sigma"));
  m.def(
      "sigma_search",
      [](const RowMatrix& x, Index K) {
        const auto c = default_sigma_candidates(x);
        const SigmaSearchResult r = sigma_search(x, K, c);
        return py::make_tuple(r.sigma, r.eigengap);
      },
      py::arg("X"), py::arg("K"));
  m.def(
      "clustering_accuracy",
      [](const std::vector<int>& ref, const std::vector<int>& pred) { return clustering_accuracy(ref, pred); },
      py::arg("reference"), py::arg("predicted"));
  m.def(
      "cocluster_accuracy",
      [](const std::vector<int>& ref, const std::vector<int>& pred) { return cocluster_accuracy(ref, pred); },
      py::arg("reference"), py::arg("predicted"));
  m.def(
      "evaluate",
      [](const std::vector<int>& ref, const std::vector<int>& pred) { return metrics_dict(evaluate(ref, pred)); },
      py::arg("reference"), py::arg("predicted"));
  m.def("separation_probability", &separation, py::arg("points"), py::arg("a"), py::arg("b"),
        py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("split_rule") = "uniform");
  m.def("principal_stretch", &stretch, py::arg("points"), py::arg("neck_directions") = 10000, py::arg("seed") = 0);
  m.def("mean_abs_cosine", &mean_abs_cosine, py::arg("p"));
}
