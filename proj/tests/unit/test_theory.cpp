#include <doctest.h>

#include <numbers>

#include "../support/oracles.hpp"
#include "rpf/theory.hpp"

using namespace rpf;

namespace {

RowMatrix random_points(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  RowMatrix x(n, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

}  // namespace

TEST_CASE("principal_stretch examples") {
  RowMatrix two(2, 2);
  two << 0, 0, 3, 0;
  CHECK(principal_stretch(two, 100).rho == 3.0);

  RowMatrix square(4, 2);
  square << 0, 0, 1, 0, 0, 1, 1, 1;
  const StretchReport sq = principal_stretch(square, 1000);
  CHECK(sq.rho == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.neck_estimate <= sq.rho);
  CHECK(sq.neck_estimate >= 1.0 - 1e-12);  // true neck of the unit square is 1
  CHECK(sq.neck_estimate <= 1.0 + 1e-6);   // attained by the principal axis

  const RowMatrix x = random_points(100, 5, 3);
  const StretchReport r = principal_stretch(x, 2000);
  CHECK(r.rho == oracle::max_pairwise(x));
  CHECK((x.row(r.achieving_pair.first) - x.row(r.achieving_pair.second)).norm() == r.rho);
  CHECK(r.neck_estimate >= 0.0);
  CHECK(r.neck_estimate <= r.rho);
  CHECK(r.neck_directions_sampled == 2001);

  CHECK_THROWS_AS(principal_stretch(RowMatrix(1, 2)), ConfigError);
}

TEST_CASE("separation_probability examples") {
  RowMatrix two(2, 3);
  two << 0, 0, 0, 1, 2, 2;
  const SeparationExperiment pair = separation_probability(two, 0, 1, SplitRule::UniformInRange, 100000, 1);
  CHECK(pair.bound == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(pair.empirical_probability >= pair.bound - 3 * pair.standard_error);
  CHECK(pair.empirical_probability > 0.99);

  const SeparationExperiment same = separation_probability(two, 1, 1, SplitRule::UniformInRange, 1000, 1);
  CHECK(same.bound == 0.0);
  CHECK(same.empirical_probability == 0.0);

  // 200 uniform points in the unit square plus A and B
  Rng rng(42);
  std::uniform_real_distribution<double> u;
  RowMatrix sq(202, 2);
  for (Index i = 0; i < 200; ++i) sq.row(i) << u(rng), u(rng);
  sq.row(200) << 0.2, 0.5;
  sq.row(201) << 0.7, 0.5;
  const SeparationExperiment ex = separation_probability(sq, 200, 201, SplitRule::UniformInRange, 100000, 2);
  CHECK(ex.distance == doctest::Approx(0.5));
  CHECK(ex.bound == doctest::Approx(2 * 0.5 / (std::numbers::pi * principal_stretch(sq, 10).rho)));
  CHECK(ex.empirical_probability >= ex.bound - 3 * ex.standard_error);

  RowMatrix flat(3, 2);
  flat.setConstant(1.0);
  CHECK_THROWS_AS(separation_probability(flat, 0, 1, SplitRule::UniformInRange, 100, 1), ConfigError);
  CHECK_THROWS_AS(separation_probability(two, 0, 5, SplitRule::UniformInRange, 100, 1), ConfigError);
}

TEST_CASE("separation_probability: SE widens with fewer trials; result independent of threads") {
  const RowMatrix x = random_points(50, 2, 8);
  const auto small = separation_probability(x, 0, 1, SplitRule::UniformInRange, 100, 3);
  const auto large = separation_probability(x, 0, 1, SplitRule::UniformInRange, 10000, 3);
  const double p = small.empirical_probability;
  CHECK(small.standard_error == doctest::Approx(std::sqrt(p * (1 - p) / 100)));
  CHECK(small.standard_error > large.standard_error);
}

TEST_CASE("separation probability grows with distance along a fixed line") {
  Rng rng(5);
  std::uniform_real_distribution<double> u;
  RowMatrix x(60, 2);
  for (Index i = 0; i < 50; ++i) x.row(i) << u(rng), u(rng);
  for (Index k = 0; k < 10; ++k) x.row(50 + k) << 0.1 + 0.08 * (k + 1), 0.5;
  x.row(49) << 0.1, 0.5;  // A
  double prev = 0.0, prev_se = 0.0;
  for (Index k = 0; k < 10; ++k) {
    const auto ex = separation_probability(x, 49, 50 + k, SplitRule::UniformInRange, 20000, 11);
    CHECK(ex.empirical_probability >= prev - 2 * std::max(ex.standard_error, prev_se));
    prev = ex.empirical_probability;
    prev_se = ex.standard_error;
  }
}

TEST_CASE("battery layout and mean |cos|") {
  const auto cases = separation_battery();
  REQUIRE(cases.size() == 20);
  std::vector<Index> dims;
  for (const auto& c : cases) dims.push_back(static_cast<Index>(c.points.cols()));
  CHECK(std::count(dims.begin(), dims.end(), 1) == 5);
  CHECK(std::count(dims.begin(), dims.end(), 2) == 5);
  CHECK(std::count(dims.begin(), dims.end(), 5) == 5);
  CHECK(std::count(dims.begin(), dims.end(), 20) == 5);
  CHECK(generic_battery().size() == 10);

  CHECK(mean_abs_cosine(1) == doctest::Approx(1.0));
  CHECK(mean_abs_cosine(2) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(mean_abs_cosine(3) == doctest::Approx(0.5));
  // Monte Carlo check in R^5
  Rng rng(1);
  double acc = 0.0;
  for (int k = 0; k < 200000; ++k) acc += std::abs(random_direction(5, rng)(0));
  CHECK(acc / 200000 == doctest::Approx(mean_abs_cosine(5)).epsilon(0.01));
}

TEST_CASE("tree_separation_curve: far pair, duplicate pair, nested forests") {
  std::vector<int> labels;
  const RowMatrix x = oracle::gaussian_blobs({Eigen::RowVector2d(-5, 0), Eigen::RowVector2d(5, 0)}, 50, 1.0, 2, &labels);
  ForestParams p;
  p.leaf_size = 30;
  p.seed = 4;
  const StretchReport st = principal_stretch(x, 10);
  const auto far = tree_separation_curve(x, p, st.achieving_pair.first, st.achieving_pair.second, 30, {50, 100});
  CHECK(far.separation_frequency >= 0.9);
  CHECK(far.forests[0].mean <= 0.1);
  CHECK(far.distance == doctest::Approx(st.rho));

  RowMatrix dup = x;
  dup.row(3) = dup.row(7);
  const auto same = tree_separation_curve(dup, p, 3, 7, 30, {50});
  CHECK(same.separation_frequency == 0.0);
  CHECK(same.forests[0].mean == 1.0);
  CHECK(same.forests[0].sd == 0.0);
  CHECK(std::isnan(same.fitted_exponent));

  CHECK_THROWS_AS(tree_separation_curve(x, p, 0, 1, 10, {50}), ConfigError);
}

TEST_CASE("normal tail approximation") {
  CHECK(normal_tail_probability(0.1, 0.9, 400) == doctest::Approx(0.5));
  CHECK(normal_tail_probability(0.1, 0.5, 400) < 1e-10);
  CHECK(normal_tail_probability(0.1, 1.0, 400) == 1.0);
  CHECK(normal_tail_probability(0.1, 0.0, 400) == 0.0);
}

TEST_CASE("shrinkage measurement and tree bound") {
  const RowMatrix x = random_points(200, 2, 6);
  ForestParams p;
  p.leaf_size = 10;
  const ShrinkageStats s = measure_shrinkage(x, p, 10);
  CHECK(s.nodes_measured > 0);
  CHECK(s.gamma_min >= 0.0);  // singleton children have zero stretch
  CHECK(s.gamma_max <= 1.0);
  CHECK(s.gamma_min <= s.gamma_mean);
  CHECK(s.gamma_mean <= s.gamma_max);
  CHECK(s.splits_min >= 1);
  CHECK(s.splits_min <= s.splits_max);
  CHECK(tree_separation_lower_bound(0.0, 1.0, 0.9, 3) == 0.0);
  CHECK(tree_separation_lower_bound(1.0, 1.0, 0.5, 5) == 1.0);
  CHECK(tree_separation_lower_bound(0.1, 2.0, 1.0, 3) == doctest::Approx(0.1 / std::numbers::pi));
}
