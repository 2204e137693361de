#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/preprocess.hpp"
#include "helpers.hpp"

using namespace zeroday;

namespace {

Matrix from_columns(const std::vector<std::vector<double>>& cols) {
  Matrix m(cols[0].size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < cols[c].size(); ++r) m(r, c) = cols[c][r];
  }
  return m;
}

// brute-force recomputation used to audit the pruning scan
double pearson_abs(const Matrix& x, std::size_t i, std::size_t j) {
  const std::size_t n = x.rows();
  double mi = 0, mj = 0;
  for (std::size_t r = 0; r < n; ++r) {
    mi += x(r, i);
    mj += x(r, j);
  }
  mi /= n;
  mj /= n;
  double cov = 0, vi = 0, vj = 0;
  for (std::size_t r = 0; r < n; ++r) {
    cov += (x(r, i) - mi) * (x(r, j) - mj);
    vi += (x(r, i) - mi) * (x(r, i) - mi);
    vj += (x(r, j) - mj) * (x(r, j) - mj);
  }
  if (vi == 0.0 || vj == 0.0) return 0.0;
  return std::fabs(cov / std::sqrt(vi * vj));
}

}  // namespace

TEST_CASE("correlation: exact values") {
  Matrix dup = from_columns({{1, 2, 3}, {1, 2, 3}});
  CHECK(correlation_matrix(dup).values(0, 1) == doctest::Approx(1.0));

  Matrix lin = from_columns({{1, 2, 3}, {2, 4, 6}});
  CHECK(correlation_matrix(lin).values(0, 1) == doctest::Approx(1.0));

  Matrix half = from_columns({{1, 2, 3}, {1, 3, 2}});
  CHECK(correlation_matrix(half).values(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("correlation: zero-variance columns and errors") {
  Matrix m = from_columns({{5, 5, 5}, {1, 2, 3}});
  CorrelationMatrix corr = correlation_matrix(m);
  CHECK(corr.values(0, 1) == 0.0);
  CHECK(corr.values(0, 0) == 0.0);  // constant column
  CHECK(corr.values(1, 1) == 1.0);

  Matrix one_row(1, 2, {1.0, 2.0});
  CHECK_THROWS_AS(correlation_matrix(one_row), Error);
}

TEST_CASE("drop: duplicate column dropped with its witness") {
  Matrix m = from_columns({{1, 2, 3, 4}, {1, 2, 3, 4}});
  DropResult res = drop_correlated_features(m, {"a", "b"}, 0.9);
  CHECK(res.report.kept == std::vector<std::string>{"a"});
  REQUIRE(res.report.dropped.size() == 1);
  CHECK(res.report.dropped[0].column == "b");
  CHECK(res.report.dropped[0].witness == "a");
  CHECK(res.report.dropped[0].correlation > 0.9);
  CHECK(res.pruned.cols() == 1);
}

TEST_CASE("drop: kept-witness scan keeps b when only a~c correlate") {
  // corr(a,c)=1, corr(a,b)=corr(b,c)=0
  std::vector<double> a{1, 2, 3, 4};
  std::vector<double> b{1, -1, -1, 1};
  std::vector<double> c{2, 4, 6, 8};
  Matrix m = from_columns({a, b, c});
  DropResult res = drop_correlated_features(m, {"a", "b", "c"}, 0.9);
  CHECK(res.report.kept == std::vector<std::string>{"a", "b"});
  REQUIRE(res.report.dropped.size() == 1);
  CHECK(res.report.dropped[0].column == "c");
  CHECK(res.report.dropped[0].witness == "a");
}

TEST_CASE("drop: strict inequality at threshold 1.0 never fires") {
  Rng rng(3);
  Matrix m = testutil::random_normal_matrix(50, 6, rng);
  DropResult res = drop_correlated_features(m, {}, 1.0);
  CHECK(res.report.dropped.empty());
  CHECK(res.pruned.cols() == 6);
}

TEST_CASE("drop: constant columns land in their own report list") {
  Matrix m = from_columns({{1, 2, 3}, {7, 7, 7}, {3, 1, 2}});
  DropResult res = drop_correlated_features(m, {"a", "k", "b"}, 0.9);
  CHECK(res.report.dropped_constant == std::vector<std::string>{"k"});
  CHECK(res.report.kept == std::vector<std::string>{"a", "b"});
  // union covers the original columns
  CHECK(res.report.kept.size() + res.report.dropped.size() +
            res.report.dropped_constant.size() ==
        3);
}

TEST_CASE("drop: pruned set never holds a pair above the threshold") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 30 + rng.below(30);
    const std::size_t base_cols = 3 + rng.below(5);
    Matrix base = testutil::random_normal_matrix(rows, base_cols, rng);
    // append noisy copies to force correlated pairs
    const std::size_t extra = rng.below(4);
    Matrix m(rows, base_cols + extra);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < base_cols; ++c) m(r, c) = base(r, c);
      for (std::size_t e = 0; e < extra; ++e) {
        m(r, base_cols + e) = base(r, e % base_cols) + 0.01 * rng.normal();
      }
    }
    DropResult res = drop_correlated_features(m, {}, 0.9);
    for (std::size_t i = 0; i < res.kept_indices.size(); ++i) {
      for (std::size_t j = i + 1; j < res.kept_indices.size(); ++j) {
        CHECK(pearson_abs(m, res.kept_indices[i], res.kept_indices[j]) <= 0.9);
      }
    }
    for (const auto& entry : res.report.dropped) {
      CHECK(entry.correlation > 0.9);
    }
  }
}

TEST_CASE("scaler: hand-computed population statistics") {
  Matrix m = from_columns({{2, 4, 6}});
  StandardScaler s = fit_scaler(m);
  CHECK(s.means[0] == doctest::Approx(4.0));
  CHECK(s.stds[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
}

TEST_CASE("scaler: constant column stores unit std and maps to zero") {
  Matrix m = from_columns({{5, 5}});
  StandardScaler s = fit_scaler(m);
  CHECK(s.means[0] == 5.0);
  CHECK(s.stds[0] == 1.0);
  Matrix out = apply_scaler(s, m);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 0.0);
}

TEST_CASE("scaler: transform of the fitting data standardizes it") {
  Rng rng(5);
  Matrix m = testutil::random_normal_matrix(200, 4, rng);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = 3.0 * m(r, c) + 7.0;
  }
  Matrix out = apply_scaler(fit_scaler(m), m);
  for (std::size_t c = 0; c < out.cols(); ++c) {
    double mean = 0, var = 0;
    for (std::size_t r = 0; r < out.rows(); ++r) mean += out(r, c);
    mean /= out.rows();
    for (std::size_t r = 0; r < out.rows(); ++r) {
      var += (out(r, c) - mean) * (out(r, c) - mean);
    }
    var /= out.rows();
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("pipeline: replay is exact and never refits") {
  Rng rng(7);
  Matrix benign = testutil::low_rank_matrix(80, 6, 2, 0.2, rng);
  PreprocessPipeline p = fit_pipeline(benign, {}, 0.9, true);
  const std::string fp_before = p.fingerprint();

  Matrix once = apply_pipeline(p, benign);
  Matrix twice = apply_pipeline(p, benign);
  CHECK(once == twice);  // bit-for-bit

  // attack-style rows pass through the same frozen statistics
  Matrix attack = testutil::random_normal_matrix(30, 6, rng);
  apply_pipeline(p, attack);
  CHECK(p.fingerprint() == fp_before);
  CHECK(p.fitted_on.rows == 80);

  Matrix wrong(4, 5);
  CHECK_THROWS_AS(apply_pipeline(p, wrong), Error);
}

TEST_CASE("pipeline: identity transform when nothing is dropped or scaled") {
  PreprocessPipeline p;
  p.prune_enabled = false;
  p.original_columns = {"a", "b"};
  p.drop.kept = p.original_columns;
  p.kept_indices = {0, 1};
  p.scaler.means = {0.0, 0.0};
  p.scaler.stds = {1.0, 1.0};
  Rng rng(9);
  Matrix x = testutil::random_normal_matrix(10, 2, rng);
  CHECK(apply_pipeline(p, x) == x);
}

TEST_CASE("pipeline: prune flag disables dropping entirely") {
  Matrix m = from_columns({{1, 2, 3, 4}, {1, 2, 3, 4}, {7, 7, 7, 7}});
  PreprocessPipeline p = fit_pipeline(m, {"a", "b", "k"}, 0.9, false);
  CHECK(p.kept_width() == 3);  // duplicates and constants both survive
  CHECK(p.drop.dropped.empty());
  CHECK(p.drop.dropped_constant.empty());
}

TEST_CASE("pipeline: json serialization round-trips byte for byte") {
  Rng rng(13);
  Matrix benign(60, 5);
  Matrix base = testutil::random_normal_matrix(60, 4, rng);
  for (std::size_t r = 0; r < 60; ++r) {
    for (std::size_t c = 0; c < 4; ++c) benign(r, c) = base(r, c);
    benign(r, 4) = base(r, 0) * 1.0000001;  // near-duplicate column
  }
  PreprocessPipeline p = fit_pipeline(benign, {"a", "b", "c", "d", "e"}, 0.9, true);
  REQUIRE(p.drop.dropped.size() == 1);

  const std::string doc = pipeline_to_json(p);
  PreprocessPipeline back = pipeline_from_json(doc);
  CHECK(pipeline_to_json(back) == doc);
  CHECK(back.fingerprint() == p.fingerprint());

  Matrix x = testutil::random_normal_matrix(12, 5, rng);
  CHECK(apply_pipeline(back, x) == apply_pipeline(p, x));
}

TEST_CASE("pipeline: malformed documents are rejected") {
  CHECK_THROWS_AS(pipeline_from_json("not json"), Error);
  CHECK_THROWS_AS(pipeline_from_json("{\"format\":\"other\"}"), Error);
}

TEST_CASE("drop/fit validation") {
  Matrix m(3, 2, {1, 2, 3, 4, 5, 6});
  CHECK_THROWS_AS(drop_correlated_features(m, {}, 0.0), Error);
  CHECK_THROWS_AS(drop_correlated_features(m, {}, 1.5), Error);
  CHECK_THROWS_AS(fit_scaler(Matrix(0, 2)), Error);
  CHECK_THROWS_AS(fit_pipeline(m, {"just_one"}, 0.9, true), Error);
}
