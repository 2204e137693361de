#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/ocsvm.hpp"
#include "helpers.hpp"

using namespace zeroday;

namespace {

Matrix gaussian_cluster(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return testutil::random_normal_matrix(n, d, rng);
}

double upper_bound(const OneClassSvmModel& m) {
  return 1.0 / (m.nu * static_cast<double>(m.n_train));
}

}  // namespace

TEST_CASE("rbf kernel: direct evaluations") {
  std::vector<double> x{0.0, 0.0}, y{1.0, 1.0};
  CHECK(rbf_kernel(x, x, 0.7) == 1.0);
  CHECK(rbf_kernel(x, y, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(rbf_kernel(x, y, 0.5) == rbf_kernel(y, x, 0.5));
  CHECK_THROWS_AS(rbf_kernel(x, std::vector<double>{1.0}, 0.5), Error);
  CHECK_THROWS_AS(rbf_kernel(x, y, 0.0), Error);
}

TEST_CASE("gamma: scale rule and explicit override") {
  Matrix x(2, 2, {0.0, 2.0, 4.0, 6.0});  // flattened variance = 5
  CHECK(resolve_gamma(KernelSpec{}, x) == doctest::Approx(1.0 / (2.0 * 5.0)));
  CHECK(resolve_gamma(KernelSpec{0.25}, x) == 0.25);
}

TEST_CASE("fit: accepts the swept nu values and stays dual-feasible") {
  Matrix x = gaussian_cluster(400, 4, 31);
  for (double nu : {0.2, 0.15, 0.1}) {
    OneClassSvmModel m = fit(x, nu, KernelSpec{});
    const double c = upper_bound(m);
    double sum = 0.0;
    for (double a : m.alphas) {
      CHECK(a > 0.0);
      CHECK(a <= c + 1e-10);
      sum += a;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(m.support_vectors.rows() >= 1);
  }
  CHECK_THROWS_AS(fit(x, 0.0, KernelSpec{}), Error);
  CHECK_THROWS_AS(fit(x, 1.5, KernelSpec{}), Error);
  CHECK_THROWS_AS(fit(Matrix(1, 4), 0.5, KernelSpec{}), Error);
}

TEST_CASE("fit: training-outlier fraction lands near nu") {
  Matrix x = gaussian_cluster(600, 5, 32);
  OneClassSvmModel m = fit(x, 0.1, KernelSpec{});
  std::size_t outliers = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (predict(m, x.row(r)) == Prediction::outlier) ++outliers;
  }
  const double frac = static_cast<double>(outliers) / x.rows();
  CHECK(frac >= 0.05);
  CHECK(frac <= 0.15);
  CHECK(static_cast<double>(m.support_vectors.rows()) / x.rows() >=
        0.1 - 0.05);
}

TEST_CASE("fit: margin support vectors sit on the boundary") {
  Matrix x = gaussian_cluster(300, 3, 33);
  SmoConfig cfg;
  cfg.tolerance = 1e-6;
  OneClassSvmModel m = fit(x, 0.2, KernelSpec{}, cfg);
  const double c = upper_bound(m);
  std::size_t margin = 0;
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    if (m.alphas[i] < c) {
      ++margin;
      CHECK(std::fabs(decision_function(m, m.support_vectors.row(i))) <
            10.0 * cfg.tolerance);
    }
  }
  CHECK(margin >= 1);
}

TEST_CASE("decision: far points fall on the negative side, smooth locally") {
  Matrix x = gaussian_cluster(300, 3, 34);
  OneClassSvmModel m = fit(x, 0.1, KernelSpec{});

  std::vector<double> far{100.0, 100.0, 100.0};
  CHECK(decision_function(m, far) == doctest::Approx(-m.rho).epsilon(1e-9));
  CHECK(m.rho > 0.0);
  CHECK(predict(m, far) == Prediction::outlier);

  std::vector<double> probe{0.1, -0.2, 0.3};
  const double base = decision_function(m, probe);
  probe[1] += 1e-9;
  CHECK(std::fabs(decision_function(m, probe) - base) < 1e-6);

  CHECK_THROWS_AS(decision_function(m, std::vector<double>{1.0}), Error);
}

TEST_CASE("predict: centroid in, 100-sigma point out, sign-consistent") {
  Matrix x = gaussian_cluster(500, 4, 35);
  OneClassSvmModel m = fit(x, 0.1, KernelSpec{});

  std::vector<double> centroid(4, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < 4; ++c) centroid[c] += x(r, c) / x.rows();
  }
  CHECK(predict(m, centroid) == Prediction::inlier);

  std::vector<double> outlier(4, 100.0);
  CHECK(predict(m, outlier) == Prediction::outlier);

  Rng rng(36);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(4);
    for (auto& v : p) v = 3.0 * rng.normal();
    const bool in = predict(m, p) == Prediction::inlier;
    CHECK(in == (decision_function(m, p) > 0.0));
  }
}

TEST_CASE("detect_rate: counts outliers, order independent") {
  Matrix x = gaussian_cluster(200, 3, 37);
  OneClassSvmModel m = fit(x, 0.15, KernelSpec{});

  // rows that all equal a deep inlier score zero
  std::vector<double> centroid(3, 0.0);
  Matrix inliers(5, 3);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 3; ++c) inliers(r, c) = centroid[c];
  }
  CHECK(detect_rate(m, inliers) == 0.0);

  Matrix probes = gaussian_cluster(101, 3, 38);
  const double rate = detect_rate(m, probes);
  Matrix reversed(probes.rows(), probes.cols());
  for (std::size_t r = 0; r < probes.rows(); ++r) {
    for (std::size_t c = 0; c < probes.cols(); ++c) {
      reversed(r, c) = probes(probes.rows() - 1 - r, c);
    }
  }
  CHECK(detect_rate(m, reversed) == rate);
  CHECK(detect_rate(m, probes, 4) == rate);
  CHECK_THROWS_AS(detect_rate(m, Matrix(0, 3)), Error);
}

TEST_CASE("reference solver: symmetry and constraint arithmetic") {
  Matrix two(2, 2, {0.0, 0.0, 1.0, 1.0});
  DualSolution sol = solve_dual_reference(two, 0.5, 0.5);
  CHECK(sol.alphas[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.alphas[1] == doctest::Approx(0.5).epsilon(1e-6));

  Matrix one(1, 2, {0.3, 0.4});
  DualSolution single = solve_dual_reference(one, 1.0, 0.5);
  CHECK(single.alphas[0] == doctest::Approx(1.0));
  CHECK(single.objective == doctest::Approx(0.5));
}

TEST_CASE("reference solver: agrees with fit on small problems") {
  for (std::uint64_t seed : {40, 41, 42}) {
    Matrix x = gaussian_cluster(30, 3, seed);
    const double gamma = resolve_gamma(KernelSpec{}, x);
    SmoConfig cfg;
    cfg.tolerance = 1e-6;
    OneClassSvmModel m = fit(x, 0.2, KernelSpec{gamma}, cfg);
    const double fit_obj = dual_objective(m.support_vectors, m.alphas, gamma);
    DualSolution ref = solve_dual_reference(x, 0.2, gamma);
    CHECK(fit_obj == doctest::Approx(ref.objective).epsilon(1e-4));
  }
}

TEST_CASE("fit: deterministic given data, nu, gamma, seed") {
  Matrix x = gaussian_cluster(250, 4, 43);
  SmoConfig cfg;
  cfg.seed = 9;
  OneClassSvmModel a = fit(x, 0.15, KernelSpec{}, cfg);
  OneClassSvmModel b = fit(x, 0.15, KernelSpec{}, cfg);
  CHECK(ocsvm_to_text(a) == ocsvm_to_text(b));
  CHECK(a.fingerprint() == b.fingerprint());
}

TEST_CASE("fit: non-convergence surfaces the residual gap") {
  Matrix x = gaussian_cluster(400, 6, 44);
  SmoConfig cfg;
  cfg.tolerance = 1e-13;
  cfg.max_passes = 1;
  try {
    fit(x, 0.1, KernelSpec{}, cfg);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numeric);
    CHECK(std::string(e.what()).find("kkt gap") != std::string::npos);
  }
}

TEST_CASE("serialization: text round trip is exact") {
  Matrix x = gaussian_cluster(120, 3, 45);
  OneClassSvmModel m = fit(x, 0.2, KernelSpec{});
  m.pipeline_fingerprint = "feedfacecafebeef";
  const std::string text = ocsvm_to_text(m);
  OneClassSvmModel back = ocsvm_from_text(text);
  CHECK(ocsvm_to_text(back) == text);
  CHECK(back.fingerprint() == m.fingerprint());

  Rng rng(46);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> p(3);
    for (auto& v : p) v = 2.0 * rng.normal();
    CHECK(decision_function(back, p) == decision_function(m, p));
  }
  CHECK_THROWS_AS(ocsvm_from_text("nope"), Error);
}
