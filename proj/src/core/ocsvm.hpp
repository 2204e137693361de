#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fingerprint.hpp"
#include "matrix.hpp"

namespace zeroday {

// RBF kernel spec; gamma <= 0 selects the scale rule
// 1 / (n_features * Var(X)) with Var over all entries of the fit matrix.
struct KernelSpec {
  double gamma = 0.0;
  bool is_scale() const { return !(gamma > 0.0); }
};

double resolve_gamma(const KernelSpec& spec, const Matrix& x);

// exp(-gamma * ||x - y||^2), in (0, 1]
double rbf_kernel(std::span<const double> x, std::span<const double> y,
                  double gamma);

struct SmoConfig {
  double tolerance = 1e-4;      // stop when the worst KKT violation is below
  std::size_t max_passes = 1000;  // one pass = n pairwise updates
  std::uint64_t seed = 0;         // orders the initial coefficient placement
  std::size_t cache_mb = 256;     // kernel row cache budget
};

struct OneClassSvmModel {
  Matrix support_vectors;
  std::vector<double> alphas;  // dual coefficients, one per support vector
  double rho = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
  std::size_t n_train = 0;  // rows the dual was solved over
  std::string pipeline_fingerprint;
  DataFingerprint trained_on;

  std::size_t width() const { return support_vectors.cols(); }
  std::string fingerprint() const;
};

// Solves the one-class dual
//   min 1/2 sum_ij a_i a_j K_ij   s.t.  0 <= a_i <= 1/(nu*n), sum a_i = 1
// by maximal-violating-pair coordinate updates. rho averages the
// gradient over free support vectors. Throws on non-convergence with the
// residual KKT gap in the message.
OneClassSvmModel fit(const Matrix& x, double nu, const KernelSpec& kernel,
                     const SmoConfig& cfg = {}, std::size_t threads = 1);

// sum_i a_i k(sv_i, x) - rho; positive on the inlier side
double decision_function(const OneClassSvmModel& model, std::span<const double> x);

enum class Prediction { outlier = 0, inlier = 1 };

// inlier iff decision > 0; a tie counts as outlier
Prediction predict(const OneClassSvmModel& model, std::span<const double> x);

// fraction of rows predicted outlier
double detect_rate(const OneClassSvmModel& model, const Matrix& x,
                   std::size_t threads = 1);

// 1/2 a' K a over the given rows
double dual_objective(const Matrix& x, const std::vector<double>& alphas,
                      double gamma);

struct DualSolution {
  std::vector<double> alphas;
  double objective = 0.0;
};

// Accelerated projected-gradient solve of the same dual, to KKT gap 1e-8.
// Dense kernel matrix; intended for small reference problems.
DualSolution solve_dual_reference(const Matrix& x, double nu, double gamma);

std::string ocsvm_to_text(const OneClassSvmModel& model);
OneClassSvmModel ocsvm_from_text(const std::string& text);
void save_ocsvm(const OneClassSvmModel& model, const std::string& path);
OneClassSvmModel load_ocsvm(const std::string& path);

}  // namespace zeroday
