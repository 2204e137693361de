#pragma once

#include <string>
#include <vector>

#include "fingerprint.hpp"
#include "matrix.hpp"

namespace zeroday {

struct CorrelationMatrix {
  std::vector<std::string> names;
  Matrix values;  // |Pearson r|, symmetric, entries in [0,1]
};

// Pairs involving a zero-variance column are defined as 0; the diagonal
// is 1 for non-constant columns. Requires >= 2 rows.
CorrelationMatrix correlation_matrix(const Matrix& x,
                                     const std::vector<std::string>& names = {});

struct DropEntry {
  std::string column;
  std::string witness;  // earlier kept column that triggered the drop
  double correlation;   // strictly above the threshold
};

struct DropReport {
  double threshold = 0.9;
  std::vector<std::string> kept;
  std::vector<DropEntry> dropped;
  // constant columns carry no signal and are removed before the
  // correlation scan; reported separately since no pairwise value exists
  std::vector<std::string> dropped_constant;
};

struct DropResult {
  Matrix pruned;  // kept columns in original order
  DropReport report;
  std::vector<std::size_t> kept_indices;
};

// Scans columns in order; a column is dropped iff its |r| with any
// lower-indexed KEPT column strictly exceeds the threshold. Column 0 of
// the non-constant set always survives.
DropResult drop_correlated_features(const Matrix& x,
                                    const std::vector<std::string>& names,
                                    double threshold);

struct StandardScaler {
  std::vector<double> means;
  std::vector<double> stds;  // population std; zeros stored as 1
};

StandardScaler fit_scaler(const Matrix& x);
Matrix apply_scaler(const StandardScaler& s, const Matrix& x);

// Benign-only transform: optional constant/correlation pruning followed
// by standard scaling. Immutable once fitted; replayable on any matrix
// with the original column count.
struct PreprocessPipeline {
  int version = 1;
  bool prune_enabled = true;
  std::vector<std::string> original_columns;
  DropReport drop;
  std::vector<std::size_t> kept_indices;
  StandardScaler scaler;
  DataFingerprint fitted_on;

  std::size_t original_width() const { return original_columns.size(); }
  std::size_t kept_width() const { return kept_indices.size(); }
  // identity of the fitted transform, used to pair models with the
  // pipeline they were trained behind
  std::string fingerprint() const;
};

PreprocessPipeline fit_pipeline(const Matrix& benign,
                                const std::vector<std::string>& names,
                                double threshold, bool prune);

Matrix apply_pipeline(const PreprocessPipeline& p, const Matrix& x);

std::string pipeline_to_json(const PreprocessPipeline& p);
PreprocessPipeline pipeline_from_json(const std::string& text);
void save_pipeline(const PreprocessPipeline& p, const std::string& path);
PreprocessPipeline load_pipeline(const std::string& path);

}  // namespace zeroday
