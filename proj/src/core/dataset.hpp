#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace zeroday {

enum class ColumnKind { numeric, categorical };

// Column-oriented table straight off a feature CSV. A column is
// categorical iff any cell fails numeric parsing (or it was forced).
struct FeatureTable {
  std::vector<std::string> column_names;
  std::vector<ColumnKind> kinds;
  std::size_t n_rows = 0;
  // per-column cells: numeric columns fill `numeric`, categorical `text`
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<std::string>> text;

  std::size_t n_cols() const { return column_names.size(); }
  bool fully_numeric() const;
  // requires fully_numeric()
  Matrix to_matrix() const;
};

struct LoadOptions {
  std::optional<std::string> label_column;
  // columns to treat as categorical even if every cell parses as a number
  std::vector<std::string> force_categorical;
  // columns to drop on load (e.g. auxiliary difficulty scores)
  std::vector<std::string> ignore_columns;
};

struct LoadResult {
  FeatureTable table;
  std::vector<std::string> labels;  // empty unless label_column was given
  std::size_t rejected_rows = 0;    // rows holding non-finite numeric cells
  std::vector<std::string> ignored_columns;  // subset actually present
};

LoadResult load_feature_csv(const std::string& path, const LoadOptions& opts = {});

// Distinct tokens per categorical column, lexicographically ordered so
// that two files encoded against the same vocabulary line up column for
// column.
struct CategoryVocabulary {
  struct Column {
    std::string name;
    std::vector<std::string> tokens;
  };
  std::vector<Column> columns;

  const Column* find(const std::string& name) const;
};

CategoryVocabulary learn_categories(const FeatureTable& table);

struct EncodeResult {
  FeatureTable table;  // fully numeric
  // one entry per column that held tokens outside the vocabulary; such
  // rows encode as all-zero indicators
  std::vector<std::string> warnings;
};

EncodeResult encode_categoricals(const FeatureTable& table,
                                 const CategoryVocabulary& vocab);
// vocabulary learned from the table itself
EncodeResult encode_categoricals(const FeatureTable& table);

struct LabeledDataset {
  Matrix features;
  std::vector<std::string> column_names;
  std::vector<std::string> labels;
  std::map<std::string, std::vector<std::size_t>> class_index;
  std::string benign_label;
  std::string dataset_id;

  std::size_t n_rows() const { return features.rows(); }
  bool has_class(const std::string& cls) const {
    return class_index.count(cls) != 0;
  }
  const std::vector<std::size_t>& rows_of(const std::string& cls) const;
  std::vector<std::string> attack_classes() const;  // sorted, benign excluded
};

LabeledDataset make_dataset(const FeatureTable& numeric_table,
                            std::vector<std::string> labels,
                            std::string benign_label, std::string dataset_id);

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct BenignSplit {
  Matrix train;
  Matrix validation;
  std::vector<std::size_t> train_rows;       // dataset row ids
  std::vector<std::size_t> validation_rows;  // dataset row ids
};

// Shuffles the benign rows by seed and cuts at floor(fraction * n).
// Attack rows never enter either part.
BenignSplit split_benign(const LabeledDataset& ds, const SplitSpec& spec);

struct SyntheticSpec {
  std::size_t n_benign = 1000;
  std::size_t n_attack_classes = 1;
  std::size_t n_per_attack = 0;  // 0 -> max(1, n_benign / 4)
  std::size_t n_features = 10;
  std::size_t benign_covariance_rank = 3;
  // Euclidean distance of each attack-class mean from the benign mean
  std::vector<double> attack_offsets;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

// Ground-truth generator parameters, exposed so tests can build
// distribution-level oracles against the exact sampling model.
struct SyntheticModel {
  Matrix basis;  // n_features x rank, latent mixing
  std::vector<std::vector<double>> attack_means;
  double noise_sigma = 1.0;
};

SyntheticModel synthetic_model(const SyntheticSpec& spec);

// Benign rows: basis * z + sigma * eps with z, eps standard normal.
// Attack class k adds attack_means[k]. Deterministic in spec.seed.
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

// canonical CSV output; numeric cells rendered round-trip exact
void save_dataset_csv(const LabeledDataset& ds, const std::string& path,
                      const std::string& label_column = "label");
void save_matrix_csv(const Matrix& m, const std::vector<std::string>& names,
                     const std::string& path);
Matrix load_matrix_csv(const std::string& path,
                       std::vector<std::string>* names = nullptr);

}  // namespace zeroday
