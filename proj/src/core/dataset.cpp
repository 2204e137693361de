#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "csv.hpp"
#include "numfmt.hpp"
#include "rng.hpp"

namespace zeroday {

bool FeatureTable::fully_numeric() const {
  return std::all_of(kinds.begin(), kinds.end(),
                     [](ColumnKind k) { return k == ColumnKind::numeric; });
}

Matrix FeatureTable::to_matrix() const {
  if (!fully_numeric()) {
    throw Error(ErrorCode::argument,
                "table holds categorical columns; encode them first");
  }
  Matrix m(n_rows, n_cols());
  for (std::size_t c = 0; c < n_cols(); ++c) {
    for (std::size_t r = 0; r < n_rows; ++r) m(r, c) = numeric[c][r];
  }
  return m;
}

LoadResult load_feature_csv(const std::string& path, const LoadOptions& opts) {
  CsvTable csv = read_csv(path);

  {
    std::unordered_set<std::string> seen;
    for (const auto& name : csv.header) {
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::data, path + ": duplicate column '" + name + "'");
      }
    }
  }

  std::size_t label_col = csv.header.size();
  if (opts.label_column) {
    auto it = std::find(csv.header.begin(), csv.header.end(), *opts.label_column);
    if (it == csv.header.end()) {
      throw Error(ErrorCode::data,
                  path + ": label column '" + *opts.label_column + "' not found");
    }
    label_col = static_cast<std::size_t>(it - csv.header.begin());
  }

  LoadResult out;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (c == label_col) continue;
    if (std::find(opts.ignore_columns.begin(), opts.ignore_columns.end(),
                  csv.header[c]) != opts.ignore_columns.end()) {
      out.ignored_columns.push_back(csv.header[c]);
      continue;
    }
    feature_cols.push_back(c);
  }
  if (feature_cols.empty()) {
    throw Error(ErrorCode::data, path + ": no feature columns");
  }
  if (csv.rows.empty()) {
    throw Error(ErrorCode::data, path + ": no data rows");
  }

  const std::size_t n_cols = feature_cols.size();
  const std::size_t n_raw = csv.rows.size();

  // first pass: parse every cell, decide column kinds
  std::vector<std::vector<double>> parsed(n_cols,
                                          std::vector<double>(n_raw, 0.0));
  std::vector<ColumnKind> kinds(n_cols, ColumnKind::numeric);
  for (std::size_t j = 0; j < n_cols; ++j) {
    const std::string& name = csv.header[feature_cols[j]];
    if (std::find(opts.force_categorical.begin(), opts.force_categorical.end(),
                  name) != opts.force_categorical.end()) {
      kinds[j] = ColumnKind::categorical;
      continue;
    }
    for (std::size_t r = 0; r < n_raw; ++r) {
      auto v = parse_double(csv.rows[r][feature_cols[j]]);
      if (!v) {
        kinds[j] = ColumnKind::categorical;
        break;
      }
      parsed[j][r] = *v;
    }
  }

  // second pass: drop rows carrying non-finite numeric cells
  std::vector<bool> keep(n_raw, true);
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (kinds[j] != ColumnKind::numeric) continue;
    for (std::size_t r = 0; r < n_raw; ++r) {
      if (!std::isfinite(parsed[j][r])) keep[r] = false;
    }
  }

  FeatureTable& table = out.table;
  table.numeric.resize(n_cols);
  table.text.resize(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    table.column_names.push_back(csv.header[feature_cols[j]]);
    table.kinds.push_back(kinds[j]);
  }
  for (std::size_t r = 0; r < n_raw; ++r) {
    if (!keep[r]) {
      ++out.rejected_rows;
      continue;
    }
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (kinds[j] == ColumnKind::numeric) {
        table.numeric[j].push_back(parsed[j][r]);
      } else {
        table.text[j].push_back(csv.rows[r][feature_cols[j]]);
      }
    }
    if (label_col < csv.header.size()) {
      out.labels.push_back(csv.rows[r][label_col]);
    }
    ++table.n_rows;
  }
  if (table.n_rows == 0) {
    throw Error(ErrorCode::data,
                path + ": every row was rejected (non-finite numeric cells)");
  }
  return out;
}

const CategoryVocabulary::Column* CategoryVocabulary::find(
    const std::string& name) const {
  for (const auto& col : columns) {
    if (col.name == name) return &col;
  }
  return nullptr;
}

CategoryVocabulary learn_categories(const FeatureTable& table) {
  CategoryVocabulary vocab;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (table.kinds[c] != ColumnKind::categorical) continue;
    std::set<std::string> tokens(table.text[c].begin(), table.text[c].end());
    vocab.columns.push_back(
        {table.column_names[c], {tokens.begin(), tokens.end()}});
  }
  return vocab;
}

EncodeResult encode_categoricals(const FeatureTable& table,
                                 const CategoryVocabulary& vocab) {
  EncodeResult out;
  FeatureTable& enc = out.table;
  enc.n_rows = table.n_rows;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (table.kinds[c] == ColumnKind::numeric) {
      enc.column_names.push_back(table.column_names[c]);
      enc.kinds.push_back(ColumnKind::numeric);
      enc.numeric.push_back(table.numeric[c]);
      enc.text.emplace_back();
      continue;
    }
    const auto* col = vocab.find(table.column_names[c]);
    if (col == nullptr) {
      throw Error(ErrorCode::data, "categorical column '" +
                                       table.column_names[c] +
                                       "' missing from the vocabulary");
    }
    const std::size_t base = enc.column_names.size();
    for (const auto& token : col->tokens) {
      enc.column_names.push_back(table.column_names[c] + "=" + token);
      enc.kinds.push_back(ColumnKind::numeric);
      enc.numeric.emplace_back(table.n_rows, 0.0);
      enc.text.emplace_back();
    }
    std::size_t unseen = 0;
    for (std::size_t r = 0; r < table.n_rows; ++r) {
      const std::string& token = table.text[c][r];
      auto it = std::lower_bound(col->tokens.begin(), col->tokens.end(), token);
      if (it != col->tokens.end() && *it == token) {
        const std::size_t k = static_cast<std::size_t>(it - col->tokens.begin());
        enc.numeric[base + k][r] = 1.0;
      } else {
        ++unseen;
      }
    }
    if (unseen > 0) {
      std::ostringstream msg;
      msg << "column '" << table.column_names[c] << "': " << unseen
          << " rows hold tokens outside the vocabulary; encoded as all-zero";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

EncodeResult encode_categoricals(const FeatureTable& table) {
  return encode_categoricals(table, learn_categories(table));
}

const std::vector<std::size_t>& LabeledDataset::rows_of(
    const std::string& cls) const {
  auto it = class_index.find(cls);
  if (it == class_index.end()) {
    throw Error(ErrorCode::argument, "no such class: " + cls);
  }
  return it->second;
}

std::vector<std::string> LabeledDataset::attack_classes() const {
  std::vector<std::string> out;
  for (const auto& [cls, rows] : class_index) {
    if (cls != benign_label) out.push_back(cls);
  }
  return out;  // class_index is ordered, so this is sorted
}

LabeledDataset make_dataset(const FeatureTable& numeric_table,
                            std::vector<std::string> labels,
                            std::string benign_label, std::string dataset_id) {
  if (labels.size() != numeric_table.n_rows) {
    throw Error(ErrorCode::argument, "label count does not match row count");
  }
  LabeledDataset ds;
  ds.features = numeric_table.to_matrix();
  ds.column_names = numeric_table.column_names;
  ds.labels = std::move(labels);
  ds.benign_label = std::move(benign_label);
  ds.dataset_id = std::move(dataset_id);
  for (std::size_t r = 0; r < ds.labels.size(); ++r) {
    ds.class_index[ds.labels[r]].push_back(r);
  }
  return ds;
}

BenignSplit split_benign(const LabeledDataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::argument, "train_fraction must be in (0,1)");
  }
  if (!ds.has_class(ds.benign_label)) {
    throw Error(ErrorCode::data,
                "dataset holds no benign class '" + ds.benign_label + "'");
  }
  std::vector<std::size_t> idx = ds.rows_of(ds.benign_label);
  if (idx.size() < 2) {
    throw Error(ErrorCode::data, "need at least 2 benign rows to split");
  }
  if (spec.shuffle) {
    Rng rng(spec.seed);
    rng.shuffle(idx);
  }
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(idx.size())));
  BenignSplit split;
  split.train_rows.assign(idx.begin(), idx.begin() + n_train);
  split.validation_rows.assign(idx.begin() + n_train, idx.end());
  split.train = select_rows(ds.features, split.train_rows);
  split.validation = select_rows(ds.features, split.validation_rows);
  return split;
}

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.n_benign < 1 || spec.n_attack_classes < 1 || spec.n_features < 1 ||
      spec.benign_covariance_rank < 1) {
    throw Error(ErrorCode::argument, "synthetic spec counts must be >= 1");
  }
  if (spec.benign_covariance_rank > spec.n_features) {
    throw Error(ErrorCode::argument, "covariance rank exceeds feature count");
  }
  if (spec.attack_offsets.size() != spec.n_attack_classes) {
    throw Error(ErrorCode::argument,
                "attack_offsets length must equal n_attack_classes");
  }
  if (!(spec.noise_sigma > 0.0)) {
    throw Error(ErrorCode::argument, "noise_sigma must be positive");
  }
}

}  // namespace

SyntheticModel synthetic_model(const SyntheticSpec& spec) {
  validate(spec);
  SyntheticModel model;
  model.noise_sigma = spec.noise_sigma;
  const std::size_t d = spec.n_features;
  const std::size_t r = spec.benign_covariance_rank;
  Rng basis_rng(derive_seed(spec.seed, "synth.basis"));
  model.basis = Matrix(d, r);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < r; ++j) model.basis(i, j) = basis_rng.normal();
  }
  for (std::size_t k = 0; k < spec.n_attack_classes; ++k) {
    Rng dir_rng(derive_seed(spec.seed, "synth.direction", k));
    std::vector<double> dir(d);
    double norm2 = 0.0;
    for (auto& v : dir) {
      v = dir_rng.normal();
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    const double scale = norm > 0.0 ? spec.attack_offsets[k] / norm : 0.0;
    for (auto& v : dir) v *= scale;
    model.attack_means.push_back(std::move(dir));
  }
  return model;
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
  const SyntheticModel model = synthetic_model(spec);
  const std::size_t d = spec.n_features;
  const std::size_t r = spec.benign_covariance_rank;
  const std::size_t per_attack =
      spec.n_per_attack > 0 ? spec.n_per_attack
                            : std::max<std::size_t>(1, spec.n_benign / 4);

  auto sample_row = [&](Rng& rng, const double* shift, double* out_row) {
    std::vector<double> z(r);
    for (auto& v : z) v = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
      double x = 0.0;
      for (std::size_t j = 0; j < r; ++j) x += model.basis(i, j) * z[j];
      x += spec.noise_sigma * rng.normal();
      if (shift != nullptr) x += shift[i];
      out_row[i] = x;
    }
  };

  const std::size_t total = spec.n_benign + per_attack * spec.n_attack_classes;
  Matrix features(total, d);
  std::vector<std::string> labels;
  labels.reserve(total);

  Rng benign_rng(derive_seed(spec.seed, "synth.benign"));
  std::size_t row = 0;
  for (std::size_t i = 0; i < spec.n_benign; ++i, ++row) {
    sample_row(benign_rng, nullptr, features.row(row).data());
    labels.emplace_back("benign");
  }
  for (std::size_t k = 0; k < spec.n_attack_classes; ++k) {
    Rng attack_rng(derive_seed(spec.seed, "synth.attack", k));
    for (std::size_t i = 0; i < per_attack; ++i, ++row) {
      sample_row(attack_rng, model.attack_means[k].data(),
                 features.row(row).data());
      labels.emplace_back("attack_" + std::to_string(k + 1));
    }
  }

  FeatureTable table;
  table.n_rows = total;
  for (std::size_t c = 0; c < d; ++c) {
    table.column_names.push_back("f" + std::to_string(c));
    table.kinds.push_back(ColumnKind::numeric);
    std::vector<double> col(total);
    for (std::size_t i = 0; i < total; ++i) col[i] = features(i, c);
    table.numeric.push_back(std::move(col));
    table.text.emplace_back();
  }
  return make_dataset(table, std::move(labels), "benign", "synthetic");
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path,
                      const std::string& label_column) {
  std::string out;
  std::vector<std::string> header = ds.column_names;
  header.push_back(label_column);
  append_csv_row(out, header);
  std::vector<std::string> cells(header.size());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t c = 0; c < ds.features.cols(); ++c) {
      cells[c] = format_double(ds.features(r, c));
    }
    cells.back() = ds.labels[r];
    append_csv_row(out, cells);
  }
  write_text_file(path, out);
}

void save_matrix_csv(const Matrix& m, const std::vector<std::string>& names,
                     const std::string& path) {
  if (names.size() != m.cols()) {
    throw Error(ErrorCode::argument, "column name count mismatch");
  }
  std::string out;
  append_csv_row(out, names);
  std::vector<std::string> cells(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      cells[c] = format_double(m(r, c));
    }
    append_csv_row(out, cells);
  }
  write_text_file(path, out);
}

Matrix load_matrix_csv(const std::string& path,
                       std::vector<std::string>* names) {
  CsvTable csv = read_csv(path);
  const std::size_t cols = csv.header.size();
  Matrix m(csv.rows.size(), cols);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      auto v = parse_double(csv.rows[r][c]);
      if (!v) {
        throw Error(ErrorCode::data,
                    path + ": non-numeric cell in column " + csv.header[c]);
      }
      m(r, c) = *v;
    }
  }
  if (names != nullptr) *names = csv.header;
  return m;
}

}  // namespace zeroday
