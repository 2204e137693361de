#include "preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace zeroday {

namespace {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "c" + std::to_string(i);
  return names;
}

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> var;  // population variance
};

ColumnStats column_stats(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  ColumnStats s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (std::size_t c = 0; c < d; ++c) s.mean[c] /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dlt = row[c] - s.mean[c];
      s.var[c] += dlt * dlt;
    }
  }
  for (std::size_t c = 0; c < d; ++c) s.var[c] /= static_cast<double>(n);
  return s;
}

}  // namespace

CorrelationMatrix correlation_matrix(const Matrix& x,
                                     const std::vector<std::string>& names) {
  if (x.rows() < 2) {
    throw Error(ErrorCode::argument,
                "correlation needs at least 2 rows");
  }
  const std::size_t n = x.rows(), d = x.cols();
  const ColumnStats s = column_stats(x);

  CorrelationMatrix out;
  out.names = names.empty() ? default_names(d) : names;
  if (out.names.size() != d) {
    throw Error(ErrorCode::argument, "name count does not match column count");
  }
  out.values = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    out.values(i, i) = s.var[i] > 0.0 ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double r = 0.0;
      if (s.var[i] > 0.0 && s.var[j] > 0.0) {
        double cov = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          cov += (x(k, i) - s.mean[i]) * (x(k, j) - s.mean[j]);
        }
        cov /= static_cast<double>(n);
        r = std::fabs(cov / std::sqrt(s.var[i] * s.var[j]));
        r = std::min(r, 1.0);
      }
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  }
  return out;
}

DropResult drop_correlated_features(const Matrix& x,
                                    const std::vector<std::string>& names,
                                    double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::argument, "threshold must be in (0,1]");
  }
  const std::size_t d = x.cols();
  std::vector<std::string> col_names = names.empty() ? default_names(d) : names;
  if (col_names.size() != d) {
    throw Error(ErrorCode::argument, "name count does not match column count");
  }

  DropResult result;
  result.report.threshold = threshold;

  const ColumnStats s = column_stats(x);
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < d; ++c) {
    if (s.var[c] > 0.0) {
      live.push_back(c);
    } else {
      result.report.dropped_constant.push_back(col_names[c]);
    }
  }

  std::vector<std::size_t> kept;
  if (!live.empty()) {
    Matrix live_m = Matrix(x.rows(), live.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t j = 0; j < live.size(); ++j) {
        live_m(r, j) = x(r, live[j]);
      }
    }
    const CorrelationMatrix corr = correlation_matrix(live_m);
    std::vector<std::size_t> kept_live;
    for (std::size_t j = 0; j < live.size(); ++j) {
      bool drop = false;
      for (std::size_t k : kept_live) {
        if (corr.values(k, j) > threshold) {
          result.report.dropped.push_back({col_names[live[j]],
                                           col_names[live[k]],
                                           corr.values(k, j)});
          drop = true;
          break;
        }
      }
      if (!drop) kept_live.push_back(j);
    }
    for (std::size_t j : kept_live) kept.push_back(live[j]);
  }
  std::sort(kept.begin(), kept.end());

  result.kept_indices = kept;
  for (std::size_t c : kept) result.report.kept.push_back(col_names[c]);
  result.pruned = Matrix(x.rows(), kept.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < kept.size(); ++j) {
      result.pruned(r, j) = x(r, kept[j]);
    }
  }
  return result;
}

StandardScaler fit_scaler(const Matrix& x) {
  if (x.rows() < 1) {
    throw Error(ErrorCode::argument, "scaler needs at least 1 row");
  }
  const ColumnStats s = column_stats(x);
  StandardScaler out;
  out.means = s.mean;
  out.stds.resize(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double sd = std::sqrt(s.var[c]);
    out.stds[c] = sd > 0.0 ? sd : 1.0;
  }
  return out;
}

Matrix apply_scaler(const StandardScaler& s, const Matrix& x) {
  if (x.cols() != s.means.size()) {
    throw Error(ErrorCode::argument, "scaler width mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = (x(r, c) - s.means[c]) / s.stds[c];
    }
  }
  return out;
}

std::string PreprocessPipeline::fingerprint() const {
  Fingerprinter fp;
  fp.add(pipeline_to_json(*this));
  return fp.hex();
}

PreprocessPipeline fit_pipeline(const Matrix& benign,
                                const std::vector<std::string>& names,
                                double threshold, bool prune) {
  PreprocessPipeline p;
  p.prune_enabled = prune;
  p.original_columns = names.empty() ? default_names(benign.cols()) : names;
  if (p.original_columns.size() != benign.cols()) {
    throw Error(ErrorCode::argument, "name count does not match column count");
  }
  Matrix pruned;
  if (prune) {
    DropResult dr = drop_correlated_features(benign, p.original_columns, threshold);
    p.drop = std::move(dr.report);
    p.kept_indices = std::move(dr.kept_indices);
    pruned = std::move(dr.pruned);
  } else {
    p.drop.threshold = threshold;
    p.drop.kept = p.original_columns;
    p.kept_indices.resize(benign.cols());
    for (std::size_t c = 0; c < benign.cols(); ++c) p.kept_indices[c] = c;
    pruned = benign;
  }
  p.scaler = fit_scaler(pruned);
  p.fitted_on = fingerprint_of(benign);
  return p;
}

Matrix apply_pipeline(const PreprocessPipeline& p, const Matrix& x) {
  if (x.cols() != p.original_width()) {
    throw Error(ErrorCode::argument,
                "pipeline expects " + std::to_string(p.original_width()) +
                    " columns, got " + std::to_string(x.cols()));
  }
  Matrix kept(x.rows(), p.kept_width());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < p.kept_indices.size(); ++j) {
      kept(r, j) = x(r, p.kept_indices[j]);
    }
  }
  return apply_scaler(p.scaler, kept);
}

std::string pipeline_to_json(const PreprocessPipeline& p) {
  nlohmann::json doc;
  doc["format"] = "zeroday-pipeline";
  doc["version"] = p.version;
  doc["prune"] = p.prune_enabled;
  doc["threshold"] = p.drop.threshold;
  doc["columns"] = p.original_columns;
  doc["kept"] = p.drop.kept;
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& e : p.drop.dropped) {
    dropped.push_back({{"column", e.column},
                       {"witness", e.witness},
                       {"correlation", e.correlation}});
  }
  doc["dropped"] = dropped;
  doc["dropped_constant"] = p.drop.dropped_constant;
  doc["means"] = p.scaler.means;
  doc["stds"] = p.scaler.stds;
  doc["fitted_on"] = {{"hash", p.fitted_on.hash}, {"rows", p.fitted_on.rows}};
  // population standard deviation; recorded so replays stay comparable
  doc["std_kind"] = "population";
  return doc.dump(2) + "\n";
}

PreprocessPipeline pipeline_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data, std::string("bad pipeline document: ") + e.what());
  }
  try {
    if (doc.at("format") != "zeroday-pipeline") {
      throw Error(ErrorCode::data, "not a pipeline document");
    }
    PreprocessPipeline p;
    p.version = doc.at("version").get<int>();
    p.prune_enabled = doc.at("prune").get<bool>();
    p.drop.threshold = doc.at("threshold").get<double>();
    p.original_columns = doc.at("columns").get<std::vector<std::string>>();
    p.drop.kept = doc.at("kept").get<std::vector<std::string>>();
    for (const auto& e : doc.at("dropped")) {
      p.drop.dropped.push_back({e.at("column").get<std::string>(),
                                e.at("witness").get<std::string>(),
                                e.at("correlation").get<double>()});
    }
    p.drop.dropped_constant =
        doc.at("dropped_constant").get<std::vector<std::string>>();
    p.scaler.means = doc.at("means").get<std::vector<double>>();
    p.scaler.stds = doc.at("stds").get<std::vector<double>>();
    p.fitted_on.hash = doc.at("fitted_on").at("hash").get<std::string>();
    p.fitted_on.rows = doc.at("fitted_on").at("rows").get<std::size_t>();
    for (const auto& name : p.drop.kept) {
      auto it = std::find(p.original_columns.begin(), p.original_columns.end(),
                          name);
      if (it == p.original_columns.end()) {
        throw Error(ErrorCode::data, "kept column missing from columns: " + name);
      }
      p.kept_indices.push_back(
          static_cast<std::size_t>(it - p.original_columns.begin()));
    }
    if (p.scaler.means.size() != p.kept_indices.size() ||
        p.scaler.stds.size() != p.kept_indices.size()) {
      throw Error(ErrorCode::data, "scaler width does not match kept columns");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data, std::string("bad pipeline document: ") + e.what());
  }
}

void save_pipeline(const PreprocessPipeline& p, const std::string& path) {
  write_text_file(path, pipeline_to_json(p));
}

PreprocessPipeline load_pipeline(const std::string& path) {
  return pipeline_from_json(read_text_file(path));
}

}  // namespace zeroday
