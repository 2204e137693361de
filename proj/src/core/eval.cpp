#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "numfmt.hpp"

namespace zeroday {

void validate(const ThresholdSweep& sweep) {
  if (sweep.values.empty()) {
    throw Error(ErrorCode::argument, "sweep must be non-empty");
  }
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    if (!(sweep.values[i] > 0.0)) {
      throw Error(ErrorCode::argument, "sweep values must be positive");
    }
    if (i > 0 && !(sweep.values[i] > sweep.values[i - 1])) {
      throw Error(ErrorCode::argument, "sweep values must be strictly increasing");
    }
  }
}

std::string to_string(DetectorKind k) {
  return k == DetectorKind::autoencoder ? "autoencoder" : "ocsvm";
}

DetectorKind detector_from_string(const std::string& s) {
  if (s == "autoencoder") return DetectorKind::autoencoder;
  if (s == "ocsvm") return DetectorKind::ocsvm;
  throw Error(ErrorCode::argument, "unknown detector: " + s);
}

double EvalReport::rate_at(const std::string& cls, double sweep_value) const {
  std::size_t col = sweep.size();
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i] == sweep_value) {
      col = i;
      break;
    }
  }
  if (col == sweep.size()) {
    throw Error(ErrorCode::argument,
                "sweep value " + format_double(sweep_value) + " not in report");
  }
  if (cls == benign_label) return benign_specificity[col];
  for (const auto& c : classes) {
    if (c.name == cls) return c.recall[col];
  }
  throw Error(ErrorCode::argument, "class not in report: " + cls);
}

std::vector<std::string> EvalReport::class_names() const {
  std::vector<std::string> names;
  names.reserve(classes.size());
  for (const auto& c : classes) names.push_back(c.name);
  return names;
}

namespace {

void check_pairing(const std::string& model_fp_of_pipeline,
                   const PreprocessPipeline& pipeline) {
  if (!model_fp_of_pipeline.empty() &&
      model_fp_of_pipeline != pipeline.fingerprint()) {
    throw Error(ErrorCode::state,
                "model was trained behind a different pipeline (fingerprint " +
                    model_fp_of_pipeline + " vs " + pipeline.fingerprint() + ")");
  }
}

// benign rows to score: the validation split for train-style files, or
// every benign row for test-style files
std::vector<std::size_t> benign_rows_to_score(const LabeledDataset& data,
                                              const EvalOptions& opts) {
  if (opts.benign_all_rows) {
    if (!data.has_class(data.benign_label)) {
      throw Error(ErrorCode::data,
                  "dataset holds no benign class '" + data.benign_label + "'");
    }
    return data.rows_of(data.benign_label);
  }
  BenignSplit split = split_benign(data, opts.split);
  if (split.validation_rows.empty()) {
    throw Error(ErrorCode::data, "no benign validation rows");
  }
  return split.validation_rows;
}

void fill_common_metadata(EvalReport& report, const PreprocessPipeline& pipeline,
                          const EvalOptions& opts) {
  report.metadata["pipeline_fingerprint"] = pipeline.fingerprint();
  report.metadata["split_seed"] = std::to_string(opts.split.seed);
  report.metadata["split_fraction"] = format_double(opts.split.train_fraction);
  report.metadata["benign_rows"] = opts.benign_all_rows ? "all" : "validation";
  // instance-weighted over the scored rows of this file
  report.metadata["overall_accuracy_definition"] =
      "(benign passed + attacks flagged) / instances scored";
}

}  // namespace

EvalReport evaluate_autoencoder(const AutoencoderModel& model,
                                const PreprocessPipeline& pipeline,
                                const LabeledDataset& data,
                                const ThresholdSweep& sweep,
                                const EvalOptions& opts) {
  validate(sweep);
  check_pairing(model.pipeline_fingerprint, pipeline);

  EvalReport report;
  report.detector = DetectorKind::autoencoder;
  report.dataset_id = data.dataset_id;
  report.sweep = sweep.values;
  report.benign_label = data.benign_label;

  const auto benign_rows = benign_rows_to_score(data, opts);
  report.benign_count = benign_rows.size();
  {
    Matrix transformed = apply_pipeline(
        pipeline, select_rows(data.features, benign_rows));
    std::vector<double> scores =
        score(model, transformed, opts.threads, opts.score_metric);
    for (double t : sweep.values) {
      const double exceed = detect(scores, t);
      report.benign_specificity.push_back(1.0 - exceed);
      report.benign_passed.push_back(
          benign_rows.size() -
          static_cast<std::size_t>(std::llround(exceed * scores.size())));
    }
  }

  for (const auto& cls : data.attack_classes()) {
    const auto& rows = data.rows_of(cls);
    Matrix transformed =
        apply_pipeline(pipeline, select_rows(data.features, rows));
    std::vector<double> scores =
        score(model, transformed, opts.threads, opts.score_metric);
    ClassResult result;
    result.name = cls;
    result.count = rows.size();
    for (double t : sweep.values) {
      const double recall = detect(scores, t);
      result.recall.push_back(recall);
      result.flagged.push_back(
          static_cast<std::size_t>(std::llround(recall * scores.size())));
    }
    report.classes.push_back(std::move(result));
  }

  std::size_t attack_total = 0;
  for (const auto& c : report.classes) attack_total += c.count;
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    std::size_t correct = report.benign_passed[i];
    for (const auto& c : report.classes) correct += c.flagged[i];
    report.overall_accuracy.push_back(
        static_cast<double>(correct) /
        static_cast<double>(report.benign_count + attack_total));
  }

  fill_common_metadata(report, pipeline, opts);
  report.metadata["model_fingerprint"] = model.fingerprint();
  report.metadata["score_metric"] =
      to_string(opts.score_metric.value_or(model.loss_kind));
  report.metadata["loss_kind"] = to_string(model.loss_kind);
  return report;
}

EvalReport evaluate_ocsvm_models(const std::vector<OneClassSvmModel>& models,
                                 const PreprocessPipeline& pipeline,
                                 const LabeledDataset& data,
                                 const EvalOptions& opts) {
  if (models.empty()) {
    throw Error(ErrorCode::argument, "no models to evaluate");
  }
  for (const auto& m : models) check_pairing(m.pipeline_fingerprint, pipeline);

  EvalReport report;
  report.detector = DetectorKind::ocsvm;
  report.dataset_id = data.dataset_id;
  report.benign_label = data.benign_label;
  for (const auto& m : models) report.sweep.push_back(m.nu);

  const auto benign_rows = benign_rows_to_score(data, opts);
  report.benign_count = benign_rows.size();
  {
    Matrix transformed =
        apply_pipeline(pipeline, select_rows(data.features, benign_rows));
    for (const auto& m : models) {
      const double outlier_rate = detect_rate(m, transformed, opts.threads);
      report.benign_specificity.push_back(1.0 - outlier_rate);
      report.benign_passed.push_back(
          benign_rows.size() - static_cast<std::size_t>(std::llround(
                                   outlier_rate * transformed.rows())));
    }
  }

  for (const auto& cls : data.attack_classes()) {
    const auto& rows = data.rows_of(cls);
    Matrix transformed =
        apply_pipeline(pipeline, select_rows(data.features, rows));
    ClassResult result;
    result.name = cls;
    result.count = rows.size();
    for (const auto& m : models) {
      const double recall = detect_rate(m, transformed, opts.threads);
      result.recall.push_back(recall);
      result.flagged.push_back(
          static_cast<std::size_t>(std::llround(recall * transformed.rows())));
    }
    report.classes.push_back(std::move(result));
  }

  std::size_t attack_total = 0;
  for (const auto& c : report.classes) attack_total += c.count;
  for (std::size_t i = 0; i < report.sweep.size(); ++i) {
    std::size_t correct = report.benign_passed[i];
    for (const auto& c : report.classes) correct += c.flagged[i];
    report.overall_accuracy.push_back(
        static_cast<double>(correct) /
        static_cast<double>(report.benign_count + attack_total));
  }

  fill_common_metadata(report, pipeline, opts);
  std::string fps;
  for (const auto& m : models) {
    if (!fps.empty()) fps += ",";
    fps += m.fingerprint();
  }
  report.metadata["model_fingerprint"] = fps;
  return report;
}

EvalReport evaluate_ocsvm(const Matrix& benign_train, const LabeledDataset& data,
                          const PreprocessPipeline& pipeline,
                          const std::vector<double>& nus, const KernelSpec& kernel,
                          const SmoConfig& cfg, const EvalOptions& opts) {
  if (nus.empty()) {
    throw Error(ErrorCode::argument, "nu list must be non-empty");
  }
  std::vector<OneClassSvmModel> models;
  for (double nu : nus) {
    try {
      models.push_back(fit(benign_train, nu, kernel, cfg, opts.threads));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "nu=" + format_double(nu) + ": " + std::string(e.what()));
    }
  }
  return evaluate_ocsvm_models(models, pipeline, data, opts);
}

ComparisonReport compare(const EvalReport& a, const EvalReport& b,
                         double a_value, double b_value) {
  if (a.dataset_id != b.dataset_id) {
    throw Error(ErrorCode::argument,
                "reports cover different datasets: " + a.dataset_id + " vs " +
                    b.dataset_id);
  }
  const auto a_classes = a.class_names();
  const auto b_classes = b.class_names();
  if (a_classes != b_classes) {
    std::vector<std::string> only_a, only_b;
    std::set_difference(a_classes.begin(), a_classes.end(), b_classes.begin(),
                        b_classes.end(), std::back_inserter(only_a));
    std::set_difference(b_classes.begin(), b_classes.end(), a_classes.begin(),
                        a_classes.end(), std::back_inserter(only_b));
    std::string msg = "class sets differ;";
    if (!only_a.empty()) {
      msg += " only in first:";
      for (const auto& c : only_a) msg += " " + c;
    }
    if (!only_b.empty()) {
      msg += " only in second:";
      for (const auto& c : only_b) msg += " " + c;
    }
    throw Error(ErrorCode::argument, msg);
  }

  ComparisonReport cmp;
  cmp.dataset_id = a.dataset_id;
  cmp.first_detector = to_string(a.detector);
  cmp.second_detector = to_string(b.detector);
  cmp.first_value = a_value;
  cmp.second_value = b_value;
  for (const auto& cls : a_classes) {
    ComparisonRow row;
    row.cls = cls;
    row.first_rate = round_percent(a.rate_at(cls, a_value));
    row.second_rate = round_percent(b.rate_at(cls, b_value));
    if (row.first_rate > row.second_rate) {
      row.winner = cmp.first_detector;
    } else if (row.second_rate > row.first_rate) {
      row.winner = cmp.second_detector;
    } else {
      row.winner = "tie";
    }
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json" || s == "json-text") return ReportFormat::json;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw Error(ErrorCode::argument, "unknown report format: " + s);
}

namespace {

std::string percent_cell(double rate) { return format_percent(rate); }

std::string render_eval_csv(const EvalReport& r) {
  std::string out;
  std::vector<std::string> header{"class"};
  for (double v : r.sweep) header.push_back(format_double(v));
  append_csv_row(out, header);
  std::vector<std::string> row{r.benign_label};
  for (double s : r.benign_specificity) row.push_back(percent_cell(s));
  append_csv_row(out, row);
  for (const auto& c : r.classes) {
    row.assign({c.name});
    for (double v : c.recall) row.push_back(percent_cell(v));
    append_csv_row(out, row);
  }
  return out;
}

std::string render_eval_markdown(const EvalReport& r) {
  std::string out = "| class |";
  for (double v : r.sweep) out += " " + format_double(v) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < r.sweep.size(); ++i) out += "---|";
  out += "\n| " + r.benign_label + " |";
  for (double s : r.benign_specificity) out += " " + percent_cell(s) + " |";
  out += "\n";
  for (const auto& c : r.classes) {
    out += "| " + c.name + " |";
    for (double v : c.recall) out += " " + percent_cell(v) + " |";
    out += "\n";
  }
  return out;
}

nlohmann::json rates_json(const std::vector<double>& rates) {
  nlohmann::json arr = nlohmann::json::array();
  for (double r : rates) arr.push_back(round_percent(r));
  return arr;
}

std::string render_eval_json(const EvalReport& r) {
  nlohmann::json doc;
  doc["format"] = "zeroday-eval-report";
  doc["version"] = 1;
  doc["detector"] = to_string(r.detector);
  doc["dataset_id"] = r.dataset_id;
  doc["sweep"] = r.sweep;
  doc["benign"] = {{"label", r.benign_label},
                   {"count", r.benign_count},
                   {"passed", r.benign_passed},
                   {"specificity", rates_json(r.benign_specificity)}};
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : r.classes) {
    classes.push_back({{"name", c.name},
                       {"count", c.count},
                       {"flagged", c.flagged},
                       {"recall", rates_json(c.recall)}});
  }
  doc["classes"] = classes;
  doc["overall_accuracy"] = rates_json(r.overall_accuracy);
  doc["metadata"] = r.metadata;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv:
      return render_eval_csv(report);
    case ReportFormat::markdown:
      return render_eval_markdown(report);
    case ReportFormat::json:
      return render_eval_json(report);
  }
  throw Error(ErrorCode::argument, "bad format");
}

std::string render_comparison(const ComparisonReport& r, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out;
    append_csv_row(out, {"class", r.first_detector, r.second_detector, "winner"});
    for (const auto& row : r.rows) {
      char first[32], second[32];
      std::snprintf(first, sizeof first, "%.2f", row.first_rate);
      std::snprintf(second, sizeof second, "%.2f", row.second_rate);
      append_csv_row(out, {row.cls, first, second, row.winner});
    }
    return out;
  }
  if (format == ReportFormat::markdown) {
    std::string out = "| class | " + r.first_detector + " (" +
                      format_double(r.first_value) + ") | " + r.second_detector +
                      " (" + format_double(r.second_value) + ") | winner |\n";
    out += "|---|---|---|---|\n";
    for (const auto& row : r.rows) {
      char first[32], second[32];
      std::snprintf(first, sizeof first, "%.2f", row.first_rate);
      std::snprintf(second, sizeof second, "%.2f", row.second_rate);
      out += "| " + row.cls + " | " + first + " | " + second + " | " +
             row.winner + " |\n";
    }
    return out;
  }
  nlohmann::json doc;
  doc["format"] = "zeroday-comparison";
  doc["version"] = 1;
  doc["dataset_id"] = r.dataset_id;
  doc["first"] = {{"detector", r.first_detector}, {"value", r.first_value}};
  doc["second"] = {{"detector", r.second_detector}, {"value", r.second_value}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"class", row.cls},
                    {"first_rate", row.first_rate},
                    {"second_rate", row.second_rate},
                    {"winner", row.winner}});
  }
  doc["rows"] = rows;
  doc["metadata"] = r.metadata;
  return doc.dump(2) + "\n";
}

EvalReport eval_report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data, std::string("bad report document: ") + e.what());
  }
  try {
    if (doc.at("format") != "zeroday-eval-report") {
      throw Error(ErrorCode::data, "not an eval report document");
    }
    EvalReport r;
    r.detector = detector_from_string(doc.at("detector").get<std::string>());
    r.dataset_id = doc.at("dataset_id").get<std::string>();
    r.sweep = doc.at("sweep").get<std::vector<double>>();
    const auto& benign = doc.at("benign");
    r.benign_label = benign.at("label").get<std::string>();
    r.benign_count = benign.at("count").get<std::size_t>();
    r.benign_passed = benign.at("passed").get<std::vector<std::size_t>>();
    for (double pct : benign.at("specificity").get<std::vector<double>>()) {
      r.benign_specificity.push_back(pct / 100.0);
    }
    for (const auto& c : doc.at("classes")) {
      ClassResult cls;
      cls.name = c.at("name").get<std::string>();
      cls.count = c.at("count").get<std::size_t>();
      cls.flagged = c.at("flagged").get<std::vector<std::size_t>>();
      for (double pct : c.at("recall").get<std::vector<double>>()) {
        cls.recall.push_back(pct / 100.0);
      }
      r.classes.push_back(std::move(cls));
    }
    for (double pct : doc.at("overall_accuracy").get<std::vector<double>>()) {
      r.overall_accuracy.push_back(pct / 100.0);
    }
    for (const auto& [key, value] : doc.at("metadata").items()) {
      r.metadata[key] = value.get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data, std::string("bad report document: ") + e.what());
  }
}

EvalReport load_eval_report(const std::string& path) {
  return eval_report_from_json(read_text_file(path));
}

void save_report(const EvalReport& report, ReportFormat format,
                 const std::string& path) {
  write_text_file(path, render_report(report, format));
}

void save_comparison(const ComparisonReport& report, ReportFormat format,
                     const std::string& path) {
  write_text_file(path, render_comparison(report, format));
}

}  // namespace zeroday
