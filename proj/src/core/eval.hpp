#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoencoder.hpp"
#include "dataset.hpp"
#include "ocsvm.hpp"
#include "preprocess.hpp"

namespace zeroday {

// strictly increasing positive reconstruction-error cutoffs
struct ThresholdSweep {
  std::vector<double> values;
};

void validate(const ThresholdSweep& sweep);

enum class DetectorKind { autoencoder, ocsvm };

std::string to_string(DetectorKind k);
DetectorKind detector_from_string(const std::string& s);

struct ClassResult {
  std::string name;
  std::size_t count = 0;
  std::vector<double> recall;         // per sweep value
  std::vector<std::size_t> flagged;   // raw counts backing the rates
};

// Per-class detection rates across a threshold or nu sweep. Benign rows
// contribute specificity (the fraction NOT flagged); every attack class
// is treated as an unseen attack and contributes recall.
struct EvalReport {
  DetectorKind detector = DetectorKind::autoencoder;
  std::string dataset_id;
  std::vector<double> sweep;
  std::string benign_label = "benign";
  std::size_t benign_count = 0;
  std::vector<double> benign_specificity;  // per sweep value
  std::vector<std::size_t> benign_passed;  // raw counts backing the rates
  std::vector<ClassResult> classes;        // sorted by name
  // (benign passed + attacks flagged) / instances scored, per sweep value
  std::vector<double> overall_accuracy;
  std::map<std::string, std::string> metadata;

  double rate_at(const std::string& cls, double sweep_value) const;
  std::vector<std::string> class_names() const;
};

struct EvalOptions {
  SplitSpec split;               // selects the benign validation rows
  bool benign_all_rows = false;  // score every benign row (test-file style)
  std::optional<LossKind> score_metric;  // force a score metric
  std::size_t threads = 1;
};

// Scores the benign validation rows and every attack class in full
// through the fitted pipeline. Nothing is refitted; reports are pure
// functions of (model, pipeline, data, sweep).
EvalReport evaluate_autoencoder(const AutoencoderModel& model,
                                const PreprocessPipeline& pipeline,
                                const LabeledDataset& data,
                                const ThresholdSweep& sweep,
                                const EvalOptions& opts = {});

// Same protocol against already-fitted models, one sweep column per
// model's nu value.
EvalReport evaluate_ocsvm_models(const std::vector<OneClassSvmModel>& models,
                                 const PreprocessPipeline& pipeline,
                                 const LabeledDataset& data,
                                 const EvalOptions& opts = {});

// Trains one model per nu on the supplied benign matrix, then evaluates.
// Fit failures are annotated with the offending nu.
EvalReport evaluate_ocsvm(const Matrix& benign_train, const LabeledDataset& data,
                          const PreprocessPipeline& pipeline,
                          const std::vector<double>& nus, const KernelSpec& kernel,
                          const SmoConfig& cfg, const EvalOptions& opts = {});

struct ComparisonRow {
  std::string cls;
  double first_rate = 0.0;   // percent, two decimals
  double second_rate = 0.0;  // percent, two decimals
  std::string winner;        // detector name or "tie"
};

struct ComparisonReport {
  std::string dataset_id;
  std::string first_detector;
  std::string second_detector;
  double first_value = 0.0;   // chosen threshold
  double second_value = 0.0;  // chosen nu
  std::vector<ComparisonRow> rows;  // sorted by class name
  std::map<std::string, std::string> metadata;
};

// Aligns two reports class by class at the chosen sweep values. The
// class sets must match; a mismatch error names the symmetric
// difference.
ComparisonReport compare(const EvalReport& a, const EvalReport& b,
                         double a_value, double b_value);

enum class ReportFormat { csv, json, markdown };

ReportFormat report_format_from_string(const std::string& s);

// Rates are carried at full precision and rounded to two-decimal
// percentages only here.
std::string render_report(const EvalReport& report, ReportFormat format);
std::string render_comparison(const ComparisonReport& report, ReportFormat format);

EvalReport eval_report_from_json(const std::string& text);
EvalReport load_eval_report(const std::string& path);

void save_report(const EvalReport& report, ReportFormat format,
                 const std::string& path);
void save_comparison(const ComparisonReport& report, ReportFormat format,
                     const std::string& path);

}  // namespace zeroday
