// zeroday - command line front end for the detection library.
//
// Wires dataset -> preprocess -> model -> evaluation through the C API
// and persists every artifact under the output directory, so a run is
// reproducible from its config document and seed alone.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zeroday.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliFail {
  int exit_code;
  std::string message;
};

int exit_code_for(zd_status rc) {
  switch (rc) {
    case ZD_OK:
      return 0;
    case ZD_ERR_ARGUMENT:
    case ZD_ERR_CONFIG:
      return 2;
    case ZD_ERR_DATA:
    case ZD_ERR_IO:
    case ZD_ERR_STATE:
      return 3;
    default:
      return 4;
  }
}

void check(zd_status rc) {
  if (rc != ZD_OK) {
    throw CliFail{exit_code_for(rc), zd_last_error()};
  }
}

[[noreturn]] void config_fail(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw CliFail{2, msg};
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  std::string s = ss.str();
  // trim to the shortest form that still parses back identically
  for (int prec = 1; prec < 17; ++prec) {
    std::ostringstream t;
    t << std::setprecision(prec) << v;
    if (std::stod(t.str()) == v) return t.str();
  }
  return s;
}

struct RunContext {
  json config;
  fs::path out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = library default

  fs::path artifact(const std::string& name) const { return out_dir / name; }
};

json section(const RunContext& ctx, const std::string& name) {
  return ctx.config.value(name, json::object());
}

// RAII wrappers around the C handles
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      reset();
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  void reset() {
    if (ptr) Free(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  operator T*() const { return ptr; }
  T* get() const { return ptr; }
};

using DatasetHandle = Handle<zd_dataset, zd_dataset_free>;
using MatrixHandle = Handle<zd_matrix, zd_matrix_free>;
using PipelineHandle = Handle<zd_pipeline, zd_pipeline_free>;
using AeHandle = Handle<zd_autoencoder, zd_ae_free>;
using SvmHandle = Handle<zd_ocsvm, zd_ocsvm_free>;
using ReportHandle = Handle<zd_report, zd_report_free>;
using ComparisonHandle = Handle<zd_comparison, zd_comparison_free>;

std::string owned_string(char* s) {
  std::string out = s ? s : "";
  zd_string_free(s);
  return out;
}

// ------------------------------------------------------------------
// config validation (all findings reported together)

void require_file(std::vector<std::string>& errors, const json& sec,
                  const std::string& key, bool required) {
  if (!sec.contains(key) || sec.at(key).is_null()) {
    if (required) errors.push_back("dataset." + key + " is required");
    return;
  }
  if (!sec.at(key).is_string()) {
    errors.push_back("dataset." + key + " must be a string path");
    return;
  }
  const std::string path = sec.at(key).get<std::string>();
  if (!fs::exists(path)) {
    errors.push_back("dataset." + key + ": file not found: " + path);
  }
}

void validate_detector_sections(std::vector<std::string>& errors,
                                const RunContext& ctx,
                                const std::string& need) {
  const bool has_ae = ctx.config.contains("autoencoder");
  const bool has_svm = ctx.config.contains("ocsvm");
  if (has_ae && has_svm) {
    errors.push_back("config must hold exactly one detector section "
                     "(both autoencoder and ocsvm present)");
  }
  if (need == "autoencoder" && !has_ae) {
    errors.push_back("autoencoder section is required for this command");
  }
  if (need == "ocsvm" && !has_svm) {
    errors.push_back("ocsvm section is required for this command");
  }
  if (need == "any" && !has_ae && !has_svm) {
    errors.push_back("a detector section (autoencoder or ocsvm) is required");
  }
}

void validate_sweep(std::vector<std::string>& errors, const RunContext& ctx) {
  const json sweep = section(ctx, "sweep");
  if (ctx.config.contains("autoencoder")) {
    if (!sweep.contains("thresholds")) {
      errors.push_back("sweep.thresholds is required for autoencoder runs");
      return;
    }
    for (const auto& v : sweep.at("thresholds")) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        errors.push_back("sweep.thresholds must be positive numbers");
        return;
      }
    }
  }
  if (ctx.config.contains("ocsvm")) {
    const json svm = ctx.config.at("ocsvm");
    if (!svm.contains("nu")) {
      errors.push_back("ocsvm.nu (list) is required");
      return;
    }
    for (const auto& v : svm.at("nu")) {
      if (!v.is_number() || !(v.get<double>() > 0.0) || v.get<double>() > 1.0) {
        errors.push_back("ocsvm.nu values must lie in (0,1]");
        return;
      }
    }
  }
}

// ------------------------------------------------------------------
// shared steps

std::string dataset_options_json(const RunContext& ctx) {
  json ds = section(ctx, "dataset");
  if (!ds.contains("label_column")) ds["label_column"] = "label";
  if (!ds.contains("benign_label")) ds["benign_label"] = "benign";
  return ds.dump();
}

void load_datasets(const RunContext& ctx, DatasetHandle& train,
                   DatasetHandle& test) {
  check(zd_dataset_load(dataset_options_json(ctx).c_str(), train.out(),
                        test.out()));
}

PipelineHandle load_pipeline_or_fail(const RunContext& ctx) {
  const fs::path path = ctx.artifact("pipeline.json");
  if (!fs::exists(path)) {
    throw CliFail{3, "pipeline file missing: " + path.string() +
                         " (run `zeroday preprocess` first)"};
  }
  PipelineHandle p;
  check(zd_pipeline_load(path.string().c_str(), p.out()));
  return p;
}

json eval_options(const RunContext& ctx, bool benign_all) {
  const json split = section(ctx, "split");
  json opts;
  opts["split_fraction"] = split.value("train_fraction", 0.75);
  opts["split_seed"] = ctx.seed;
  opts["split_shuffle"] = split.value("shuffle", true);
  opts["benign_rows"] = benign_all ? "all" : "validation";
  opts["threads"] = ctx.threads;
  if (ctx.config.contains("autoencoder")) {
    opts["score_metric"] =
        ctx.config.at("autoencoder").value("score_metric", "auto");
  }
  return opts;
}

void emit_all_formats(const ReportHandle& report, const RunContext& ctx,
                      const std::string& stem) {
  check(zd_report_save(report, "json", ctx.artifact(stem + ".json").string().c_str()));
  check(zd_report_save(report, "csv", ctx.artifact(stem + ".csv").string().c_str()));
  check(zd_report_save(report, "markdown", ctx.artifact(stem + ".md").string().c_str()));
  std::printf("wrote %s.{json,csv,md}\n", ctx.artifact(stem).string().c_str());
}

// ------------------------------------------------------------------
// subcommands

int cmd_synth(const RunContext& ctx) {
  std::vector<std::string> errors;
  if (!ctx.config.contains("synthetic")) {
    errors.push_back("synthetic section is required");
  }
  if (!errors.empty()) config_fail(errors);

  json spec = ctx.config.at("synthetic");
  if (!spec.contains("seed")) spec["seed"] = ctx.seed;
  DatasetHandle ds;
  check(zd_dataset_synth(spec.dump().c_str(), ds.out()));
  const fs::path path = ctx.artifact("synth.csv");
  check(zd_dataset_save_csv(ds, path.string().c_str()));
  std::printf("wrote %s (%zu rows, %zu features, %zu classes)\n",
              path.string().c_str(), zd_dataset_rows(ds), zd_dataset_cols(ds),
              zd_dataset_class_count(ds));
  return 0;
}

int cmd_preprocess(const RunContext& ctx) {
  std::vector<std::string> errors;
  require_file(errors, section(ctx, "dataset"), "train_file", true);
  require_file(errors, section(ctx, "dataset"), "test_file", false);
  const json prep = section(ctx, "preprocess");
  const double threshold = prep.value("threshold", 0.9);
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    errors.push_back("preprocess.threshold must be in (0,1]");
  }
  const json split = section(ctx, "split");
  const double fraction = split.value("train_fraction", 0.75);
  if (!(fraction > 0.0 && fraction < 1.0)) {
    errors.push_back("split.train_fraction must be in (0,1)");
  }
  if (!errors.empty()) config_fail(errors);

  DatasetHandle train, test;
  load_datasets(ctx, train, test);

  PipelineHandle pipeline;
  check(zd_pipeline_fit(train, threshold, prep.value("prune", true) ? 1 : 0,
                        pipeline.out()));
  check(zd_pipeline_save(pipeline, ctx.artifact("pipeline.json").string().c_str()));

  const std::size_t kept = zd_pipeline_kept_count(pipeline);
  const std::size_t dropped = zd_pipeline_dropped_count(pipeline);
  std::printf("pipeline: %zu of %zu columns kept, %zu dropped (threshold %s)\n",
              kept, zd_pipeline_original_width(pipeline), dropped,
              fmt_double(threshold).c_str());

  MatrixHandle benign_train, benign_val;
  check(zd_dataset_split_benign(train, fraction,
                                split.value("shuffle", true) ? 1 : 0, ctx.seed,
                                benign_train.out(), benign_val.out()));
  MatrixHandle train_t, val_t;
  check(zd_pipeline_apply(pipeline, benign_train, train_t.out()));
  check(zd_pipeline_apply(pipeline, benign_val, val_t.out()));

  std::vector<const char*> names;
  for (std::size_t i = 0; i < kept; ++i) {
    names.push_back(zd_pipeline_kept_name(pipeline, i));
  }
  check(zd_matrix_save_csv(train_t, names.data(),
                           ctx.artifact("benign_train.csv").string().c_str()));
  check(zd_matrix_save_csv(val_t, names.data(),
                           ctx.artifact("benign_val.csv").string().c_str()));
  std::printf("wrote pipeline.json, benign_train.csv (%zu rows), "
              "benign_val.csv (%zu rows)\n",
              zd_matrix_rows(train_t), zd_matrix_rows(val_t));
  return 0;
}

void write_history_csv(const fs::path& path, const std::vector<double>& curve) {
  std::ofstream out(path);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << (i + 1) << "," << fmt_double(curve[i]) << "\n";
  }
}

int cmd_train_ae(const RunContext& ctx) {
  std::vector<std::string> errors;
  validate_detector_sections(errors, ctx, "autoencoder");
  if (ctx.config.contains("autoencoder")) {
    const json ae = ctx.config.at("autoencoder");
    if (!ae.contains("layers")) errors.push_back("autoencoder.layers is required");
    if (!ae.contains("learning_rate")) {
      errors.push_back("autoencoder.learning_rate is required");
    }
  }
  if (!errors.empty()) config_fail(errors);

  PipelineHandle pipeline = load_pipeline_or_fail(ctx);
  MatrixHandle train_m, val_m;
  check(zd_matrix_load_csv(ctx.artifact("benign_train.csv").string().c_str(),
                           train_m.out()));
  check(zd_matrix_load_csv(ctx.artifact("benign_val.csv").string().c_str(),
                           val_m.out()));

  const json ae_cfg = ctx.config.at("autoencoder");
  if (ae_cfg.at("layers").at(0).get<std::size_t>() != zd_matrix_cols(train_m)) {
    throw CliFail{2, "autoencoder.layers[0] must equal the preprocessed width (" +
                         std::to_string(zd_matrix_cols(train_m)) + ")"};
  }

  AeHandle ae;
  check(zd_ae_build(ae_cfg.dump().c_str(), ctx.seed, ae.out()));
  check(zd_ae_set_pipeline_fingerprint(ae.ptr, zd_pipeline_fingerprint(pipeline)));

  json train_cfg;
  train_cfg["epochs"] = ae_cfg.value("epochs", 50);
  train_cfg["batch_size"] = ae_cfg.value("batch_size", 1024);
  train_cfg["learning_rate"] = ae_cfg.at("learning_rate");
  train_cfg["l2"] = ae_cfg.value("l2", 0.0);
  train_cfg["seed"] = ctx.seed;
  train_cfg["threads"] = ctx.threads;
  const std::size_t epochs = train_cfg["epochs"].get<std::size_t>();
  std::vector<double> train_curve(epochs, 0.0), val_curve(epochs, 0.0);
  check(zd_ae_train(ae.ptr, train_m, val_m, train_cfg.dump().c_str(),
                    train_curve.data(), val_curve.data()));

  check(zd_ae_save(ae, ctx.artifact("autoencoder.model").string().c_str()));
  write_history_csv(ctx.artifact("history_train.csv"), train_curve);
  write_history_csv(ctx.artifact("history_val.csv"), val_curve);
  if (!val_curve.empty()) {
    std::printf("trained %zu epochs; final val loss %s\n", epochs,
                fmt_double(val_curve.back()).c_str());
  }
  std::printf("wrote autoencoder.model, history_train.csv, history_val.csv\n");
  return 0;
}

int cmd_train_svm(const RunContext& ctx) {
  std::vector<std::string> errors;
  validate_detector_sections(errors, ctx, "ocsvm");
  validate_sweep(errors, ctx);
  if (!errors.empty()) config_fail(errors);

  PipelineHandle pipeline = load_pipeline_or_fail(ctx);
  MatrixHandle train_m;
  check(zd_matrix_load_csv(ctx.artifact("benign_train.csv").string().c_str(),
                           train_m.out()));

  const json svm_cfg = ctx.config.at("ocsvm");
  for (const auto& nu_v : svm_cfg.at("nu")) {
    const double nu = nu_v.get<double>();
    json fit_cfg = svm_cfg;
    fit_cfg["nu"] = nu;
    fit_cfg["seed"] = ctx.seed;
    fit_cfg["threads"] = ctx.threads;
    fit_cfg.erase("nu_list");
    SvmHandle model;
    check(zd_ocsvm_fit(train_m, fit_cfg.dump().c_str(), model.out()));
    check(zd_ocsvm_set_pipeline_fingerprint(model.ptr,
                                            zd_pipeline_fingerprint(pipeline)));
    const std::string name = "ocsvm_nu_" + fmt_double(nu) + ".model";
    check(zd_ocsvm_save(model, ctx.artifact(name).string().c_str()));
    std::printf("nu=%s: %zu support vectors, gamma %s -> %s\n",
                fmt_double(nu).c_str(), zd_ocsvm_support_vector_count(model),
                fmt_double(zd_ocsvm_gamma(model)).c_str(), name.c_str());
  }
  return 0;
}

void stamp_metadata(ReportHandle& report, const RunContext& ctx) {
  check(zd_report_set_meta(report.ptr, "seed", std::to_string(ctx.seed).c_str()));
  check(zd_report_set_meta(report.ptr, "timestamp", utc_timestamp().c_str()));
  const json ds = section(ctx, "dataset");
  if (ds.contains("ignore_columns") && !ds.at("ignore_columns").empty()) {
    std::string ignored;
    for (const auto& c : ds.at("ignore_columns")) {
      if (!ignored.empty()) ignored += ",";
      ignored += c.get<std::string>();
    }
    check(zd_report_set_meta(report.ptr, "ignored_columns", ignored.c_str()));
  }
}

int cmd_evaluate(const RunContext& ctx) {
  std::vector<std::string> errors;
  validate_detector_sections(errors, ctx, "any");
  validate_sweep(errors, ctx);
  require_file(errors, section(ctx, "dataset"), "train_file", true);
  require_file(errors, section(ctx, "dataset"), "test_file", false);
  if (!errors.empty()) config_fail(errors);

  PipelineHandle pipeline = load_pipeline_or_fail(ctx);
  DatasetHandle train, test;
  load_datasets(ctx, train, test);

  const bool use_ae = ctx.config.contains("autoencoder");
  AeHandle ae;
  std::vector<SvmHandle> svm_storage;
  std::vector<const zd_ocsvm*> svms;
  std::string detector;
  if (use_ae) {
    detector = "autoencoder";
    const fs::path model_path = ctx.artifact("autoencoder.model");
    if (!fs::exists(model_path)) {
      throw CliFail{3, "model file missing: " + model_path.string() +
                           " (run `zeroday train-ae` first)"};
    }
    check(zd_ae_load(model_path.string().c_str(), ae.out()));
  } else {
    detector = "ocsvm";
    for (const auto& nu_v : ctx.config.at("ocsvm").at("nu")) {
      const std::string name =
          "ocsvm_nu_" + fmt_double(nu_v.get<double>()) + ".model";
      const fs::path model_path = ctx.artifact(name);
      if (!fs::exists(model_path)) {
        throw CliFail{3, "model file missing: " + model_path.string() +
                             " (run `zeroday train-svm` first)"};
      }
      SvmHandle h;
      check(zd_ocsvm_load(model_path.string().c_str(), h.out()));
      svm_storage.push_back(std::move(h));
    }
    for (const auto& h : svm_storage) svms.push_back(h.get());
  }

  auto run_one = [&](zd_dataset* ds, bool benign_all) {
    json opts = eval_options(ctx, benign_all);
    if (use_ae) {
      opts["thresholds"] = ctx.config.at("sweep").at("thresholds");
    }
    ReportHandle report;
    if (use_ae) {
      check(zd_eval_autoencoder(ae, pipeline, ds, opts.dump().c_str(),
                                report.out()));
    } else {
      check(zd_eval_ocsvm(svms.data(), svms.size(), pipeline, ds,
                          opts.dump().c_str(), report.out()));
    }
    stamp_metadata(report, ctx);
    emit_all_formats(report, ctx,
                     "report_" + detector + "_" + zd_dataset_id(ds));
  };

  run_one(train, false);
  if (test.get() != nullptr) run_one(test, true);
  return 0;
}

int cmd_search(const RunContext& ctx) {
  std::vector<std::string> errors;
  if (!ctx.config.contains("search")) {
    errors.push_back("search section is required");
  } else {
    const json s = ctx.config.at("search");
    for (const char* key :
         {"layer_stacks", "learning_rates", "epoch_counts", "l2_lambdas"}) {
      if (!s.contains(key) || s.at(key).empty()) {
        errors.push_back(std::string("search.") + key +
                         " must be a non-empty list");
      }
    }
  }
  if (!errors.empty()) config_fail(errors);

  load_pipeline_or_fail(ctx);  // search runs on preprocessed artifacts
  MatrixHandle train_m, val_m;
  check(zd_matrix_load_csv(ctx.artifact("benign_train.csv").string().c_str(),
                           train_m.out()));
  check(zd_matrix_load_csv(ctx.artifact("benign_val.csv").string().c_str(),
                           val_m.out()));

  json space = ctx.config.at("search");
  space["seed"] = ctx.seed;
  space["threads"] = ctx.threads;
  if (ctx.config.contains("autoencoder")) {
    const json ae = ctx.config.at("autoencoder");
    if (!space.contains("activation") && ae.contains("activation")) {
      space["activation"] = ae.at("activation");
    }
    if (!space.contains("loss") && ae.contains("loss")) {
      space["loss"] = ae.at("loss");
    }
  }

  char* result_text = nullptr;
  check(zd_ae_random_search(space.dump().c_str(), train_m, val_m, &result_text));
  const json result = json::parse(owned_string(result_text));

  std::ofstream best(ctx.artifact("search_best.json"));
  best << result.at("best").dump(2) << "\n";

  std::ofstream trials(ctx.artifact("search_trials.csv"));
  trials << "index,layers,learning_rate,epochs,l2,validation_loss\n";
  for (const auto& t : result.at("trials")) {
    std::string layers;
    for (const auto& w : t.at("layers")) {
      if (!layers.empty()) layers += "-";
      layers += std::to_string(w.get<std::size_t>());
    }
    trials << t.at("index").get<std::size_t>() << "," << layers << ","
           << fmt_double(t.at("learning_rate").get<double>()) << ","
           << t.at("epochs").get<std::size_t>() << ","
           << fmt_double(t.at("l2").get<double>()) << ","
           << fmt_double(t.at("validation_loss").get<double>()) << "\n";
  }
  std::printf("best trial: %s (val loss %s)\n",
              result.at("best").at("layers").dump().c_str(),
              fmt_double(result.at("best").at("validation_loss").get<double>()).c_str());
  std::printf("wrote search_best.json, search_trials.csv\n");
  return 0;
}

int cmd_compare(const RunContext& ctx, const std::string& report_a,
                const std::string& report_b, double threshold, double nu) {
  ReportHandle a, b;
  check(zd_report_load(report_a.c_str(), a.out()));
  check(zd_report_load(report_b.c_str(), b.out()));
  ComparisonHandle cmp;
  check(zd_report_compare(a, b, threshold, nu, cmp.out()));

  check(zd_comparison_save(cmp, "json", ctx.artifact("comparison.json").string().c_str()));
  check(zd_comparison_save(cmp, "csv", ctx.artifact("comparison.csv").string().c_str()));
  check(zd_comparison_save(cmp, "markdown", ctx.artifact("comparison.md").string().c_str()));

  // two-series plot data (class, first rate, second rate)
  char* text = nullptr;
  check(zd_comparison_render(cmp, "json", &text));
  const json doc = json::parse(owned_string(text));
  std::ofstream plot(ctx.artifact("compare_plotdata.csv"));
  plot << "class," << doc.at("first").at("detector").get<std::string>() << ","
       << doc.at("second").at("detector").get<std::string>() << "\n";
  for (const auto& row : doc.at("rows")) {
    char first[32], second[32];
    std::snprintf(first, sizeof first, "%.2f", row.at("first_rate").get<double>());
    std::snprintf(second, sizeof second, "%.2f", row.at("second_rate").get<double>());
    plot << row.at("class").get<std::string>() << "," << first << "," << second
         << "\n";
  }
  std::printf("wrote comparison.{json,csv,md}, compare_plotdata.csv\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroday - benign-only anomaly detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  std::uint64_t seed_flag = 0;
  std::size_t threads = 0;
  std::string out_dir_flag;
  app.add_option("--config", config_path, "run configuration (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_flag, "global seed override");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--out", out_dir_flag, "output directory override");

  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  auto* preprocess =
      app.add_subcommand("preprocess", "fit the benign-only transform");
  auto* train_ae = app.add_subcommand("train-ae", "train the autoencoder");
  auto* train_svm =
      app.add_subcommand("train-svm", "fit one-class SVMs over the nu list");
  auto* evaluate =
      app.add_subcommand("evaluate", "per-class detection rates over the sweep");
  auto* search =
      app.add_subcommand("search", "random hyper-parameter search");
  auto* compare = app.add_subcommand("compare", "pair two evaluation reports");

  std::string report_a, report_b;
  double cmp_threshold = 0.0, cmp_nu = 0.0;
  compare->add_option("report_a", report_a, "first report (json)")->required();
  compare->add_option("report_b", report_b, "second report (json)")->required();
  compare->add_option("--threshold", cmp_threshold, "sweep value in the first report")
      ->required();
  compare->add_option("--nu", cmp_nu, "sweep value in the second report")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunContext ctx;
    if (config_path.empty()) {
      throw CliFail{2, "--config is required"};
    }
    std::ifstream in(config_path);
    if (!in) {
      throw CliFail{2, "cannot open config: " + config_path};
    }
    try {
      in >> ctx.config;
    } catch (const json::exception& e) {
      throw CliFail{2, std::string("config is not valid JSON: ") + e.what()};
    }
    ctx.seed = seed_opt->count() > 0
                   ? seed_flag
                   : ctx.config.value("seed", std::uint64_t{0});
    ctx.threads = threads;
    ctx.out_dir = !out_dir_flag.empty()
                      ? fs::path(out_dir_flag)
                      : fs::path(ctx.config.value("output_dir", std::string("out")));
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) {
      throw CliFail{3, "cannot create output directory: " + ctx.out_dir.string()};
    }

    if (synth->parsed()) return cmd_synth(ctx);
    if (preprocess->parsed()) return cmd_preprocess(ctx);
    if (train_ae->parsed()) return cmd_train_ae(ctx);
    if (train_svm->parsed()) return cmd_train_svm(ctx);
    if (evaluate->parsed()) return cmd_evaluate(ctx);
    if (search->parsed()) return cmd_search(ctx);
    if (compare->parsed()) {
      return cmd_compare(ctx, report_a, report_b, cmp_threshold, cmp_nu);
    }
    return 2;
  } catch (const CliFail& fail) {
    std::cerr << "error: " << fail.message << "\n";
    return fail.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
