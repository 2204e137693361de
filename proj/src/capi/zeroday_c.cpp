#include "zeroday.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/autoencoder.hpp"
#include "core/dataset.hpp"
#include "core/eval.hpp"
#include "core/numfmt.hpp"
#include "core/ocsvm.hpp"
#include "core/parallel.hpp"
#include "core/preprocess.hpp"

using nlohmann::json;

struct zd_matrix {
  zeroday::Matrix v;
};

struct zd_dataset {
  zeroday::LabeledDataset v;
  std::vector<std::string> sorted_classes;  // stable storage for borrows

  void index() {
    sorted_classes.clear();
    for (const auto& [cls, rows] : v.class_index) sorted_classes.push_back(cls);
  }
};

struct zd_pipeline {
  zeroday::PreprocessPipeline v;
  std::string fingerprint;

  void refresh() { fingerprint = v.fingerprint(); }
};

struct zd_autoencoder {
  zeroday::AutoencoderModel v;
  mutable std::string fingerprint;
};

struct zd_ocsvm {
  zeroday::OneClassSvmModel v;
  mutable std::string fingerprint;
};

struct zd_report {
  zeroday::EvalReport v;
};

struct zd_comparison {
  zeroday::ComparisonReport v;
};

namespace {

thread_local std::string g_last_error;

zd_status set_error(zd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

zd_status map_code(zeroday::ErrorCode code) {
  using zeroday::ErrorCode;
  switch (code) {
    case ErrorCode::argument:
      return ZD_ERR_ARGUMENT;
    case ErrorCode::config:
      return ZD_ERR_CONFIG;
    case ErrorCode::data:
      return ZD_ERR_DATA;
    case ErrorCode::io:
      return ZD_ERR_IO;
    case ErrorCode::numeric:
      return ZD_ERR_NUMERIC;
    case ErrorCode::state:
      return ZD_ERR_STATE;
  }
  return ZD_ERR_INTERNAL;
}

template <typename Fn>
zd_status guarded(Fn&& fn) {
  try {
    fn();
    return ZD_OK;
  } catch (const zeroday::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const json::exception& e) {
    return set_error(ZD_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return set_error(ZD_ERR_INTERNAL, e.what());
  }
}

zd_status require(bool ok, const char* what) {
  return ok ? ZD_OK : set_error(ZD_ERR_ARGUMENT, what);
}

json parse_json_doc(const char* text, const char* what) {
  if (text == nullptr) {
    throw zeroday::Error(zeroday::ErrorCode::config,
                         std::string(what) + ": null document");
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw zeroday::Error(zeroday::ErrorCode::config,
                         std::string(what) + ": " + e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::size_t threads_from(const json& doc) {
  const std::size_t n = doc.value("threads", std::size_t{0});
  return n == 0 ? zeroday::default_threads() : n;
}

zeroday::EvalOptions eval_options_from(const json& doc) {
  zeroday::EvalOptions opts;
  opts.split.train_fraction = doc.value("split_fraction", 0.75);
  opts.split.seed = doc.value("split_seed", std::uint64_t{0});
  opts.split.shuffle = doc.value("split_shuffle", true);
  opts.benign_all_rows = doc.value("benign_rows", std::string("validation")) == "all";
  const std::string metric = doc.value("score_metric", std::string("auto"));
  if (metric != "auto") opts.score_metric = zeroday::loss_from_string(metric);
  opts.threads = threads_from(doc);
  return opts;
}

}  // namespace

extern "C" {

const char* zd_version(void) { return "1.0.0"; }

const char* zd_last_error(void) { return g_last_error.c_str(); }

void zd_string_free(char* s) { delete[] s; }

/* ---------------- matrices ---------------- */

zd_status zd_matrix_create(size_t rows, size_t cols, const double* row_major,
                           zd_matrix** out) {
  if (auto rc = require(out && row_major, "null argument")) return rc;
  return guarded([&] {
    std::vector<double> data(row_major, row_major + rows * cols);
    *out = new zd_matrix{zeroday::Matrix(rows, cols, std::move(data))};
  });
}

size_t zd_matrix_rows(const zd_matrix* m) { return m ? m->v.rows() : 0; }
size_t zd_matrix_cols(const zd_matrix* m) { return m ? m->v.cols() : 0; }

const double* zd_matrix_data(const zd_matrix* m) {
  return m ? m->v.data() : nullptr;
}

zd_status zd_matrix_save_csv(const zd_matrix* m, const char* const* names,
                             const char* path) {
  if (auto rc = require(m && path, "null argument")) return rc;
  return guarded([&] {
    std::vector<std::string> header;
    if (names != nullptr) {
      for (size_t c = 0; c < m->v.cols(); ++c) header.emplace_back(names[c]);
    } else {
      for (size_t c = 0; c < m->v.cols(); ++c) {
        header.push_back("c" + std::to_string(c));
      }
    }
    zeroday::save_matrix_csv(m->v, header, path);
  });
}

zd_status zd_matrix_load_csv(const char* path, zd_matrix** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] { *out = new zd_matrix{zeroday::load_matrix_csv(path)}; });
}

void zd_matrix_free(zd_matrix* m) { delete m; }

/* ---------------- datasets ---------------- */

zd_status zd_dataset_load(const char* options_json, zd_dataset** train,
                          zd_dataset** test) {
  if (auto rc = require(train != nullptr, "null train output")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(options_json, "dataset options");
    zeroday::LoadOptions opts;
    if (!doc.contains("train_file")) {
      throw zeroday::Error(zeroday::ErrorCode::config, "train_file is required");
    }
    const std::string train_file = doc.at("train_file").get<std::string>();
    opts.label_column = doc.value("label_column", std::string("label"));
    const std::string benign = doc.value("benign_label", std::string("benign"));
    opts.force_categorical =
        doc.value("force_categorical", std::vector<std::string>{});
    opts.ignore_columns = doc.value("ignore_columns", std::vector<std::string>{});

    auto stem = [](const std::string& p) {
      return std::filesystem::path(p).stem().string();
    };

    zeroday::LoadResult raw = zeroday::load_feature_csv(train_file, opts);
    const zeroday::CategoryVocabulary vocab = zeroday::learn_categories(raw.table);
    zeroday::EncodeResult enc = zeroday::encode_categoricals(raw.table, vocab);
    *train = new zd_dataset{zeroday::make_dataset(enc.table, raw.labels, benign,
                                                  stem(train_file))};
    (*train)->index();

    if (test != nullptr) *test = nullptr;
    if (doc.contains("test_file") && !doc.at("test_file").is_null()) {
      if (test == nullptr) {
        throw zeroday::Error(zeroday::ErrorCode::argument,
                             "test_file given but test output is null");
      }
      const std::string test_file = doc.at("test_file").get<std::string>();
      zeroday::LoadResult raw_test = zeroday::load_feature_csv(test_file, opts);
      zeroday::EncodeResult enc_test =
          zeroday::encode_categoricals(raw_test.table, vocab);
      *test = new zd_dataset{zeroday::make_dataset(
          enc_test.table, raw_test.labels, benign, stem(test_file))};
      (*test)->index();
    }
  });
}

zd_status zd_dataset_synth(const char* spec_json, zd_dataset** out) {
  if (auto rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(spec_json, "synthetic spec");
    zeroday::SyntheticSpec spec;
    spec.n_benign = doc.value("n_benign", spec.n_benign);
    spec.n_attack_classes = doc.value("n_attack_classes", spec.n_attack_classes);
    spec.n_per_attack = doc.value("n_per_attack", spec.n_per_attack);
    spec.n_features = doc.value("n_features", spec.n_features);
    spec.benign_covariance_rank =
        doc.value("benign_covariance_rank", spec.benign_covariance_rank);
    spec.attack_offsets = doc.value("attack_offsets", std::vector<double>{});
    spec.noise_sigma = doc.value("noise_sigma", spec.noise_sigma);
    spec.seed = doc.value("seed", std::uint64_t{0});
    *out = new zd_dataset{zeroday::generate_synthetic(spec)};
    (*out)->index();
  });
}

zd_status zd_dataset_save_csv(const zd_dataset* ds, const char* path) {
  if (auto rc = require(ds && path, "null argument")) return rc;
  return guarded([&] { zeroday::save_dataset_csv(ds->v, path); });
}

size_t zd_dataset_rows(const zd_dataset* ds) { return ds ? ds->v.n_rows() : 0; }

size_t zd_dataset_cols(const zd_dataset* ds) {
  return ds ? ds->v.features.cols() : 0;
}

const char* zd_dataset_id(const zd_dataset* ds) {
  return ds ? ds->v.dataset_id.c_str() : nullptr;
}

const char* zd_dataset_benign_label(const zd_dataset* ds) {
  return ds ? ds->v.benign_label.c_str() : nullptr;
}

size_t zd_dataset_class_count(const zd_dataset* ds) {
  return ds ? ds->sorted_classes.size() : 0;
}

const char* zd_dataset_class_name(const zd_dataset* ds, size_t idx) {
  if (ds == nullptr || idx >= ds->sorted_classes.size()) return nullptr;
  return ds->sorted_classes[idx].c_str();
}

size_t zd_dataset_class_rows(const zd_dataset* ds, const char* cls) {
  if (ds == nullptr || cls == nullptr) return 0;
  auto it = ds->v.class_index.find(cls);
  return it == ds->v.class_index.end() ? 0 : it->second.size();
}

zd_status zd_dataset_features(const zd_dataset* ds, zd_matrix** out) {
  if (auto rc = require(ds && out, "null argument")) return rc;
  return guarded([&] { *out = new zd_matrix{ds->v.features}; });
}

zd_status zd_dataset_split_benign(const zd_dataset* ds, double train_fraction,
                                  int shuffle, uint64_t seed, zd_matrix** train,
                                  zd_matrix** validation) {
  if (auto rc = require(ds && train && validation, "null argument")) return rc;
  return guarded([&] {
    zeroday::SplitSpec spec{train_fraction, seed, shuffle != 0};
    zeroday::BenignSplit split = zeroday::split_benign(ds->v, spec);
    *train = new zd_matrix{std::move(split.train)};
    *validation = new zd_matrix{std::move(split.validation)};
  });
}

void zd_dataset_free(zd_dataset* ds) { delete ds; }

/* ---------------- pipeline ---------------- */

zd_status zd_pipeline_fit(const zd_dataset* ds, double threshold, int prune,
                          zd_pipeline** out) {
  if (auto rc = require(ds && out, "null argument")) return rc;
  return guarded([&] {
    if (!ds->v.has_class(ds->v.benign_label)) {
      throw zeroday::Error(zeroday::ErrorCode::data,
                           "dataset holds no benign class '" +
                               ds->v.benign_label + "'");
    }
    const zeroday::Matrix benign =
        zeroday::select_rows(ds->v.features, ds->v.rows_of(ds->v.benign_label));
    auto* p = new zd_pipeline{
        zeroday::fit_pipeline(benign, ds->v.column_names, threshold, prune != 0),
        {}};
    p->refresh();
    *out = p;
  });
}

zd_status zd_pipeline_apply(const zd_pipeline* p, const zd_matrix* in,
                            zd_matrix** out) {
  if (auto rc = require(p && in && out, "null argument")) return rc;
  return guarded([&] {
    *out = new zd_matrix{zeroday::apply_pipeline(p->v, in->v)};
  });
}

size_t zd_pipeline_original_width(const zd_pipeline* p) {
  return p ? p->v.original_width() : 0;
}

size_t zd_pipeline_kept_count(const zd_pipeline* p) {
  return p ? p->v.kept_width() : 0;
}

const char* zd_pipeline_kept_name(const zd_pipeline* p, size_t idx) {
  if (p == nullptr || idx >= p->v.drop.kept.size()) return nullptr;
  return p->v.drop.kept[idx].c_str();
}

size_t zd_pipeline_dropped_count(const zd_pipeline* p) {
  return p ? p->v.drop.dropped.size() + p->v.drop.dropped_constant.size() : 0;
}

const char* zd_pipeline_fingerprint(const zd_pipeline* p) {
  return p ? p->fingerprint.c_str() : nullptr;
}

zd_status zd_pipeline_save(const zd_pipeline* p, const char* path) {
  if (auto rc = require(p && path, "null argument")) return rc;
  return guarded([&] { zeroday::save_pipeline(p->v, path); });
}

zd_status zd_pipeline_load(const char* path, zd_pipeline** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto* p = new zd_pipeline{zeroday::load_pipeline(path), {}};
    p->refresh();
    *out = p;
  });
}

void zd_pipeline_free(zd_pipeline* p) { delete p; }

/* ---------------- autoencoder ---------------- */

zd_status zd_ae_build(const char* config_json, uint64_t seed,
                      zd_autoencoder** out) {
  if (auto rc = require(out != nullptr, "null output")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(config_json, "autoencoder config");
    zeroday::Architecture arch;
    arch.layer_widths = doc.at("layers").get<std::vector<std::size_t>>();
    arch.hidden_activation = zeroday::activation_from_string(
        doc.value("activation", std::string("tanh")));
    const zeroday::LossKind loss =
        zeroday::loss_from_string(doc.value("loss", std::string("mse")));
    const double l2 = doc.value("l2", 0.0);
    *out = new zd_autoencoder{
        zeroday::build_autoencoder(arch, loss, l2, seed), {}};
  });
}

zd_status zd_ae_train(zd_autoencoder* ae, const zd_matrix* train,
                      const zd_matrix* validation, const char* train_json,
                      double* train_curve, double* val_curve) {
  if (auto rc = require(ae && train && validation, "null argument")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(train_json, "train config");
    zeroday::TrainConfig cfg;
    cfg.epochs = doc.value("epochs", cfg.epochs);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
    cfg.l2_lambda = doc.value("l2", ae->v.l2_lambda);
    cfg.loss_kind = ae->v.loss_kind;
    cfg.seed = doc.value("seed", std::uint64_t{0});
    const std::size_t threads = threads_from(doc);
    zeroday::TrainHistory history =
        zeroday::train(ae->v, cfg, train->v, validation->v, threads);
    ae->fingerprint.clear();
    if (train_curve != nullptr) {
      std::copy(history.train_loss.begin(), history.train_loss.end(),
                train_curve);
    }
    if (val_curve != nullptr) {
      std::copy(history.validation_loss.begin(), history.validation_loss.end(),
                val_curve);
    }
  });
}

zd_status zd_ae_score(const zd_autoencoder* ae, const zd_matrix* x,
                      double* scores) {
  if (auto rc = require(ae && x && scores, "null argument")) return rc;
  return guarded([&] {
    std::vector<double> s =
        zeroday::score(ae->v, x->v, zeroday::default_threads());
    std::copy(s.begin(), s.end(), scores);
  });
}

size_t zd_ae_input_width(const zd_autoencoder* ae) {
  return ae ? ae->v.input_width() : 0;
}

zd_status zd_ae_set_pipeline_fingerprint(zd_autoencoder* ae, const char* fp) {
  if (auto rc = require(ae && fp, "null argument")) return rc;
  ae->v.pipeline_fingerprint = fp;
  ae->fingerprint.clear();
  return ZD_OK;
}

const char* zd_ae_fingerprint(const zd_autoencoder* ae) {
  if (ae == nullptr) return nullptr;
  if (ae->fingerprint.empty()) ae->fingerprint = ae->v.fingerprint();
  return ae->fingerprint.c_str();
}

zd_status zd_ae_save(const zd_autoencoder* ae, const char* path) {
  if (auto rc = require(ae && path, "null argument")) return rc;
  return guarded([&] { zeroday::save_autoencoder(ae->v, path); });
}

zd_status zd_ae_load(const char* path, zd_autoencoder** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded(
      [&] { *out = new zd_autoencoder{zeroday::load_autoencoder(path), {}}; });
}

void zd_ae_free(zd_autoencoder* ae) { delete ae; }

double zd_detect_rate(const double* scores, size_t n, double threshold) {
  if (scores == nullptr || n == 0) return static_cast<double>(NAN);
  return zeroday::detect({scores, n}, threshold);
}

zd_status zd_ae_random_search(const char* space_json, const zd_matrix* train,
                              const zd_matrix* validation, char** result_json) {
  if (auto rc = require(train && validation && result_json, "null argument")) {
    return rc;
  }
  return guarded([&] {
    const json doc = parse_json_doc(space_json, "search space");
    zeroday::SearchSpace space;
    const auto activation = zeroday::activation_from_string(
        doc.value("activation", std::string("tanh")));
    for (const auto& stack : doc.at("layer_stacks")) {
      zeroday::Architecture arch;
      arch.layer_widths = stack.get<std::vector<std::size_t>>();
      arch.hidden_activation = activation;
      space.architectures.push_back(std::move(arch));
    }
    space.learning_rates = doc.at("learning_rates").get<std::vector<double>>();
    space.epoch_counts = doc.at("epoch_counts").get<std::vector<std::size_t>>();
    space.l2_lambdas = doc.at("l2_lambdas").get<std::vector<double>>();
    space.budget = doc.value("budget", std::size_t{1});
    space.seed = doc.value("seed", std::uint64_t{0});
    space.batch_size = doc.value("batch_size", std::size_t{1024});
    const zeroday::LossKind loss =
        zeroday::loss_from_string(doc.value("loss", std::string("mse")));
    const std::size_t threads = threads_from(doc);

    zeroday::SearchResult result =
        zeroday::random_search(space, loss, train->v, validation->v, threads);

    auto trial_json = [&](const zeroday::SearchTrial& t) {
      return json{{"index", t.index},
                  {"layers", t.architecture.layer_widths},
                  {"activation", zeroday::to_string(t.architecture.hidden_activation)},
                  {"loss", zeroday::to_string(loss)},
                  {"learning_rate", t.config.learning_rate},
                  {"epochs", t.config.epochs},
                  {"l2", t.config.l2_lambda},
                  {"validation_loss", t.validation_loss}};
    };
    json out;
    out["best"] = trial_json(result.best());
    json trials = json::array();
    for (const auto& t : result.trials) trials.push_back(trial_json(t));
    out["trials"] = trials;
    *result_json = copy_string(out.dump(2) + "\n");
  });
}

/* ---------------- one-class SVM ---------------- */

zd_status zd_ocsvm_fit(const zd_matrix* train, const char* config_json,
                       zd_ocsvm** out) {
  if (auto rc = require(train && out, "null argument")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(config_json, "ocsvm config");
    const double nu = doc.value("nu", 0.5);
    zeroday::KernelSpec kernel;
    if (doc.contains("gamma") && doc.at("gamma").is_number()) {
      kernel.gamma = doc.at("gamma").get<double>();
    }
    zeroday::SmoConfig cfg;
    cfg.tolerance = doc.value("tolerance", cfg.tolerance);
    cfg.max_passes = doc.value("max_passes", cfg.max_passes);
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.cache_mb = doc.value("cache_mb", cfg.cache_mb);
    *out = new zd_ocsvm{
        zeroday::fit(train->v, nu, kernel, cfg, threads_from(doc)), {}};
  });
}

zd_status zd_ocsvm_decision(const zd_ocsvm* m, const double* x, size_t dim,
                            double* out) {
  if (auto rc = require(m && x && out, "null argument")) return rc;
  return guarded([&] { *out = zeroday::decision_function(m->v, {x, dim}); });
}

zd_status zd_ocsvm_predict(const zd_ocsvm* m, const double* x, size_t dim,
                           int* outlier) {
  if (auto rc = require(m && x && outlier, "null argument")) return rc;
  return guarded([&] {
    *outlier = zeroday::predict(m->v, {x, dim}) == zeroday::Prediction::outlier;
  });
}

zd_status zd_ocsvm_detect_rate(const zd_ocsvm* m, const zd_matrix* x,
                               double* rate) {
  if (auto rc = require(m && x && rate, "null argument")) return rc;
  return guarded([&] {
    *rate = zeroday::detect_rate(m->v, x->v, zeroday::default_threads());
  });
}

double zd_ocsvm_nu(const zd_ocsvm* m) { return m ? m->v.nu : 0.0; }
double zd_ocsvm_gamma(const zd_ocsvm* m) { return m ? m->v.gamma : 0.0; }

size_t zd_ocsvm_support_vector_count(const zd_ocsvm* m) {
  return m ? m->v.support_vectors.rows() : 0;
}

zd_status zd_ocsvm_set_pipeline_fingerprint(zd_ocsvm* m, const char* fp) {
  if (auto rc = require(m && fp, "null argument")) return rc;
  m->v.pipeline_fingerprint = fp;
  m->fingerprint.clear();
  return ZD_OK;
}

const char* zd_ocsvm_fingerprint(const zd_ocsvm* m) {
  if (m == nullptr) return nullptr;
  if (m->fingerprint.empty()) m->fingerprint = m->v.fingerprint();
  return m->fingerprint.c_str();
}

zd_status zd_ocsvm_save(const zd_ocsvm* m, const char* path) {
  if (auto rc = require(m && path, "null argument")) return rc;
  return guarded([&] { zeroday::save_ocsvm(m->v, path); });
}

zd_status zd_ocsvm_load(const char* path, zd_ocsvm** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] { *out = new zd_ocsvm{zeroday::load_ocsvm(path), {}}; });
}

void zd_ocsvm_free(zd_ocsvm* m) { delete m; }

/* ---------------- evaluation ---------------- */

zd_status zd_eval_autoencoder(const zd_autoencoder* ae, const zd_pipeline* p,
                              const zd_dataset* ds, const char* options_json,
                              zd_report** out) {
  if (auto rc = require(ae && p && ds && out, "null argument")) return rc;
  return guarded([&] {
    const json doc = parse_json_doc(options_json, "eval options");
    zeroday::ThresholdSweep sweep;
    sweep.values = doc.at("thresholds").get<std::vector<double>>();
    const zeroday::EvalOptions opts = eval_options_from(doc);
    *out = new zd_report{
        zeroday::evaluate_autoencoder(ae->v, p->v, ds->v, sweep, opts)};
  });
}

zd_status zd_eval_ocsvm(const zd_ocsvm* const* models, size_t n_models,
                        const zd_pipeline* p, const zd_dataset* ds,
                        const char* options_json, zd_report** out) {
  if (auto rc = require(models && n_models > 0 && p && ds && out,
                        "null argument")) {
    return rc;
  }
  return guarded([&] {
    const json doc = options_json == nullptr ? json::object()
                                             : parse_json_doc(options_json,
                                                              "eval options");
    std::vector<zeroday::OneClassSvmModel> ms;
    ms.reserve(n_models);
    for (size_t i = 0; i < n_models; ++i) {
      if (models[i] == nullptr) {
        throw zeroday::Error(zeroday::ErrorCode::argument, "null model handle");
      }
      ms.push_back(models[i]->v);
    }
    const zeroday::EvalOptions opts = eval_options_from(doc);
    *out = new zd_report{zeroday::evaluate_ocsvm_models(ms, p->v, ds->v, opts)};
  });
}

zd_status zd_report_set_meta(zd_report* r, const char* key, const char* value) {
  if (auto rc = require(r && key && value, "null argument")) return rc;
  r->v.metadata[key] = value;
  return ZD_OK;
}

zd_status zd_report_rate(const zd_report* r, const char* cls, double sweep_value,
                         double* out) {
  if (auto rc = require(r && cls && out, "null argument")) return rc;
  return guarded([&] { *out = r->v.rate_at(cls, sweep_value); });
}

zd_status zd_report_overall_accuracy(const zd_report* r, double sweep_value,
                                     double* out) {
  if (auto rc = require(r && out, "null argument")) return rc;
  return guarded([&] {
    for (size_t i = 0; i < r->v.sweep.size(); ++i) {
      if (r->v.sweep[i] == sweep_value) {
        *out = r->v.overall_accuracy[i];
        return;
      }
    }
    throw zeroday::Error(zeroday::ErrorCode::argument,
                         "sweep value not in report");
  });
}

zd_status zd_report_render(const zd_report* r, const char* format, char** out) {
  if (auto rc = require(r && format && out, "null argument")) return rc;
  return guarded([&] {
    *out = copy_string(zeroday::render_report(
        r->v, zeroday::report_format_from_string(format)));
  });
}

zd_status zd_report_save(const zd_report* r, const char* format,
                         const char* path) {
  if (auto rc = require(r && format && path, "null argument")) return rc;
  return guarded([&] {
    zeroday::save_report(r->v, zeroday::report_format_from_string(format), path);
  });
}

zd_status zd_report_load(const char* path, zd_report** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] { *out = new zd_report{zeroday::load_eval_report(path)}; });
}

zd_status zd_report_compare(const zd_report* first, const zd_report* second,
                            double first_value, double second_value,
                            zd_comparison** out) {
  if (auto rc = require(first && second && out, "null argument")) return rc;
  return guarded([&] {
    *out = new zd_comparison{
        zeroday::compare(first->v, second->v, first_value, second_value)};
  });
}

zd_status zd_comparison_render(const zd_comparison* c, const char* format,
                               char** out) {
  if (auto rc = require(c && format && out, "null argument")) return rc;
  return guarded([&] {
    *out = copy_string(zeroday::render_comparison(
        c->v, zeroday::report_format_from_string(format)));
  });
}

zd_status zd_comparison_save(const zd_comparison* c, const char* format,
                             const char* path) {
  if (auto rc = require(c && format && path, "null argument")) return rc;
  return guarded([&] {
    zeroday::save_comparison(c->v, zeroday::report_format_from_string(format),
                             path);
  });
}

void zd_comparison_free(zd_comparison* c) { delete c; }

void zd_report_free(zd_report* r) { delete r; }

} /* extern "C" */
