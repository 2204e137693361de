// Exercises the shared-library surface end to end: handles, status
// codes, and error reporting.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "zeroday.h"
#include "helpers.hpp"

using testutil::TempDir;

namespace {

const char* kSynthSpec = R"({
  "n_benign": 800, "n_attack_classes": 2, "n_per_attack": 300,
  "n_features": 8, "benign_covariance_rank": 3,
  "attack_offsets": [10.0, 0.0], "noise_sigma": 1.0, "seed": 21
})";

std::string take(char* s) {
  std::string out = s ? s : "";
  zd_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("capi: version and error text") {
  CHECK(zd_version() != nullptr);
  CHECK(zd_dataset_synth("{ not json", nullptr) == ZD_ERR_ARGUMENT);
  zd_dataset* ds = nullptr;
  CHECK(zd_dataset_synth("{ not json", &ds) == ZD_ERR_CONFIG);
  CHECK(std::strlen(zd_last_error()) > 0);
}

TEST_CASE("capi: full pipeline through opaque handles") {
  TempDir tmp("capi");

  zd_dataset* ds = nullptr;
  REQUIRE(zd_dataset_synth(kSynthSpec, &ds) == ZD_OK);
  CHECK(zd_dataset_rows(ds) == 1400);
  CHECK(zd_dataset_cols(ds) == 8);
  CHECK(zd_dataset_class_count(ds) == 3);
  CHECK(std::string(zd_dataset_class_name(ds, 0)) == "attack_1");
  CHECK(zd_dataset_class_name(ds, 9) == nullptr);
  CHECK(zd_dataset_class_rows(ds, "benign") == 800);
  CHECK(std::string(zd_dataset_benign_label(ds)) == "benign");

  zd_pipeline* pipe = nullptr;
  REQUIRE(zd_pipeline_fit(ds, 0.9, 1, &pipe) == ZD_OK);
  const std::size_t kept = zd_pipeline_kept_count(pipe);
  CHECK(kept >= 1);
  CHECK(zd_pipeline_fingerprint(pipe) != nullptr);

  const std::string pipe_path = tmp.file("pipeline.json");
  REQUIRE(zd_pipeline_save(pipe, pipe_path.c_str()) == ZD_OK);
  zd_pipeline* pipe2 = nullptr;
  REQUIRE(zd_pipeline_load(pipe_path.c_str(), &pipe2) == ZD_OK);
  CHECK(std::string(zd_pipeline_fingerprint(pipe2)) ==
        zd_pipeline_fingerprint(pipe));

  zd_matrix *train = nullptr, *val = nullptr;
  REQUIRE(zd_dataset_split_benign(ds, 0.75, 1, 5, &train, &val) == ZD_OK);
  CHECK(zd_matrix_rows(train) == 600);
  CHECK(zd_matrix_rows(val) == 200);

  zd_matrix *train_t = nullptr, *val_t = nullptr;
  REQUIRE(zd_pipeline_apply(pipe, train, &train_t) == ZD_OK);
  REQUIRE(zd_pipeline_apply(pipe, val, &val_t) == ZD_OK);
  CHECK(zd_matrix_cols(train_t) == kept);

  // autoencoder built against the kept width
  const std::string ae_cfg = R"({"layers": [)" + std::to_string(kept) +
                             ", 6, 3, 6, " + std::to_string(kept) +
                             R"(], "activation": "tanh", "loss": "mse", "l2": 0.0001})";
  zd_autoencoder* ae = nullptr;
  REQUIRE(zd_ae_build(ae_cfg.c_str(), 7, &ae) == ZD_OK);
  CHECK(zd_ae_input_width(ae) == kept);
  REQUIRE(zd_ae_set_pipeline_fingerprint(ae, zd_pipeline_fingerprint(pipe)) ==
          ZD_OK);

  std::vector<double> curve_t(20), curve_v(20);
  REQUIRE(zd_ae_train(ae, train_t, val_t,
                      R"({"epochs":20,"batch_size":128,"learning_rate":0.005,
                          "l2":0.0001,"seed":7,"threads":2})",
                      curve_t.data(), curve_v.data()) == ZD_OK);
  CHECK(curve_v.back() < curve_v.front());

  std::vector<double> scores(zd_matrix_rows(val_t));
  REQUIRE(zd_ae_score(ae, val_t, scores.data()) == ZD_OK);
  const double rate = zd_detect_rate(scores.data(), scores.size(), 1e-9);
  CHECK(rate == 1.0);

  const std::string ae_path = tmp.file("model.ae");
  REQUIRE(zd_ae_save(ae, ae_path.c_str()) == ZD_OK);
  zd_autoencoder* ae2 = nullptr;
  REQUIRE(zd_ae_load(ae_path.c_str(), &ae2) == ZD_OK);
  CHECK(std::string(zd_ae_fingerprint(ae2)) == zd_ae_fingerprint(ae));

  // one-class SVMs across two nu values
  std::vector<zd_ocsvm*> svms;
  for (const char* cfg :
       {R"({"nu":0.2,"gamma":"scale","seed":3})",
        R"({"nu":0.1,"gamma":"scale","seed":3})"}) {
    zd_ocsvm* m = nullptr;
    REQUIRE(zd_ocsvm_fit(train_t, cfg, &m) == ZD_OK);
    REQUIRE(zd_ocsvm_set_pipeline_fingerprint(
                m, zd_pipeline_fingerprint(pipe)) == ZD_OK);
    CHECK(zd_ocsvm_support_vector_count(m) > 0);
    CHECK(zd_ocsvm_gamma(m) > 0.0);
    svms.push_back(m);
  }
  CHECK(zd_ocsvm_nu(svms[0]) == 0.2);

  double dec = 0.0;
  std::vector<double> far(kept, 50.0);
  REQUIRE(zd_ocsvm_decision(svms[0], far.data(), far.size(), &dec) == ZD_OK);
  CHECK(dec < 0.0);
  int outlier = 0;
  REQUIRE(zd_ocsvm_predict(svms[0], far.data(), far.size(), &outlier) == ZD_OK);
  CHECK(outlier == 1);

  const std::string svm_path = tmp.file("model.svm");
  REQUIRE(zd_ocsvm_save(svms[0], svm_path.c_str()) == ZD_OK);
  zd_ocsvm* svm2 = nullptr;
  REQUIRE(zd_ocsvm_load(svm_path.c_str(), &svm2) == ZD_OK);
  CHECK(std::string(zd_ocsvm_fingerprint(svm2)) == zd_ocsvm_fingerprint(svms[0]));

  // evaluation reports
  zd_report* ae_report = nullptr;
  REQUIRE(zd_eval_autoencoder(ae, pipe, ds,
                              R"({"thresholds":[0.001,0.5,2.0],
                                  "split_fraction":0.75,"split_seed":5})",
                              &ae_report) == ZD_OK);
  double far_recall = 0.0;
  REQUIRE(zd_report_rate(ae_report, "attack_1", 0.5, &far_recall) == ZD_OK);
  CHECK(far_recall > 0.9);
  double overall = 0.0;
  REQUIRE(zd_report_overall_accuracy(ae_report, 0.5, &overall) == ZD_OK);
  CHECK(overall > 0.0);
  CHECK(zd_report_rate(ae_report, "no_such_class", 0.5, &far_recall) ==
        ZD_ERR_ARGUMENT);

  zd_report* svm_report = nullptr;
  REQUIRE(zd_eval_ocsvm(svms.data(), svms.size(), pipe, ds,
                        R"({"split_fraction":0.75,"split_seed":5})",
                        &svm_report) == ZD_OK);

  REQUIRE(zd_report_set_meta(ae_report, "note", "capi test") == ZD_OK);
  const std::string rendered = take([&] {
    char* text = nullptr;
    REQUIRE(zd_report_render(ae_report, "json", &text) == ZD_OK);
    return text;
  }());
  CHECK(rendered.find("capi test") != std::string::npos);

  const std::string report_path = tmp.file("report.json");
  REQUIRE(zd_report_save(ae_report, "json", report_path.c_str()) == ZD_OK);
  zd_report* loaded = nullptr;
  REQUIRE(zd_report_load(report_path.c_str(), &loaded) == ZD_OK);

  zd_comparison* cmp = nullptr;
  REQUIRE(zd_report_compare(loaded, svm_report, 0.5, 0.2, &cmp) == ZD_OK);
  const std::string cmp_csv = take([&] {
    char* text = nullptr;
    REQUIRE(zd_comparison_render(cmp, "csv", &text) == ZD_OK);
    return text;
  }());
  CHECK(cmp_csv.find("attack_1") != std::string::npos);

  zd_comparison_free(cmp);
  zd_report_free(loaded);
  zd_report_free(svm_report);
  zd_report_free(ae_report);
  zd_ocsvm_free(svm2);
  for (auto* m : svms) zd_ocsvm_free(m);
  zd_ae_free(ae2);
  zd_ae_free(ae);
  zd_matrix_free(train_t);
  zd_matrix_free(val_t);
  zd_matrix_free(train);
  zd_matrix_free(val);
  zd_pipeline_free(pipe2);
  zd_pipeline_free(pipe);
  zd_dataset_free(ds);
}

TEST_CASE("capi: status codes map failure kinds") {
  zd_matrix* m = nullptr;
  CHECK(zd_matrix_load_csv("/no/such/file.csv", &m) == ZD_ERR_IO);

  zd_dataset* ds = nullptr;
  CHECK(zd_dataset_load(R"({"label_column":"x"})", &ds, nullptr) ==
        ZD_ERR_CONFIG);  // train_file missing

  zd_dataset* synth = nullptr;
  REQUIRE(zd_dataset_synth(kSynthSpec, &synth) == ZD_OK);
  zd_pipeline* pipe = nullptr;
  REQUIRE(zd_pipeline_fit(synth, 0.9, 1, &pipe) == ZD_OK);

  // wrong width into the pipeline
  std::vector<double> cell(3, 1.0);
  zd_matrix* narrow = nullptr;
  REQUIRE(zd_matrix_create(1, 3, cell.data(), &narrow) == ZD_OK);
  zd_matrix* out = nullptr;
  CHECK(zd_pipeline_apply(pipe, narrow, &out) == ZD_ERR_ARGUMENT);

  // unconverged solver surfaces ZD_ERR_NUMERIC
  zd_matrix* feats = nullptr;
  REQUIRE(zd_dataset_features(synth, &feats) == ZD_OK);
  zd_ocsvm* svm = nullptr;
  CHECK(zd_ocsvm_fit(feats, R"({"nu":0.1,"tolerance":1e-14,"max_passes":1})",
                     &svm) == ZD_ERR_NUMERIC);

  zd_matrix_free(feats);
  zd_matrix_free(narrow);
  zd_pipeline_free(pipe);
  zd_dataset_free(synth);
}

TEST_CASE("capi: csv loading matches the saved dataset") {
  TempDir tmp("capi_csv");
  zd_dataset* synth = nullptr;
  REQUIRE(zd_dataset_synth(kSynthSpec, &synth) == ZD_OK);
  const std::string csv = tmp.file("ds.csv");
  REQUIRE(zd_dataset_save_csv(synth, csv.c_str()) == ZD_OK);

  const std::string options = R"({"train_file": ")" + csv +
                              R"(", "label_column": "label",
                                  "benign_label": "benign"})";
  zd_dataset* loaded = nullptr;
  REQUIRE(zd_dataset_load(options.c_str(), &loaded, nullptr) == ZD_OK);
  CHECK(zd_dataset_rows(loaded) == zd_dataset_rows(synth));
  CHECK(zd_dataset_cols(loaded) == zd_dataset_cols(synth));

  zd_matrix *a = nullptr, *b = nullptr;
  REQUIRE(zd_dataset_features(synth, &a) == ZD_OK);
  REQUIRE(zd_dataset_features(loaded, &b) == ZD_OK);
  const std::size_t n = zd_matrix_rows(a) * zd_matrix_cols(a);
  CHECK(std::memcmp(zd_matrix_data(a), zd_matrix_data(b), n * sizeof(double)) ==
        0);

  zd_matrix_free(a);
  zd_matrix_free(b);
  zd_dataset_free(loaded);
  zd_dataset_free(synth);
}
