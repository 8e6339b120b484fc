#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabxai/data.hpp"
#include "tabxai/lrp.hpp"
#include "tabxai/network.hpp"
#include "tabxai/ranking.hpp"
#include "tabxai/surrogate.hpp"

namespace tabxai {

struct Metrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  // Metrics whose denominator was zero; they are reported as 0.
  std::vector<std::string> degenerate;

  std::size_t total() const { return tp + fp + tn + fn; }
};

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

struct MetricsReport {
  std::vector<Metrics> folds;
  Metrics mean;  // counts are summed; rates are averaged
  Metrics sd;    // sample standard deviation of the rates
  std::string test_fingerprint;
};

MetricsReport summarize(std::vector<Metrics> folds, std::string test_fingerprint = "");

enum class CvProtocol {
  heldout_test,     // every fold model is scored on the fixed test split
  fold_validation,  // every fold model is scored on its own held-out fold
};

std::string to_string(CvProtocol p);
CvProtocol cv_protocol_from_string(const std::string& text);

struct CvOptions {
  CvProtocol protocol = CvProtocol::heldout_test;
  ResampleConfig smote;
  bool use_smote = true;
};

/// Trains one model per fold on the other folds (SMOTE applied to those
/// rows only) and aggregates its test metrics.
MetricsReport cross_validate(const EncodedMatrix& dataset, const NetworkSpec& spec, const TrainConfig& config,
                             const SplitPlan& plan, const CvOptions& options = {});

/// Fingerprint of the rows a study evaluates on (indices and labels).
std::string test_rows_fingerprint(const EncodedMatrix& dataset, std::span<const std::size_t> rows);

struct StudyArm {
  std::string name;
  std::string full_spec;
  std::string reduced_spec;
  MetricsReport full;
  MetricsReport reduced;
};

struct ReducedFeatureStudy {
  std::vector<std::size_t> features;  // sorted column indices of the reduced arm
  std::vector<std::string> feature_names;
  std::vector<StudyArm> arms;
  std::string test_fingerprint;
};

ReducedFeatureStudy reduced_feature_study(const EncodedMatrix& dataset, const SubsetSelection& subset,
                                          const std::vector<std::string>& model_specs, bool include_baseline,
                                          const TrainConfig& config, const SplitPlan& plan,
                                          const SpecOptions& spec_options = {}, const CvOptions& options = {});

struct MethodTiming {
  std::string method;
  std::string settings;
  std::vector<double> per_record;  // seconds, mean over repetitions
  double median = 0.0;
  double p90 = 0.0;
  double mean = 0.0;
};

struct TimingReport {
  std::vector<MethodTiming> methods;
  std::size_t records = 0;
  int repetitions = 0;
  double lrp_to_lime = 0.0;  // median ratios
  double lrp_to_shap = 0.0;

  const MethodTiming& method(const std::string& name) const;
};

struct BenchmarkSettings {
  LrpConfig lrp;
  LimeConfig lime;
  ShapConfig shap;
  int repetitions = 3;
};

TimingReport benchmark_latency(const Parameters& params, const RowMatrix& records, const BenchmarkSettings& settings);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const ReducedFeatureStudy& s);
nlohmann::json to_json(const TimingReport& t);

/// One Markdown table row per report, columns as in the published tables.
std::string metrics_markdown(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string study_markdown(const ReducedFeatureStudy& study);

}  // namespace tabxai
