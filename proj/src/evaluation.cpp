#include "tabxai/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "tabxai/error.hpp"
#include "tabxai/hash.hpp"

namespace tabxai {

namespace {

double ratio(double num, double den, const char* name, std::vector<std::string>& degenerate) {
  if (den == 0.0) {
    degenerate.emplace_back(name);
    return 0.0;
  }
  return num / den;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile_nearest_rank(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

}  // namespace

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw Error("evaluation", "shape_mismatch", "predictions and labels must be non-empty and equal length");
  }
  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1, y = labels[i] == 1;
    if (p && y) ++m.tp;
    else if (p) ++m.fp;
    else if (y) ++m.fn;
    else ++m.tn;
  }
  const auto tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp);
  const auto tn = static_cast<double>(m.tn), fn = static_cast<double>(m.fn);
  m.accuracy = (tp + tn) / static_cast<double>(m.total());
  m.precision = ratio(tp, tp + fp, "precision", m.degenerate);
  m.recall = ratio(tp, tp + fn, "recall", m.degenerate);
  m.specificity = ratio(tn, tn + fp, "specificity", m.degenerate);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, "f1", m.degenerate);
  return m;
}

MetricsReport summarize(std::vector<Metrics> folds, std::string test_fingerprint) {
  MetricsReport r;
  r.folds = std::move(folds);
  r.test_fingerprint = std::move(test_fingerprint);
  if (r.folds.empty()) return r;
  const auto k = static_cast<double>(r.folds.size());
  auto field = [&](auto member) {
    double mean = 0.0;
    for (const auto& f : r.folds) mean += f.*member;
    mean /= k;
    double sq = 0.0;
    for (const auto& f : r.folds) sq += (f.*member - mean) * (f.*member - mean);
    r.mean.*member = mean;
    r.sd.*member = r.folds.size() > 1 ? std::sqrt(sq / (k - 1.0)) : 0.0;
  };
  field(&Metrics::accuracy);
  field(&Metrics::precision);
  field(&Metrics::recall);
  field(&Metrics::specificity);
  field(&Metrics::f1);
  for (const auto& f : r.folds) {
    r.mean.tp += f.tp;
    r.mean.fp += f.fp;
    r.mean.tn += f.tn;
    r.mean.fn += f.fn;
    for (const auto& d : f.degenerate) {
      if (std::find(r.mean.degenerate.begin(), r.mean.degenerate.end(), d) == r.mean.degenerate.end()) {
        r.mean.degenerate.push_back(d);
      }
    }
  }
  return r;
}

std::string to_string(CvProtocol p) {
  return p == CvProtocol::heldout_test ? "heldout_test" : "fold_validation";
}

CvProtocol cv_protocol_from_string(const std::string& text) {
  if (text == "heldout_test") return CvProtocol::heldout_test;
  if (text == "fold_validation") return CvProtocol::fold_validation;
  throw Error("evaluation", "config_error", "unknown CV protocol '" + text + "'");
}

std::string test_rows_fingerprint(const EncodedMatrix& dataset, std::span<const std::size_t> rows) {
  Fnv1a h;
  for (auto r : rows) {
    const std::uint64_t idx = r;
    h.update(&idx, sizeof idx);
    h.update(&dataset.labels.at(r), sizeof(int));
  }
  return h.hex();
}

MetricsReport cross_validate(const EncodedMatrix& dataset, const NetworkSpec& spec, const TrainConfig& config,
                             const SplitPlan& plan, const CvOptions& options) {
  if (plan.fold_of.size() != plan.train_indices.size() || plan.k < 2) {
    throw Error("evaluation", "config_error", "split plan does not carry k folds over the training portion");
  }
  const EncodedMatrix test = dataset.select_rows(plan.test_indices);
  std::vector<Metrics> folds;
  std::string fingerprint;
  if (options.protocol == CvProtocol::heldout_test) fingerprint = test_rows_fingerprint(dataset, plan.test_indices);
  for (int fold = 0; fold < plan.k; ++fold) {
    try {
      const auto train_rows = plan.fold_complement(fold);
      EncodedMatrix train_set = dataset.select_rows(train_rows);
      if (options.use_smote) {
        ResampleConfig rc = options.smote;
        rc.seed = mix_seed(options.smote.seed, static_cast<std::uint64_t>(fold));
        train_set = smote(train_set, rc);
      }
      TrainConfig tc = config;
      tc.seed = mix_seed(config.seed, static_cast<std::uint64_t>(fold));
      const TrainResult trained = train(train_set, spec, tc);
      if (options.protocol == CvProtocol::heldout_test) {
        folds.push_back(compute_metrics(predicted_labels(predict_batch(trained.params, test.values)), test.labels));
      } else {
        const auto held = plan.fold_members(fold);
        const EncodedMatrix val = dataset.select_rows(held);
        folds.push_back(compute_metrics(predicted_labels(predict_batch(trained.params, val.values)), val.labels));
      }
    } catch (const Error& e) {
      throw Error(e.module(), e.code(), "fold " + std::to_string(fold) + ": " + e.what());
    }
  }
  return summarize(std::move(folds), fingerprint);
}

ReducedFeatureStudy reduced_feature_study(const EncodedMatrix& dataset, const SubsetSelection& subset,
                                          const std::vector<std::string>& model_specs, bool include_baseline,
                                          const TrainConfig& config, const SplitPlan& plan,
                                          const SpecOptions& spec_options, const CvOptions& options) {
  const std::size_t n = dataset.cols();
  if (subset.features.size() > n) throw Error("evaluation", "config_error", "subset larger than the feature count");
  ReducedFeatureStudy study;
  study.features = subset.features;
  std::sort(study.features.begin(), study.features.end());
  if (std::adjacent_find(study.features.begin(), study.features.end()) != study.features.end() ||
      (!study.features.empty() && study.features.back() >= n) || study.features.empty()) {
    throw Error("evaluation", "config_error", "subset indices must be distinct and within the feature range");
  }
  for (auto f : study.features) study.feature_names.push_back(dataset.feature_names.at(f));
  const EncodedMatrix reduced = dataset.select_columns(study.features);
  study.test_fingerprint = test_rows_fingerprint(dataset, plan.test_indices);

  std::vector<std::string> specs = model_specs;
  if (include_baseline && std::find(specs.begin(), specs.end(), "O2") == specs.end()) specs.push_back("O2");
  const int full_len = static_cast<int>(n);
  const int reduced_len = static_cast<int>(study.features.size());
  for (const auto& text : specs) {
    StudyArm arm;
    arm.name = text == "O2" ? "logistic-regression" : text;
    arm.full_spec = text;
    arm.reduced_spec = rederive_spec(text, full_len, reduced_len, spec_options);
    arm.full = cross_validate(dataset, parse_spec(text, full_len, spec_options), config, plan, options);
    arm.reduced = cross_validate(reduced, parse_spec(arm.reduced_spec, reduced_len, spec_options), config, plan, options);
    study.arms.push_back(std::move(arm));
  }
  return study;
}

const MethodTiming& TimingReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw Error("evaluation", "missing_method", "no timing for method '" + name + "'");
}

TimingReport benchmark_latency(const Parameters& params, const RowMatrix& records, const BenchmarkSettings& settings) {
  if (records.rows() < 20) throw Error("evaluation", "config_error", "latency benchmark needs at least 20 records");
  if (settings.repetitions < 3) throw Error("evaluation", "config_error", "latency benchmark needs >= 3 repetitions");
  using Clock = std::chrono::steady_clock;
  // timings are taken single-threaded; the previous setting is restored on exit
  struct SingleThread {
    int saved = Eigen::nbThreads();
    SingleThread() { Eigen::setNbThreads(1); }
    ~SingleThread() { Eigen::setNbThreads(saved); }
  } single_thread;
  const PredictFn predict = [&params](const RowMatrix& rows) { return class1_probabilities(params, rows); };
  const auto n = static_cast<std::size_t>(records.cols());

  auto run = [&](int method, Eigen::Index r) {
    const Eigen::VectorXd x = records.row(r).transpose();
    const std::span<const double> record(x.data(), n);
    const auto start = Clock::now();
    if (method == 0) {
      const auto fwd = forward(params, record);
      propagate_relevance(params, fwd.trace, settings.lrp);
    } else if (method == 1) {
      LimeConfig c = settings.lime;
      c.seed = mix_seed(settings.lime.seed, static_cast<std::uint64_t>(r));
      lime_explain(predict, record, c);
    } else {
      ShapConfig c = settings.shap;
      c.seed = mix_seed(settings.shap.seed, static_cast<std::uint64_t>(r));
      shap_explain(predict, record, c);
    }
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  TimingReport report;
  report.records = static_cast<std::size_t>(records.rows());
  report.repetitions = settings.repetitions;
  const char* names[] = {"lrp", "lime", "shap"};
  const std::string fingerprints[] = {settings.lrp.describe(), settings.lime.describe(n), settings.shap.describe(n)};
  for (int method = 0; method < 3; ++method) {
    run(method, 0);  // warm-up
    MethodTiming t;
    t.method = names[method];
    t.settings = fingerprints[method];
    for (Eigen::Index r = 0; r < records.rows(); ++r) {
      double sum = 0.0;
      for (int rep = 0; rep < settings.repetitions; ++rep) sum += run(method, r);
      t.per_record.push_back(sum / settings.repetitions);
    }
    t.median = median_of(t.per_record);
    t.p90 = percentile_nearest_rank(t.per_record, 0.9);
    double total = 0.0;
    for (double d : t.per_record) total += d;
    t.mean = total / static_cast<double>(t.per_record.size());
    report.methods.push_back(std::move(t));
  }
  report.lrp_to_lime = report.methods[0].median / report.methods[1].median;
  report.lrp_to_shap = report.methods[0].median / report.methods[2].median;
  return report;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"tn", m.tn},
          {"fn", m.fn},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"specificity", m.specificity},
          {"f1", m.f1},
          {"degenerate", m.degenerate}};
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  nlohmann::json sd = to_json(r.sd);
  for (const char* k : {"tp", "fp", "tn", "fn", "degenerate"}) sd.erase(k);
  return {{"folds", folds}, {"mean", to_json(r.mean)}, {"sd", sd}, {"test_fingerprint", r.test_fingerprint}};
}

nlohmann::json to_json(const ReducedFeatureStudy& s) {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& a : s.arms) {
    arms.push_back({{"name", a.name},
                    {"full_spec", a.full_spec},
                    {"reduced_spec", a.reduced_spec},
                    {"full", to_json(a.full)},
                    {"reduced", to_json(a.reduced)},
                    {"delta_accuracy", a.reduced.mean.accuracy - a.full.mean.accuracy},
                    {"delta_f1", a.reduced.mean.f1 - a.full.mean.f1}});
  }
  return {{"features", s.features},
          {"feature_names", s.feature_names},
          {"test_fingerprint", s.test_fingerprint},
          {"arms", arms}};
}

nlohmann::json to_json(const TimingReport& t) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : t.methods) {
    methods.push_back({{"method", m.method},
                       {"settings", m.settings},
                       {"median_seconds", m.median},
                       {"p90_seconds", m.p90},
                       {"mean_seconds", m.mean},
                       {"per_record_seconds", m.per_record}});
  }
  return {{"records", t.records},
          {"repetitions", t.repetitions},
          {"methods", methods},
          {"lrp_to_lime_median_ratio", t.lrp_to_lime},
          {"lrp_to_shap_median_ratio", t.lrp_to_shap}};
}

std::string metrics_markdown(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::ostringstream out;
  out << "| Model | Acc | Preci | Recall | Speci | F1score | Cross-V |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& [name, r] : rows) {
    const bool cv = r.folds.size() > 1;
    auto cell = [&](double mean, double sd) { return cv ? fixed(mean) + " ± " + fixed(sd) : fixed(mean); };
    out << "| " << name << " | " << cell(r.mean.accuracy, r.sd.accuracy) << " | "
        << cell(r.mean.precision, r.sd.precision) << " | " << cell(r.mean.recall, r.sd.recall) << " | "
        << cell(r.mean.specificity, r.sd.specificity) << " | " << cell(r.mean.f1, r.sd.f1) << " | "
        << (cv ? "Yes" : "No") << " |\n";
  }
  return out.str();
}

std::string study_markdown(const ReducedFeatureStudy& study) {
  std::vector<std::pair<std::string, MetricsReport>> rows;
  for (const auto& a : study.arms) {
    rows.emplace_back(a.name + " (" + std::to_string(a.full.folds.empty() ? 0 : 1) + ") full: " + a.full_spec, a.full);
    rows.emplace_back(a.name + " reduced: " + a.reduced_spec, a.reduced);
  }
  std::ostringstream out;
  out << "Selected features (" << study.features.size() << "):";
  for (const auto& n : study.feature_names) out << ' ' << n;
  out << "\n\n" << metrics_markdown(rows);
  return out.str();
}

}  // namespace tabxai
