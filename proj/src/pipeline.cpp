#include "tabxai/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tabxai/csv.hpp"
#include "tabxai/error.hpp"
#include "tabxai/evaluation.hpp"
#include "tabxai/hash.hpp"
#include "tabxai/heatmap_svg.hpp"
#include "tabxai/lrp.hpp"
#include "tabxai/network.hpp"
#include "tabxai/ranking.hpp"
#include "tabxai/surrogate.hpp"

namespace tabxai {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFetchHelp =
    "Datasets are not bundled. Download WA_Fn-UseC_-Telco-Customer-Churn.csv "
    "(kaggle.com/datasets/blastchar/telco-customer-churn) or creditcard.csv "
    "(kaggle.com/datasets/mlg-ulb/creditcardfraud) and point data.path at it.";

struct Stage {
  const RunConfig& cfg;
  fs::path dir;
  std::ostream& log;
  std::string hash;
  std::string seeds;
};

std::string seeds_text(const RunConfig& c) {
  return "data=" + c.get("data.seed") + ";smote=" + c.get("smote.seed") + ";train=" + c.get("train.seed") +
         ";lime=" + c.get("lime.seed") + ";shap=" + c.get("shap.seed");
}

json stamp(const Stage& s) { return {{"config_hash", s.hash}, {"seeds", s.seeds}}; }

std::string comment(const Stage& s) { return "config_hash=" + s.hash + " seeds=" + s.seeds; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cli", "write_error", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("cli", "write_error", "failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cli", "io_error", "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path require(const Stage& s, const std::string& name, const std::string& producer) {
  const fs::path p = s.dir / name;
  if (!fs::exists(p)) {
    throw Error("cli", "missing_prerequisite",
                name + " not found in " + s.dir.string() + "; run '" + producer + "' first");
  }
  return p;
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error("cli", "artifact_corrupt", path.string() + ": " + e.what());
  }
}

SpecOptions spec_options(const RunConfig& c) {
  SpecOptions o;
  o.kernel_width = c.get_int("model.kernel_width");
  o.relu_every_conv = c.get_bool("model.relu_every_conv");
  return o;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.learning_rate = c.get_double("train.learning_rate");
  t.batch_size = c.get_int("train.batch_size");
  t.max_iterations = c.get_int("train.max_iterations");
  t.momentum = c.get_double("train.momentum");
  t.seed = c.get_u64("train.seed");
  t.init_scheme = c.get("train.init");
  t.validate();
  return t;
}

LrpConfig lrp_config(const RunConfig& c) {
  LrpConfig l;
  l.rule = lrp_rule_from_string(c.get("lrp.rule"));
  l.epsilon = c.get_double("lrp.epsilon");
  l.alpha = c.get_double("lrp.alpha");
  l.beta = c.get_double("lrp.beta");
  const std::string& target = c.get("lrp.target");
  if (target == "0" || target == "1") l.target = target == "1" ? 1 : 0;
  else if (target != "predicted") throw Error("cli", "config_error", "lrp.target must be predicted, 0 or 1");
  l.validate();
  return l;
}

LimeConfig lime_config(const RunConfig& c) {
  LimeConfig l;
  l.n_perturbations = c.get_int("lime.n_perturbations");
  l.noise_scale = c.get_double("lime.noise_scale");
  l.kernel_width = c.get_double("lime.kernel_width");
  l.ridge = c.get_double("lime.ridge");
  l.seed = c.get_u64("lime.seed");
  return l;
}

ShapConfig shap_config(const RunConfig& c, Eigen::VectorXd background) {
  ShapConfig s;
  s.mode = shap_mode_from_string(c.get("shap.mode"));
  s.n_permutations = c.get_int("shap.n_permutations");
  s.seed = c.get_u64("shap.seed");
  s.background = std::move(background);
  return s;
}

RankingConfig ranking_config(const RunConfig& c) {
  RankingConfig r;
  r.tau = c.get_double("rank.tau");
  r.per_class_top = c.get_int("rank.per_class_top");
  r.total = c.get_int("rank.total");
  return r;
}

CvOptions cv_options(const RunConfig& c) {
  CvOptions o;
  o.protocol = cv_protocol_from_string(c.get("cv.protocol"));
  o.use_smote = c.get_bool("smote.enabled");
  o.smote.k_neighbors = c.get_int("smote.k");
  o.smote.seed = c.get_u64("smote.seed");
  return o;
}

std::vector<std::string> methods(const RunConfig& c) {
  auto list = c.get_list("explain.methods");
  for (const auto& m : list) {
    if (m != "lrp" && m != "lime" && m != "shap") {
      throw Error("cli", "config_error", "explain.methods accepts lrp, lime, shap; got '" + m + "'");
    }
  }
  if (list.empty()) throw Error("cli", "config_error", "explain.methods is empty");
  return list;
}

struct Prepared {
  EncodedMatrix data;
  EncoderState encoder;
  SplitPlan split;
};

Prepared load_prepared(const Stage& s) {
  Prepared p;
  p.data = read_encoded_csv(require(s, "encoded.csv", "prep"));
  p.encoder = read_json(require(s, "encoder.json", "prep")).get<EncoderState>();
  p.split = read_json(require(s, "split.json", "prep")).get<SplitPlan>();
  if (p.split.train_indices.size() + p.split.test_indices.size() != p.data.rows()) {
    throw Error("cli", "artifact_mismatch", "split.json does not cover encoded.csv; rerun 'prep'");
  }
  return p;
}

Checkpoint load_model(const Stage& s, const Prepared& p) {
  Checkpoint ck = load_checkpoint(require(s, "model.json", "train"));
  const std::string expected = p.encoder.fingerprint();
  const std::string actual = ck.encoder.fingerprint();
  if (expected != actual) {
    throw Error("cli", "encoder_mismatch",
                "model.json was trained with encoder " + actual + " but the prepared data uses encoder " + expected +
                    "; rerun 'train' after 'prep'");
  }
  if (static_cast<std::size_t>(ck.params.spec.input_len) != p.data.cols()) {
    throw Error("cli", "encoder_mismatch", "model input length does not match the prepared feature count");
  }
  return ck;
}

// --- prep -------------------------------------------------------------------

std::vector<std::string> read_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cli", "io_error", "cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty() || line[0] == '#') continue;
    return csv::parse(line + "\n", path.string()).header;
  }
  throw Error("data", "missing_header", path.string() + " has no header row");
}

void prep(Stage& s) {
  const std::string path = s.cfg.get("data.path");
  if (path.empty()) throw Error("cli", "config_error", std::string("data.path is not set. ") + kFetchHelp);
  if (!fs::exists(path)) throw Error("cli", "missing_input", path + " does not exist. " + kFetchHelp);

  const std::string schema_key = s.cfg.get("data.schema");
  std::string dataset;
  std::optional<FeatureSchema> schema;
  if (schema_key == "auto") {
    dataset = detect_dataset(read_header(path));
  } else if (schema_key == "telecom" || schema_key == "fraud") {
    dataset = schema_key;
  } else if (schema_key != "infer") {
    schema = read_json(schema_key).get<FeatureSchema>();
  }
  if (dataset == "telecom") schema = telecom_churn_schema();
  if (dataset == "fraud") schema = card_fraud_schema();

  LoadedTable loaded = load_table(path, schema, s.cfg.get("data.label"));
  const std::size_t rows = loaded.table.rows();
  s.log << "loaded " << rows << " rows from " << path << (dataset.empty() ? "" : " (" + dataset + " schema)") << '\n';

  json table1 = nullptr;
  if (!dataset.empty()) {
    const std::size_t want_rows = dataset == "telecom" ? 7043 : 284807;
    const std::size_t want_cols = dataset == "telecom" ? 28 : 30;
    const bool ok = rows == want_rows && loaded.schema.n_encoded() == want_cols;
    table1 = {{"expected_rows", want_rows}, {"expected_encoded", want_cols}, {"matches", ok}};
    if (!ok) {
      s.log << "warning: expected " << want_rows << " rows and " << want_cols << " encoded features, found " << rows
            << " and " << loaded.schema.n_encoded() << '\n';
    }
  }

  const SplitPlan split = stratified_split(loaded.table.labels, s.cfg.get_double("data.ratio"),
                                           s.cfg.get_int("data.folds"), s.cfg.get_u64("data.seed"));
  const EncoderState encoder =
      fit_encoder(loaded.table, loaded.schema, split.train_indices, s.cfg.get_bool("data.record_norm"));
  Warnings warnings = loaded.warnings;
  warnings.insert(warnings.end(), encoder.warnings.begin(), encoder.warnings.end());
  const EncodedMatrix encoded = encode(loaded.table, encoder, &warnings);

  write_text(s.dir / "encoded.csv", encoded_csv(encoded, comment(s)));
  json enc = encoder;
  enc.update(stamp(s));
  write_json(s.dir / "encoder.json", enc);
  json sp = split;
  sp.update(stamp(s));
  write_json(s.dir / "split.json", sp);
  json sc = loaded.schema;
  sc.update(stamp(s));
  write_json(s.dir / "schema.json", sc);

  json summary = stamp(s);
  summary["source"] = fs::path(path).filename().string();
  summary["dataset"] = dataset.empty() ? json(nullptr) : json(dataset);
  summary["rows"] = rows;
  summary["n_encoded"] = encoded.cols();
  summary["positives"] = encoded.count(1);
  summary["negatives"] = encoded.count(0);
  summary["train_rows"] = split.train_indices.size();
  summary["test_rows"] = split.test_indices.size();
  summary["table1_check"] = table1;
  summary["encoder_fingerprint"] = encoder.fingerprint();
  summary["encoded_fingerprint"] = encoded.fingerprint();
  summary["warnings"] = warnings;
  write_json(s.dir / "prep.json", summary);
  for (const auto& w : warnings) s.log << "warning: " << w << '\n';
  s.log << "encoded " << encoded.cols() << " features; train " << split.train_indices.size() << ", test "
        << split.test_indices.size() << '\n';
}

// --- train / eval -------------------------------------------------------------

void train_stage(Stage& s) {
  const Prepared p = load_prepared(s);
  EncodedMatrix train_set = p.data.select_rows(p.split.train_indices);
  Warnings warnings;
  const std::size_t real_rows = train_set.rows();
  if (s.cfg.get_bool("smote.enabled")) {
    train_set = smote(train_set, {s.cfg.get_int("smote.k"), s.cfg.get_u64("smote.seed")}, &warnings);
  }
  for (const auto& w : warnings) s.log << "warning: " << w << '\n';
  const NetworkSpec spec =
      parse_spec(s.cfg.get("model.spec"), static_cast<int>(p.data.cols()), spec_options(s.cfg));
  const TrainConfig tc = train_config(s.cfg);
  s.log << "training " << spec.text << " on " << train_set.rows() << " rows (" << train_set.rows() - real_rows
        << " synthetic) for " << tc.max_iterations << " iterations\n";
  const TrainResult result = train(train_set, spec, tc);

  Checkpoint ck{result.params, p.encoder, tc, stamp(s)};
  ck.metadata["train_rows"] = real_rows;
  ck.metadata["synthetic_rows"] = train_set.rows() - real_rows;
  save_checkpoint(s.dir / "model.json", ck);

  std::string history = "# " + comment(s) + "\niteration,loss,batch_accuracy\n";
  for (const auto& h : result.history) {
    history += std::to_string(h.iteration) + ',' + csv::format_number(h.loss) + ',' +
               csv::format_number(h.batch_accuracy) + '\n';
  }
  write_text(s.dir / "history.csv", history);
  if (!result.history.empty()) s.log << "final batch loss " << result.history.back().loss << '\n';
}

void eval_stage(Stage& s) {
  const Prepared p = load_prepared(s);
  const Checkpoint ck = load_model(s, p);
  const EncodedMatrix test = p.data.select_rows(p.split.test_indices);
  const auto predictions = predict_batch(ck.params, test.values);
  const auto labels = predicted_labels(predictions);
  const std::string fingerprint = test_rows_fingerprint(p.data, p.split.test_indices);
  const MetricsReport heldout = summarize({compute_metrics(labels, test.labels)}, fingerprint);

  std::string pred_csv = "# " + comment(s) + "\nrecord,label,predicted,probability\n";
  for (std::size_t i = 0; i < test.rows(); ++i) {
    pred_csv += std::to_string(p.split.test_indices[i]) + ',' + std::to_string(test.labels[i]) + ',' +
                std::to_string(labels[i]) + ',' + csv::format_number(predictions[i].probability) + '\n';
  }
  write_text(s.dir / "predictions.csv", pred_csv);

  json out = stamp(s);
  out["spec"] = ck.params.spec.text;
  out["heldout"] = to_json(heldout);
  std::vector<std::pair<std::string, MetricsReport>> rows{{ck.params.spec.text + " held-out", heldout}};
  if (s.cfg.get_bool("eval.cross_validate")) {
    const CvOptions options = cv_options(s.cfg);
    s.log << "cross-validating " << p.split.k << " folds (" << to_string(options.protocol) << ")\n";
    const MetricsReport cv = cross_validate(p.data, ck.params.spec, train_config(s.cfg), p.split, options);
    out["cross_validation"] = to_json(cv);
    out["cv_protocol"] = to_string(options.protocol);
    rows.emplace_back(ck.params.spec.text + " " + std::to_string(p.split.k) + "-fold", cv);
  }
  write_json(s.dir / "metrics.json", out);
  write_text(s.dir / "metrics.md", "<!-- " + comment(s) + " -->\n" + metrics_markdown(rows));
  s.log << "held-out accuracy " << heldout.mean.accuracy << ", F1 " << heldout.mean.f1 << '\n';
}

// --- explain / rank / compare -------------------------------------------------

struct ExplainedRecord {
  std::size_t record = 0;
  OutcomeGroup group = OutcomeGroup::tp;
  Eigen::VectorXd scores;
};

void explain_stage(Stage& s) {
  const Prepared p = load_prepared(s);
  const Checkpoint ck = load_model(s, p);
  const EncodedMatrix test = p.data.select_rows(p.split.test_indices);
  const auto labels = predicted_labels(predict_batch(ck.params, test.values));
  const Outcomes outcomes = partition_outcomes(labels, test.labels);
  const int cap = s.cfg.get_int("explain.max_records");

  std::vector<std::pair<std::size_t, OutcomeGroup>> chosen;  // positions in the test split
  for (OutcomeGroup g : {OutcomeGroup::tp, OutcomeGroup::tn}) {
    const auto& members = outcomes.group(g);
    const std::size_t take = cap > 0 ? std::min<std::size_t>(members.size(), static_cast<std::size_t>(cap)) : members.size();
    for (std::size_t i = 0; i < take; ++i) chosen.emplace_back(members[i], g);
    s.log << to_string(g) << ": " << members.size() << " records, explaining " << take << '\n';
  }

  const Parameters& params = ck.params;
  const PredictFn predict = [&params](const RowMatrix& rows) { return class1_probabilities(params, rows); };
  const LrpConfig lrp = lrp_config(s.cfg);
  const LimeConfig lime = lime_config(s.cfg);
  const ShapConfig shap = shap_config(s.cfg, feature_means(p.data.select_rows(p.split.train_indices).values));
  const std::size_t n = p.data.cols();
  HeatmapStyle style;
  style.tau = s.cfg.get_double("rank.tau");

  for (const auto& method : methods(s.cfg)) {
    std::vector<ExplainedRecord> explained;
    for (const auto& [pos, group] : chosen) {
      const std::size_t record = p.split.test_indices[pos];
      const Eigen::VectorXd x = test.values.row(static_cast<Eigen::Index>(pos)).transpose();
      const std::span<const double> view(x.data(), n);
      ExplainedRecord e{record, group, {}};
      if (method == "lrp") {
        e.scores = propagate_relevance(params, forward(params, view).trace, lrp).relevance;
      } else if (method == "lime") {
        LimeConfig c = lime;
        c.seed = mix_seed(lime.seed, record);
        e.scores = lime_explain(predict, view, c).scores;
      } else {
        ShapConfig c = shap;
        c.seed = mix_seed(shap.seed, record);
        e.scores = shap_explain(predict, view, c).scores;
      }
      explained.push_back(std::move(e));
    }

    std::string table = "# " + comment(s) + "\nrecord,group";
    for (const auto& name : p.data.feature_names) table += ',' + csv::quote(name);
    table += '\n';
    json records = json::array();
    for (const auto& e : explained) {
      table += std::to_string(e.record) + ',' + to_string(e.group);
      for (Eigen::Index f = 0; f < e.scores.size(); ++f) table += ',' + csv::format_number(e.scores(f));
      table += '\n';
      records.push_back({{"record", e.record},
                         {"group", to_string(e.group)},
                         {"scores", std::vector<double>(e.scores.data(), e.scores.data() + e.scores.size())}});
    }
    write_text(s.dir / ("attributions_" + method + ".csv"), table);
    json doc = stamp(s);
    doc["method"] = method;
    doc["settings"] = method == "lrp" ? lrp.describe() : method == "lime" ? lime.describe(n) : shap.describe(n);
    doc["feature_names"] = p.data.feature_names;
    doc["records"] = records;
    write_json(s.dir / ("attributions_" + method + ".json"), doc);

    for (OutcomeGroup g : {OutcomeGroup::tp, OutcomeGroup::tn}) {
      std::vector<Eigen::VectorXd> rows;
      std::vector<std::size_t> ids;
      for (const auto& e : explained) {
        if (e.group != g) continue;
        rows.push_back(e.scores);
        ids.push_back(e.record);
      }
      const std::string tag = method + "_" + (g == OutcomeGroup::tp ? "tp" : "tn");
      if (rows.empty()) {
        s.log << "warning: no " << to_string(g) << " records; skipping " << tag << " heatmaps\n";
        continue;
      }
      HeatmapMatrix local;
      local.rows = normalize_heatmap(rows.front()).transpose();
      local.feature_names = p.data.feature_names;
      local.record_ids = {ids.front()};
      local.title = method + " local " + to_string(g) + " record " + std::to_string(ids.front());
      render_heatmap(local, s.dir / ("heatmap_" + tag + "_local.svg"), style);
      HeatmapMatrix global = aggregate_global(rows, g, p.data.feature_names, ids);
      global.title = method + " global " + to_string(g) + " (" + std::to_string(rows.size()) + " records)";
      render_heatmap(global, s.dir / ("heatmap_" + tag + "_global.svg"), style);
    }
    s.log << "explained " << explained.size() << " records with " << method << '\n';
  }
}

struct MethodTables {
  std::string method;
  GroupRanking tp, tn;
};

std::vector<MethodTables> rank_all(const Stage& s, const RankingConfig& rc) {
  std::vector<MethodTables> out;
  for (const auto& method : methods(s.cfg)) {
    const csv::Document doc = csv::read(require(s, "attributions_" + method + ".csv", "explain"));
    if (doc.header.size() < 3) throw Error("cli", "artifact_corrupt", "attributions_" + method + ".csv has no features");
    const std::vector<std::string> names(doc.header.begin() + 2, doc.header.end());
    std::vector<Eigen::VectorXd> tp_rows, tn_rows;
    for (const auto& row : doc.rows) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
      for (std::size_t f = 0; f < names.size(); ++f) v(static_cast<Eigen::Index>(f)) = std::strtod(row[f + 2].c_str(), nullptr);
      (row[1] == "TP" ? tp_rows : tn_rows).push_back(normalize_heatmap(v));
    }
    auto stack = [&](const std::vector<Eigen::VectorXd>& rows) {
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      return m;
    };
    out.push_back({method, rank_features(stack(tp_rows), OutcomeGroup::tp, rc, names, method),
                   rank_features(stack(tn_rows), OutcomeGroup::tn, rc, names, method)});
  }
  return out;
}

json ranking_json(const GroupRanking& g) {
  std::vector<std::string> ordered;
  for (auto f : g.table.order) ordered.push_back(g.table.feature_names[f]);
  return {{"records", g.aggregate.records}, {"counts", g.aggregate.counts}, {"rank", g.table.rank}, {"order", ordered}};
}

void rank_stage(Stage& s) {
  const RankingConfig rc = ranking_config(s.cfg);
  const auto tables = rank_all(s, rc);
  std::vector<RankTable> tp, tn;
  json doc = stamp(s);
  doc["tau"] = rc.tau;
  for (const auto& t : tables) {
    tp.push_back(t.tp.table);
    tn.push_back(t.tn.table);
    doc["methods"][t.method] = {{"TP", ranking_json(t.tp)}, {"TN", ranking_json(t.tn)}};
  }
  write_json(s.dir / "rank.json", doc);
  write_text(s.dir / "rank_tables_tp.csv", "# " + comment(s) + "\n" + rank_tables_csv(tp));
  write_text(s.dir / "rank_tables_tn.csv", "# " + comment(s) + "\n" + rank_tables_csv(tn));

  const auto lead = std::find_if(tables.begin(), tables.end(), [](const auto& t) { return t.method == "lrp"; });
  const MethodTables& source = lead != tables.end() ? *lead : tables.front();
  json subset = to_json(select_subset(source.tp.table, source.tn.table, rc));
  subset.update(stamp(s));
  subset["source_method"] = source.method;
  subset["tau"] = rc.tau;
  write_json(s.dir / "subset.json", subset);
  s.log << "selected " << subset["features"].size() << " features from " << source.method << " rankings\n";

  json sweep = stamp(s);
  sweep["source_method"] = source.method;
  sweep["sweep"] = json::array();
  for (double tau : {0.3, 0.5, 0.7}) {
    RankingConfig c = rc;
    c.tau = tau;
    const auto swept = rank_all(s, c);
    const auto it = std::find_if(swept.begin(), swept.end(), [&](const auto& t) { return t.method == source.method; });
    const SubsetSelection sel = select_subset(it->tp.table, it->tn.table, c);
    sweep["sweep"].push_back({{"tau", tau}, {"features", sel.features}, {"names", sel.names}});
  }
  write_json(s.dir / "tau_sweep.json", sweep);
}

void compare_stage(Stage& s) {
  const RankingConfig rc = ranking_config(s.cfg);
  auto tables = rank_all(s, rc);
  std::stable_partition(tables.begin(), tables.end(), [](const auto& t) { return t.method == "lrp"; });
  std::vector<RankTable> tp, tn;
  for (const auto& t : tables) {
    tp.push_back(t.tp.table);
    tn.push_back(t.tn.table);
  }
  write_text(s.dir / "comparison.csv", "# " + comment(s) + "\n" + rank_tables_csv(tp));
  const auto top_k = static_cast<std::size_t>(s.cfg.get_int("rank.top_k"));
  const auto& names = tp.front().feature_names;
  json doc = stamp(s);
  doc["TP"] = to_json(compare_rankings(tp, top_k), names);
  doc["TN"] = to_json(compare_rankings(tn, top_k), names);
  write_json(s.dir / "overlap.json", doc);
  s.log << "TP top-" << top_k << " overlap across all methods: " << doc["TP"]["all_methods_overlap"] << '\n';
}

// --- reduce / bench / report --------------------------------------------------

void reduce_stage(Stage& s) {
  const Prepared p = load_prepared(s);
  const SubsetSelection subset = subset_from_json(read_json(require(s, "subset.json", "rank")));
  const auto specs = s.cfg.get_list("reduce.specs");
  s.log << "reduced-feature study: " << specs.size() << " spec(s), " << subset.features.size() << " features\n";
  const ReducedFeatureStudy study = reduced_feature_study(p.data, subset, specs, s.cfg.get_bool("reduce.baseline"),
                                                          train_config(s.cfg), p.split, spec_options(s.cfg),
                                                          cv_options(s.cfg));
  json doc = to_json(study);
  doc.update(stamp(s));
  write_json(s.dir / "study.json", doc);
  write_text(s.dir / "study.md", "<!-- " + comment(s) + " -->\n" + study_markdown(study));
}

void bench_stage(Stage& s) {
  const Prepared p = load_prepared(s);
  const Checkpoint ck = load_model(s, p);
  const auto want = static_cast<std::size_t>(s.cfg.get_int("bench.records"));
  std::vector<std::size_t> rows(p.split.test_indices.begin(),
                                p.split.test_indices.begin() +
                                    static_cast<std::ptrdiff_t>(std::min(want, p.split.test_indices.size())));
  BenchmarkSettings settings;
  settings.lrp = lrp_config(s.cfg);
  settings.lime = lime_config(s.cfg);
  settings.shap = shap_config(s.cfg, feature_means(p.data.select_rows(p.split.train_indices).values));
  settings.repetitions = s.cfg.get_int("bench.repetitions");
  const TimingReport report = benchmark_latency(ck.params, p.data.select_rows(rows).values, settings);
  json doc = to_json(report);
  doc.update(stamp(s));
  write_json(s.dir / "timing.json", doc);
  for (const auto& m : report.methods) s.log << m.method << " median " << m.median << " s\n";
}

void report_stage(Stage& s) {
  const json prep_summary = read_json(require(s, "prep.json", "prep"));
  std::ostringstream md;
  md << "# Run report\n\n";
  md << "- config hash: `" << s.hash << "`\n- seeds: `" << s.seeds << "`\n\n";
  md << "## Data\n\n";
  md << "- source: " << prep_summary.value("source", std::string{"?"}) << "\n";
  md << "- rows: " << prep_summary["rows"] << ", encoded features: " << prep_summary["n_encoded"] << "\n";
  md << "- positives / negatives: " << prep_summary["positives"] << " / " << prep_summary["negatives"] << "\n";
  md << "- train / test: " << prep_summary["train_rows"] << " / " << prep_summary["test_rows"] << "\n\n";

  auto section = [&](const std::string& title, const std::string& file, const std::string& producer) {
    md << "## " << title << "\n\n";
    if (fs::exists(s.dir / file)) {
      std::string text = read_text(s.dir / file);
      if (text.rfind("<!--", 0) == 0) text.erase(0, text.find('\n') + 1);
      md << text << "\n";
    } else {
      md << "_not available; run '" << producer << "'_\n\n";
    }
  };
  section("Metrics", "metrics.md", "eval");
  section("Reduced-feature study", "study.md", "reduce");

  md << "## Ranking comparison\n\n";
  if (fs::exists(s.dir / "overlap.json")) {
    const json overlap = read_json(s.dir / "overlap.json");
    for (const char* g : {"TP", "TN"}) {
      md << "- " << g << " top-" << overlap[g]["top_k"] << " common to all methods (" << overlap[g]["all_methods_overlap"]
         << "):";
      for (const auto& name : overlap[g]["common_features"]) md << ' ' << name.get<std::string>();
      md << "\n";
    }
    md << "\n";
  } else {
    md << "_not available; run 'compare'_\n\n";
  }

  md << "## Explainer latency\n\n";
  if (fs::exists(s.dir / "timing.json")) {
    const json timing = read_json(s.dir / "timing.json");
    md << "| Method | median s | p90 s | mean s | settings |\n|---|---|---|---|---|\n";
    for (const auto& m : timing["methods"]) {
      md << "| " << m["method"].get<std::string>() << " | " << m["median_seconds"] << " | " << m["p90_seconds"]
         << " | " << m["mean_seconds"] << " | " << m["settings"].get<std::string>() << " |\n";
    }
    md << "\nLRP:LIME median ratio " << timing["lrp_to_lime_median_ratio"] << ", LRP:SHAP "
       << timing["lrp_to_shap_median_ratio"] << "\n\n";
  } else {
    md << "_not available; run 'bench'_\n\n";
  }

  md << "## Heatmaps\n\n";
  std::vector<std::string> svgs;
  for (const auto& entry : fs::directory_iterator(s.dir)) {
    if (entry.path().extension() == ".svg") svgs.push_back(entry.path().filename().string());
  }
  std::sort(svgs.begin(), svgs.end());
  if (svgs.empty()) md << "_not available; run 'explain'_\n";
  for (const auto& f : svgs) md << "- [" << f << "](" << f << ")\n";
  write_text(s.dir / "report.md", md.str());
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> list = {"prep", "train", "eval", "explain", "rank",
                                                "reduce", "compare", "bench", "report"};
  return list;
}

std::string detect_dataset(const std::vector<std::string>& header) {
  auto has = [&](const char* name) { return std::find(header.begin(), header.end(), name) != header.end(); };
  if (has("customerID") && has("Churn") && has("Contract")) return "telecom";
  if (has("Class") && has("Amount") && has("V1") && has("V28")) return "fraud";
  return "";
}

std::string encoded_csv(const EncodedMatrix& m, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  for (const auto& name : m.feature_names) out += csv::quote(name) + ',';
  out += "label\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out += csv::format_number(m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      out += ',';
    }
    out += std::to_string(m.labels[r]) + '\n';
  }
  return out;
}

EncodedMatrix read_encoded_csv(const fs::path& path) {
  const csv::Document doc = csv::read(path);
  if (doc.header.empty() || doc.header.back() != "label") {
    throw Error("cli", "artifact_corrupt", path.string() + ": last column must be 'label'");
  }
  EncodedMatrix m;
  const std::size_t cols = doc.header.size() - 1;
  m.feature_names.assign(doc.header.begin(), doc.header.end() - 1);
  m.values.resize(static_cast<Eigen::Index>(doc.rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    for (std::size_t c = 0; c <= cols; ++c) {
      const std::string& cell = doc.rows[r][c];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw Error("cli", "artifact_corrupt",
                    path.string() + ": bad number '" + cell + "' at row " + std::to_string(r + 1));
      }
      if (c < cols) m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      else m.labels.push_back(static_cast<int>(v));
    }
  }
  m.provenance.assign(doc.rows.size(), Provenance::real);
  return m;
}

void run(const std::string& subcommand, const RunConfig& config, std::ostream& log) {
  const auto& known = subcommands();
  if (std::find(known.begin(), known.end(), subcommand) == known.end()) {
    throw Error("cli", "unknown_subcommand", "unknown subcommand '" + subcommand + "'");
  }
  Stage s{config, fs::path(config.get("out.dir")), log, config.hash(), seeds_text(config)};
  std::error_code ec;
  fs::create_directories(s.dir, ec);
  if (ec) throw Error("cli", "write_error", "cannot create " + s.dir.string() + ": " + ec.message());
  write_text(s.dir / (subcommand + ".config.txt"), "# config_hash=" + s.hash + "\n" + config.resolved_text());

  if (subcommand == "prep") prep(s);
  else if (subcommand == "train") train_stage(s);
  else if (subcommand == "eval") eval_stage(s);
  else if (subcommand == "explain") explain_stage(s);
  else if (subcommand == "rank") rank_stage(s);
  else if (subcommand == "compare") compare_stage(s);
  else if (subcommand == "reduce") reduce_stage(s);
  else if (subcommand == "bench") bench_stage(s);
  else report_stage(s);
}

}  // namespace tabxai
