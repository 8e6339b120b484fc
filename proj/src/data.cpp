#include "tabxai/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <set>

#include "tabxai/csv.hpp"
#include "tabxai/error.hpp"
#include "tabxai/hash.hpp"

namespace tabxai {

namespace {

constexpr std::size_t kMaxCategoricalValues = 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::string canonical(const ColumnSpec& col, const std::string& raw) {
  const auto it = col.aliases.find(raw);
  return it == col.aliases.end() ? raw : it->second;
}

std::string where(const std::string& source, std::size_t row, const std::string& column) {
  // row is 0-based over data rows; line numbers count the header as line 1
  return source + ": row " + std::to_string(row + 1) + " (line " + std::to_string(row + 2) + "), column '" +
         column + "'";
}

ColumnSpec infer_column(const std::string& name, const std::vector<std::string>& cells, Warnings& warnings) {
  ColumnSpec col;
  col.name = name;
  if (cells.empty()) return col;  // unknown

  bool all_numeric = true;
  bool any_value = false;
  std::set<double> numbers;
  std::set<std::string> distinct;
  for (const auto& cell : cells) {
    if (is_blank(cell)) continue;
    any_value = true;
    if (all_numeric) {
      if (auto v = parse_number(cell)) numbers.insert(*v);
      else all_numeric = false;
    }
    distinct.insert(cell);
  }
  if (!any_value) return col;
  if (all_numeric) {
    const bool binary = std::all_of(numbers.begin(), numbers.end(), [](double v) { return v == 0.0 || v == 1.0; });
    col.kind = binary ? ColumnKind::binary : ColumnKind::continuous;
    return col;
  }
  if (distinct.size() <= kMaxCategoricalValues) {
    col.kind = ColumnKind::categorical;
    col.values.assign(distinct.begin(), distinct.end());
    if (col.values.size() == 2) {
      col.positive_value =
          std::find(col.values.begin(), col.values.end(), "Yes") != col.values.end() ? "Yes" : col.values[1];
    }
    return col;
  }
  col.kind = ColumnKind::ignored;
  warnings.push_back("column '" + name + "' has " + std::to_string(distinct.size()) +
                     " distinct non-numeric values; ignored");
  return col;
}

int parse_label(const std::string& raw, const std::string& positive, const std::string& at) {
  if (!positive.empty()) return raw == positive ? 1 : 0;
  const auto t = trim(raw);
  if (t == "1") return 1;
  if (t == "0") return 0;
  throw Error("data", "label_values", at + ": label value '" + raw + "' is not 0/1 and no positive label is set");
}

std::string infer_positive_label(const std::vector<std::string>& cells) {
  std::set<std::string> distinct(cells.begin(), cells.end());
  const bool zero_one = std::all_of(distinct.begin(), distinct.end(), [](const std::string& v) {
    const auto t = trim(v);
    return t == "0" || t == "1";
  });
  if (zero_one) return "";
  if (distinct.size() != 2) {
    throw Error("data", "label_values",
                "label column must have exactly two classes, found " + std::to_string(distinct.size()));
  }
  for (const char* candidate : {"Yes", "yes", "True", "true", "1"}) {
    if (distinct.count(candidate)) return candidate;
  }
  throw Error("data", "label_values", "cannot decide which label value is positive; set positive_label");
}

}  // namespace

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::binary: return "binary";
    case ColumnKind::ignored: return "ignored";
    case ColumnKind::unknown: break;
  }
  return "unknown";
}

ColumnKind column_kind_from_string(const std::string& text) {
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "continuous" || text == "numeric") return ColumnKind::continuous;
  if (text == "binary") return ColumnKind::binary;
  if (text == "ignored") return ColumnKind::ignored;
  if (text == "unknown") return ColumnKind::unknown;
  throw Error("data", "schema_error", "unknown column kind '" + text + "'");
}

std::size_t ColumnSpec::width() const {
  switch (kind) {
    case ColumnKind::categorical: return values.size() == 2 ? 1 : values.size();
    case ColumnKind::continuous:
    case ColumnKind::binary: return 1;
    default: return 0;
  }
}

std::size_t FeatureSchema::n_encoded() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.width();
  return n;
}

std::vector<std::string> FeatureSchema::encoded_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns) {
    if (!c.output_names.empty()) {
      names.insert(names.end(), c.output_names.begin(), c.output_names.end());
    } else if (c.kind == ColumnKind::categorical && c.values.size() > 2) {
      for (const auto& v : c.values) names.push_back(c.name + "_" + v);
    } else if (c.width() == 1) {
      names.push_back(c.name);
    }
  }
  return names;
}

void FeatureSchema::validate() const {
  if (label_column.empty()) throw Error("data", "schema_error", "schema has no label column");
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::unknown) {
      throw Error("data", "schema_error", "column '" + c.name + "' has unknown kind (no data to infer from)");
    }
    if (c.kind == ColumnKind::categorical) {
      if (c.values.size() < 2) {
        throw Error("data", "schema_error", "categorical column '" + c.name + "' needs at least 2 values");
      }
      if (c.values.size() == 2 &&
          std::find(c.values.begin(), c.values.end(), c.positive_value) == c.values.end()) {
        throw Error("data", "schema_error", "binary categorical '" + c.name + "' lacks a valid positive_value");
      }
    }
    if (!c.output_names.empty() && c.output_names.size() != c.width()) {
      throw Error("data", "schema_error", "column '" + c.name + "' output_names size does not match its width");
    }
  }
  if (n_encoded() == 0) throw Error("data", "schema_error", "schema encodes to zero features");
}

LoadedTable load_table_from_text(const std::string& csv_text, const std::optional<FeatureSchema>& schema,
                                 const std::string& label_column, const std::string& source) {
  const csv::Document doc = csv::parse(csv_text, source);
  LoadedTable out;

  std::string label = label_column;
  if (label.empty() && schema) label = schema->label_column;
  if (label.empty()) {
    if (doc.header.empty()) throw Error("data", "missing_header", source + ": empty header");
    label = doc.header.back();
  }
  const auto label_it = std::find(doc.header.begin(), doc.header.end(), label);
  if (label_it == doc.header.end()) {
    throw Error("data", "unknown_label_column", source + ": label column '" + label + "' not in header");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - doc.header.begin());

  auto column_cells = [&](std::size_t idx) {
    std::vector<std::string> cells;
    cells.reserve(doc.rows.size());
    for (const auto& r : doc.rows) cells.push_back(r[idx]);
    return cells;
  };

  std::vector<std::size_t> source_idx;
  if (schema) {
    out.schema = *schema;
    out.schema.label_column = label;
    for (const auto& c : out.schema.columns) {
      const auto it = std::find(doc.header.begin(), doc.header.end(), c.name);
      if (it == doc.header.end()) {
        throw Error("data", "schema_error", source + ": schema column '" + c.name + "' not in header");
      }
      source_idx.push_back(static_cast<std::size_t>(it - doc.header.begin()));
    }
    for (std::size_t h = 0; h < doc.header.size(); ++h) {
      if (h == label_idx) continue;
      if (std::find(source_idx.begin(), source_idx.end(), h) == source_idx.end()) {
        out.warnings.push_back("column '" + doc.header[h] + "' not in schema; ignored");
      }
    }
  } else {
    out.schema.label_column = label;
    for (std::size_t h = 0; h < doc.header.size(); ++h) {
      if (h == label_idx) continue;
      out.schema.columns.push_back(infer_column(doc.header[h], column_cells(h), out.warnings));
      source_idx.push_back(h);
    }
  }

  const auto label_cells = column_cells(label_idx);
  if (out.schema.positive_label.empty() && !label_cells.empty()) {
    out.schema.positive_label = infer_positive_label(label_cells);
  }
  out.schema.validate();

  out.table.columns.resize(out.schema.columns.size());
  out.table.labels.reserve(doc.rows.size());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    out.table.labels.push_back(parse_label(label_cells[r], out.schema.positive_label, where(source, r, label)));
  }
  for (std::size_t c = 0; c < out.schema.columns.size(); ++c) {
    const ColumnSpec& spec = out.schema.columns[c];
    auto& dest = out.table.columns[c];
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
      const std::string cell = canonical(spec, doc.rows[r][source_idx[c]]);
      switch (spec.kind) {
        case ColumnKind::continuous:
        case ColumnKind::binary: {
          if (is_blank(cell) && spec.blank_value) {
            dest.numbers.push_back(*spec.blank_value);
            break;
          }
          const auto v = parse_number(cell);
          if (!v) throw Error("data", "bad_number", where(source, r, spec.name) + ": cannot parse '" + cell + "'");
          dest.numbers.push_back(*v);
          break;
        }
        case ColumnKind::categorical: dest.text.push_back(cell); break;
        default: break;
      }
    }
  }
  return out;
}

LoadedTable load_table(const std::filesystem::path& path, const std::optional<FeatureSchema>& schema,
                       const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("data", "io", "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_table_from_text(text, schema, label_column, path.string());
}

namespace {

ColumnSpec yes_no(const std::string& name, bool internet_alias = false) {
  ColumnSpec c;
  c.name = name;
  c.kind = ColumnKind::categorical;
  c.values = {"No", "Yes"};
  c.positive_value = "Yes";
  if (internet_alias) c.aliases = {{"No internet service", "No"}};
  return c;
}

ColumnSpec multi(const std::string& name, std::vector<std::string> values, std::vector<std::string> names) {
  ColumnSpec c;
  c.name = name;
  c.kind = ColumnKind::categorical;
  c.values = std::move(values);
  c.output_names = std::move(names);
  return c;
}

ColumnSpec numeric(const std::string& name, ColumnKind kind, std::string output = "") {
  ColumnSpec c;
  c.name = name;
  c.kind = kind;
  if (!output.empty()) c.output_names = {std::move(output)};
  return c;
}

}  // namespace

FeatureSchema telecom_churn_schema() {
  FeatureSchema s;
  s.label_column = "Churn";
  s.positive_label = "Yes";
  ColumnSpec id;
  id.name = "customerID";
  id.kind = ColumnKind::ignored;
  s.columns.push_back(id);

  ColumnSpec gender;
  gender.name = "gender";
  gender.kind = ColumnKind::categorical;
  gender.values = {"Female", "Male"};
  gender.positive_value = "Male";
  gender.output_names = {"Gender"};
  s.columns.push_back(gender);

  s.columns.push_back(numeric("SeniorCitizen", ColumnKind::binary));
  s.columns.push_back(yes_no("Partner"));
  s.columns.push_back(yes_no("Dependents"));
  s.columns.push_back(numeric("tenure", ColumnKind::continuous, "Tenure"));
  s.columns.push_back(yes_no("PhoneService"));
  s.columns.push_back(multi("MultipleLines", {"No", "No phone service", "Yes"}, {"ML_No", "ML_No_PhService", "ML_Yes"}));
  s.columns.push_back(multi("InternetService", {"DSL", "Fiber optic", "No"}, {"IS_DSL", "IS_Fiber_Optic", "IS_No"}));
  for (const char* name : {"OnlineSecurity", "OnlineBackup", "DeviceProtection", "TechSupport", "StreamingTV",
                           "StreamingMovies"}) {
    s.columns.push_back(yes_no(name, true));
  }
  s.columns.push_back(multi("Contract", {"Month-to-month", "One year", "Two year"},
                            {"Contract_M_to_M", "Contract_1yr", "Contract_2yr"}));
  s.columns.push_back(yes_no("PaperlessBilling"));
  s.columns.push_back(multi("PaymentMethod",
                            {"Bank transfer (automatic)", "Credit card (automatic)", "Electronic check", "Mailed check"},
                            {"PM_Bank_TX_Auto", "PM_CCard_Auto", "PM_Elec_Check", "PM_Mail_Check"}));
  s.columns.push_back(numeric("MonthlyCharges", ColumnKind::continuous));
  auto total = numeric("TotalCharges", ColumnKind::continuous);
  // 11 customers with zero tenure have a blank total
  total.blank_value = 0.0;
  s.columns.push_back(total);
  return s;
}

FeatureSchema card_fraud_schema() {
  FeatureSchema s;
  s.label_column = "Class";
  s.positive_label = "1";
  s.columns.push_back(numeric("Time", ColumnKind::continuous));
  for (int i = 1; i <= 28; ++i) s.columns.push_back(numeric("V" + std::to_string(i), ColumnKind::continuous));
  s.columns.push_back(numeric("Amount", ColumnKind::continuous));
  return s;
}

EncoderState fit_encoder(const RawTable& table, const FeatureSchema& schema,
                         std::span<const std::size_t> train_indices, bool record_norm) {
  if (train_indices.empty()) throw Error("data", "encoder_error", "fit_encoder needs at least one training row");
  EncoderState state;
  state.schema = schema;
  state.record_norm = record_norm;
  state.numeric.resize(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const ColumnSpec& col = schema.columns[c];
    if (col.kind != ColumnKind::continuous) continue;
    const auto& values = table.columns[c].numbers;
    double sum = 0.0;
    double lo = values.at(train_indices.front());
    double hi = lo;
    for (auto i : train_indices) {
      sum += values[i];
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    NumericStats st;
    st.mean = sum / static_cast<double>(train_indices.size());
    double sq = 0.0;
    for (auto i : train_indices) sq += (values[i] - st.mean) * (values[i] - st.mean);
    st.sd = std::sqrt(sq / static_cast<double>(train_indices.size()));
    if (st.sd > 0.0 && hi > lo) {
      st.z_min = (lo - st.mean) / st.sd;
      st.z_max = (hi - st.mean) / st.sd;
    } else {
      st.sd = 0.0;
      state.warnings.push_back("column '" + col.name + "' has zero variance on training rows; encoded as 0.5");
    }
    state.numeric[c] = st;
  }
  return state;
}

EncodedMatrix encode(const RawTable& table, const EncoderState& state, Warnings* warnings) {
  const FeatureSchema& schema = state.schema;
  const std::size_t n = schema.n_encoded();
  const std::size_t rows = table.rows();
  EncodedMatrix out;
  out.values = RowMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  out.labels = table.labels;
  out.provenance.assign(rows, Provenance::real);
  out.feature_names = schema.encoded_names();

  std::size_t offset = 0;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const ColumnSpec& col = schema.columns[c];
    const auto& src = table.columns[c];
    const auto o = static_cast<Eigen::Index>(offset);
    std::size_t unseen = 0;
    switch (col.kind) {
      case ColumnKind::continuous: {
        const NumericStats& st = state.numeric[c];
        for (std::size_t r = 0; r < rows; ++r) {
          double v = 0.5;
          if (st.sd > 0.0) {
            const double z = (src.numbers[r] - st.mean) / st.sd;
            v = std::clamp((z - st.z_min) / (st.z_max - st.z_min), 0.0, 1.0);
          }
          out.values(static_cast<Eigen::Index>(r), o) = v;
        }
        break;
      }
      case ColumnKind::binary:
        for (std::size_t r = 0; r < rows; ++r) {
          out.values(static_cast<Eigen::Index>(r), o) = std::clamp(src.numbers[r], 0.0, 1.0);
        }
        break;
      case ColumnKind::categorical:
        for (std::size_t r = 0; r < rows; ++r) {
          const std::string& v = src.text[r];
          const auto it = std::find(col.values.begin(), col.values.end(), v);
          if (it == col.values.end()) {
            ++unseen;
            continue;
          }
          if (col.values.size() == 2) {
            out.values(static_cast<Eigen::Index>(r), o) = v == col.positive_value ? 1.0 : 0.0;
          } else {
            out.values(static_cast<Eigen::Index>(r), o + (it - col.values.begin())) = 1.0;
          }
        }
        break;
      default: break;
    }
    if (unseen > 0 && warnings) {
      warnings->push_back("column '" + col.name + "': " + std::to_string(unseen) +
                          " row(s) with unseen categorical values encoded as all-zero");
    }
    offset += col.width();
  }

  if (state.record_norm) {
    for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
      const double m = out.values.row(r).maxCoeff();
      if (m > 0.0) out.values.row(r) /= m;
    }
  }
  return out;
}

std::string EncoderState::fingerprint() const {
  nlohmann::json j = *this;
  j.erase("warnings");
  return fnv1a_hex(j.dump());
}

std::size_t EncodedMatrix::count(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

EncodedMatrix EncodedMatrix::select_rows(std::span<const std::size_t> rows) const {
  EncodedMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.feature_names = feature_names;
  out.labels.reserve(rows.size());
  out.provenance.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    out.provenance.push_back(provenance[rows[i]]);
  }
  return out;
}

EncodedMatrix EncodedMatrix::select_columns(std::span<const std::size_t> columns) const {
  EncodedMatrix out;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= cols()) throw Error("data", "bad_column", "column index out of range");
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(columns[j]));
    out.feature_names.push_back(feature_names.at(columns[j]));
  }
  out.labels = labels;
  out.provenance = provenance;
  return out;
}

std::string EncodedMatrix::fingerprint() const {
  Fnv1a h;
  h.update(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
  h.update(labels.data(), labels.size() * sizeof(int));
  return h.hex();
}

std::vector<std::size_t> SplitPlan::fold_members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < train_indices.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(train_indices[i]);
  }
  return out;
}

std::vector<std::size_t> SplitPlan::fold_complement(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < train_indices.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(train_indices[i]);
  }
  return out;
}

SplitPlan stratified_split(std::span<const int> labels, double ratio, int k, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("data", "split_error", "ratio must lie in (0, 1)");
  if (k < 2) throw Error("data", "split_error", "k must be at least 2");
  SplitPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.ratio = ratio;

  std::vector<std::pair<std::size_t, int>> train;  // (row, fold)
  std::size_t deal = 0;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      throw Error("data", "split_error",
                  "class " + std::to_string(cls) + " has " + std::to_string(members.size()) + " rows, fewer than k=" +
                      std::to_string(k));
    }
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(cls)));
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(members.size()) * (1.0 - ratio)));
    if (members.size() - n_test < static_cast<std::size_t>(k)) {
      throw Error("data", "split_error", "class " + std::to_string(cls) + " leaves fewer than k training rows");
    }
    plan.test_indices.insert(plan.test_indices.end(), members.begin(), members.begin() + n_test);
    for (std::size_t i = n_test; i < members.size(); ++i) {
      train.emplace_back(members[i], static_cast<int>(deal++ % static_cast<std::size_t>(k)));
    }
  }
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  std::sort(train.begin(), train.end());
  for (const auto& [row, fold] : train) {
    plan.train_indices.push_back(row);
    plan.fold_of.push_back(fold);
  }
  return plan;
}

EncodedMatrix smote(const EncodedMatrix& train, const ResampleConfig& config, Warnings* warnings) {
  if (config.k_neighbors < 1) throw Error("data", "smote_error", "k_neighbors must be at least 1");
  const std::size_t pos = train.count(1);
  const std::size_t neg = train.count(0);
  if (pos == neg) return train;
  const int minority = pos < neg ? 1 : 0;
  const std::size_t needed = std::max(pos, neg) - std::min(pos, neg);

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    if (train.labels[i] == minority) members.push_back(i);
  }
  const std::size_t m = members.size();
  if (m <= 1) throw Error("data", "smote_error", "minority class has fewer than 2 rows");
  std::size_t k = static_cast<std::size_t>(config.k_neighbors);
  if (m <= k) {
    k = m - 1;
    if (warnings) {
      warnings->push_back("SMOTE: minority class has " + std::to_string(m) + " rows; k_neighbors reduced to " +
                          std::to_string(k));
    }
  }

  // k nearest minority neighbours per minority row, ties broken by index
  std::vector<std::vector<std::size_t>> neighbours(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t a = 0; a < m; ++a) {
    dist.clear();
    const auto xa = train.values.row(static_cast<Eigen::Index>(members[a]));
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      dist.emplace_back((train.values.row(static_cast<Eigen::Index>(members[b])) - xa).squaredNorm(), b);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t j = 0; j < k; ++j) neighbours[a].push_back(dist[j].second);
  }

  EncodedMatrix out;
  out.feature_names = train.feature_names;
  out.values.resize(static_cast<Eigen::Index>(train.rows() + needed), train.values.cols());
  out.values.topRows(train.values.rows()) = train.values;
  out.labels = train.labels;
  out.provenance = train.provenance;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_row(0, m - 1);
  std::uniform_int_distribution<std::size_t> pick_neighbour(0, k - 1);
  std::uniform_real_distribution<double> gap(0.0, 1.0);
  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t a = pick_row(rng);
    const std::size_t b = neighbours[a][pick_neighbour(rng)];
    const double lambda = gap(rng);
    const auto xa = train.values.row(static_cast<Eigen::Index>(members[a]));
    const auto xb = train.values.row(static_cast<Eigen::Index>(members[b]));
    out.values.row(static_cast<Eigen::Index>(train.rows() + s)) = xa + lambda * (xb - xa);
    out.labels.push_back(minority);
    out.provenance.push_back(Provenance::synthetic);
  }
  return out;
}

void to_json(nlohmann::json& j, const ColumnSpec& c) {
  j = {{"name", c.name}, {"kind", to_string(c.kind)}};
  if (!c.values.empty()) j["values"] = c.values;
  if (!c.positive_value.empty()) j["positive_value"] = c.positive_value;
  if (!c.aliases.empty()) j["aliases"] = c.aliases;
  if (c.blank_value) j["blank_value"] = *c.blank_value;
  if (!c.output_names.empty()) j["output_names"] = c.output_names;
}

void from_json(const nlohmann::json& j, ColumnSpec& c) {
  c = ColumnSpec{};
  c.name = j.at("name").get<std::string>();
  c.kind = column_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("values")) c.values = j["values"].get<std::vector<std::string>>();
  if (j.contains("positive_value")) c.positive_value = j["positive_value"].get<std::string>();
  if (j.contains("aliases")) c.aliases = j["aliases"].get<std::map<std::string, std::string>>();
  if (j.contains("blank_value")) c.blank_value = j["blank_value"].get<double>();
  if (j.contains("output_names")) c.output_names = j["output_names"].get<std::vector<std::string>>();
  if (c.kind == ColumnKind::categorical && c.values.size() == 2 && c.positive_value.empty()) {
    c.positive_value = c.values[1];
  }
}

void to_json(nlohmann::json& j, const FeatureSchema& s) {
  j = {{"columns", s.columns}, {"label_column", s.label_column}, {"positive_label", s.positive_label}};
}

void from_json(const nlohmann::json& j, FeatureSchema& s) {
  s.columns = j.at("columns").get<std::vector<ColumnSpec>>();
  s.label_column = j.at("label_column").get<std::string>();
  s.positive_label = j.value("positive_label", std::string{});
}

void to_json(nlohmann::json& j, const EncoderState& s) {
  nlohmann::json numeric = nlohmann::json::array();
  for (std::size_t c = 0; c < s.schema.columns.size(); ++c) {
    if (s.schema.columns[c].kind != ColumnKind::continuous) {
      numeric.push_back(nullptr);
      continue;
    }
    const auto& st = s.numeric[c];
    numeric.push_back({{"column", s.schema.columns[c].name},
                       {"mean", st.mean},
                       {"sd", st.sd},
                       {"z_min", st.z_min},
                       {"z_max", st.z_max}});
  }
  j = {{"format", "tabxai.encoder/1"},
       {"schema", s.schema},
       {"numeric", numeric},
       {"record_norm", s.record_norm},
       {"warnings", s.warnings}};
}

void from_json(const nlohmann::json& j, EncoderState& s) {
  if (j.value("format", std::string{}) != "tabxai.encoder/1") {
    throw Error("data", "format_version", "unsupported encoder format");
  }
  s.schema = j.at("schema").get<FeatureSchema>();
  s.record_norm = j.at("record_norm").get<bool>();
  s.warnings = j.value("warnings", Warnings{});
  s.numeric.assign(s.schema.columns.size(), NumericStats{});
  const auto& numeric = j.at("numeric");
  if (numeric.size() != s.schema.columns.size()) {
    throw Error("data", "format_error", "encoder numeric stats do not match schema columns");
  }
  for (std::size_t c = 0; c < numeric.size(); ++c) {
    if (numeric[c].is_null()) continue;
    s.numeric[c] = {numeric[c].at("mean").get<double>(), numeric[c].at("sd").get<double>(),
                    numeric[c].at("z_min").get<double>(), numeric[c].at("z_max").get<double>()};
  }
}

void to_json(nlohmann::json& j, const SplitPlan& s) {
  j = {{"format", "tabxai.split/1"},     {"train_indices", s.train_indices},
       {"test_indices", s.test_indices}, {"fold_of", s.fold_of},
       {"k", s.k},                       {"seed", s.seed},
       {"ratio", s.ratio}};
}

void from_json(const nlohmann::json& j, SplitPlan& s) {
  s.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
  s.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
  s.fold_of = j.at("fold_of").get<std::vector<int>>();
  s.k = j.at("k").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ratio = j.at("ratio").get<double>();
  if (s.fold_of.size() != s.train_indices.size()) {
    throw Error("data", "format_error", "split plan fold_of does not match train_indices");
  }
}

}  // namespace tabxai
