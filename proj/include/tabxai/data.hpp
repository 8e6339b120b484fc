#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace tabxai {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Warnings = std::vector<std::string>;

enum class ColumnKind { unknown, categorical, continuous, binary, ignored };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::unknown;
  // Categorical value set in output-column order.
  std::vector<std::string> values;
  // For two-valued categoricals: the value encoded as 1.
  std::string positive_value;
  // Raw cell value -> canonical value, applied before anything else.
  std::map<std::string, std::string> aliases;
  // Numeric fill for blank cells; absent means blanks are a load error.
  std::optional<double> blank_value;
  // Output column names. Empty means derived (name, or name_value per one-hot column).
  std::vector<std::string> output_names;

  std::size_t width() const;
};

struct FeatureSchema {
  std::vector<ColumnSpec> columns;  // feature columns, label excluded
  std::string label_column;
  std::string positive_label;  // raw label value mapped to class 1

  std::size_t n_encoded() const;
  std::vector<std::string> encoded_names() const;
  // Throws Error("data","schema_error") when an invariant is violated.
  void validate() const;
};

/// Column-wise raw data aligned with FeatureSchema::columns.
struct RawTable {
  struct Column {
    std::vector<double> numbers;    // numeric kinds
    std::vector<std::string> text;  // categorical
  };
  std::vector<Column> columns;
  std::vector<int> labels;

  std::size_t rows() const { return labels.size(); }
};

struct LoadedTable {
  RawTable table;
  FeatureSchema schema;
  Warnings warnings;
};

/// Reads a CSV. With no schema, kinds are inferred and `label_column`
/// (default: last header column) names the target.
LoadedTable load_table(const std::filesystem::path& path, const std::optional<FeatureSchema>& schema,
                       const std::string& label_column = "");
LoadedTable load_table_from_text(const std::string& csv_text, const std::optional<FeatureSchema>& schema,
                                 const std::string& label_column = "", const std::string& source = "<memory>");

/// Built-in schemas for the two benchmark tables (telecom churn, card fraud).
FeatureSchema telecom_churn_schema();
FeatureSchema card_fraud_schema();

struct NumericStats {
  double mean = 0.0;
  double sd = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

struct EncoderState {
  FeatureSchema schema;
  std::vector<NumericStats> numeric;  // aligned with schema.columns
  bool record_norm = true;
  Warnings warnings;

  std::string fingerprint() const;
};

EncoderState fit_encoder(const RawTable& table, const FeatureSchema& schema,
                         std::span<const std::size_t> train_indices, bool record_norm = true);

enum class Provenance : std::uint8_t { real, synthetic };

struct EncodedMatrix {
  RowMatrix values;
  std::vector<int> labels;
  std::vector<Provenance> provenance;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  std::size_t count(int label) const;

  EncodedMatrix select_rows(std::span<const std::size_t> rows) const;
  EncodedMatrix select_columns(std::span<const std::size_t> columns) const;
  std::string fingerprint() const;
};

EncodedMatrix encode(const RawTable& table, const EncoderState& state, Warnings* warnings = nullptr);

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<int> fold_of;  // aligned with train_indices
  int k = 5;
  std::uint64_t seed = 0;
  double ratio = 0.8;

  std::vector<std::size_t> fold_members(int fold) const;
  std::vector<std::size_t> fold_complement(int fold) const;
};

SplitPlan stratified_split(std::span<const int> labels, double ratio, int k, std::uint64_t seed);

struct ResampleConfig {
  int k_neighbors = 5;
  std::uint64_t seed = 0;
};

/// SMOTE oversampling of the minority class up to the majority count.
/// Synthetic rows are appended after the originals.
EncodedMatrix smote(const EncodedMatrix& train, const ResampleConfig& config, Warnings* warnings = nullptr);

void to_json(nlohmann::json& j, const ColumnSpec& c);
void from_json(const nlohmann::json& j, ColumnSpec& c);
void to_json(nlohmann::json& j, const FeatureSchema& s);
void from_json(const nlohmann::json& j, FeatureSchema& s);
void to_json(nlohmann::json& j, const EncoderState& s);
void from_json(const nlohmann::json& j, EncoderState& s);
void to_json(nlohmann::json& j, const SplitPlan& s);
void from_json(const nlohmann::json& j, SplitPlan& s);

}  // namespace tabxai
