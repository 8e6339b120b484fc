#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tabxai/kernels.hpp"
#include "tabxai/network.hpp"

namespace tabxai {

using kernels::LrpRule;

std::string to_string(LrpRule rule);
LrpRule lrp_rule_from_string(const std::string& text);

struct LrpConfig {
  LrpRule rule = LrpRule::epsilon;
  double epsilon = 1e-6;
  double alpha = 1.0;
  double beta = 0.0;
  // Explained class; absent means the predicted class.
  std::optional<int> target;

  void validate() const;
  std::string describe() const;
};

struct RelevanceVector {
  Eigen::VectorXd relevance;
  int explained_class = 0;
  double logit = 0.0;
  LrpRule rule = LrpRule::epsilon;
};

/// Propagates the target-class logit back to the input through `trace`.
RelevanceVector propagate_relevance(const Parameters& params, const ForwardTrace& trace, const LrpConfig& config);

/// (r - min) / (max - min); a constant vector maps to all 0.5.
Eigen::VectorXd normalize_heatmap(const Eigen::VectorXd& relevance);

enum class OutcomeGroup { tp, tn, fp, fn };

std::string to_string(OutcomeGroup group);

struct HeatmapMatrix {
  Eigen::MatrixXd rows;  // one normalised record per row
  std::vector<std::string> feature_names;
  std::vector<std::size_t> record_ids;
  std::optional<Eigen::VectorXd> mean_row;
  std::string title;
};

/// Stacks normalised rows in the given order and appends their mean, itself
/// re-normalised to [0, 1].
HeatmapMatrix aggregate_global(const std::vector<Eigen::VectorXd>& relevances, OutcomeGroup group,
                               const std::vector<std::string>& feature_names,
                               const std::vector<std::size_t>& record_ids = {});

nlohmann::json to_json(const RelevanceVector& r, const std::vector<std::string>& feature_names);

}  // namespace tabxai
