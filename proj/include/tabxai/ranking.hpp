#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tabxai/lrp.hpp"

namespace tabxai {

struct RankingConfig {
  double tau = 0.5;
  int per_class_top = 8;
  int total = 16;

  void validate(std::size_t n_features) const;
};

struct Outcomes {
  std::vector<std::size_t> tp, tn, fp, fn;

  const std::vector<std::size_t>& group(OutcomeGroup g) const;
};

Outcomes partition_outcomes(std::span<const int> predictions, std::span<const int> labels);

struct ClassAggregate {
  OutcomeGroup group = OutcomeGroup::tp;
  std::vector<int> counts;
  std::size_t records = 0;
};

/// Importance ranks: the most important feature scores n, descending; tied
/// counts share the minimum rank of their span; zero counts rank 1.
struct RankTable {
  std::string method;
  std::vector<std::string> feature_names;
  std::vector<int> rank;             // per feature
  std::vector<std::size_t> order;    // features by count desc, index asc

  std::vector<std::size_t> top(std::size_t k) const;
};

RankTable rank_from_counts(const std::vector<int>& counts, const std::vector<std::string>& feature_names = {},
                           const std::string& method = "");

struct GroupRanking {
  ClassAggregate aggregate;
  RankTable table;
};

/// Binarises each normalised row at tau (>= tau -> 1), sums columns, ranks.
GroupRanking rank_features(const Eigen::MatrixXd& normalized_rows, OutcomeGroup group, const RankingConfig& config,
                           const std::vector<std::string>& feature_names = {}, const std::string& method = "");

struct SubsetSelection {
  struct Source {
    OutcomeGroup list = OutcomeGroup::tp;
    std::size_t position = 0;  // 0-based position in that list's order
  };
  std::vector<std::size_t> features;
  std::vector<Source> provenance;
  std::vector<std::string> names;
};

/// ceil(total/2) features from the TP order and floor(total/2) from TN,
/// union in TP-first order; overlaps are filled by alternating further
/// TP and TN candidates.
SubsetSelection select_subset(const RankTable& tp, const RankTable& tn, const RankingConfig& config);

struct OverlapReport {
  std::size_t top_k = 0;
  std::vector<std::string> methods;
  std::vector<std::vector<std::size_t>> top_sets;
  std::vector<std::vector<std::size_t>> pairwise;  // intersection sizes
  std::vector<std::size_t> common;                 // features in every top-k set
};

OverlapReport compare_rankings(const std::vector<RankTable>& tables, std::size_t top_k);

/// Methods as rows, features as columns ordered by the first table.
std::string rank_tables_csv(const std::vector<RankTable>& tables);

nlohmann::json to_json(const SubsetSelection& s);
SubsetSelection subset_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OverlapReport& r, const std::vector<std::string>& feature_names);

}  // namespace tabxai
