#include "tabxai/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tabxai/csv.hpp"
#include "tabxai/error.hpp"

namespace tabxai {

void RankingConfig::validate(std::size_t n_features) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("ranking", "config_error", "tau must lie in [0, 1]");
  if (total < 1) throw Error("ranking", "config_error", "total must be >= 1");
  if (static_cast<std::size_t>(total) > n_features) {
    throw Error("ranking", "config_error",
                "total " + std::to_string(total) + " exceeds feature count " + std::to_string(n_features));
  }
  if (per_class_top * 2 < total) throw Error("ranking", "config_error", "per_class_top * 2 must be >= total");
}

const std::vector<std::size_t>& Outcomes::group(OutcomeGroup g) const {
  switch (g) {
    case OutcomeGroup::tp: return tp;
    case OutcomeGroup::tn: return tn;
    case OutcomeGroup::fp: return fp;
    case OutcomeGroup::fn: return fn;
  }
  return tp;
}

Outcomes partition_outcomes(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error("ranking", "shape_mismatch", "predictions and labels differ in length");
  }
  Outcomes out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool truth = labels[i] == 1;
    if (pred && truth) out.tp.push_back(i);
    else if (!pred && !truth) out.tn.push_back(i);
    else if (pred) out.fp.push_back(i);
    else out.fn.push_back(i);
  }
  return out;
}

std::vector<std::size_t> RankTable::top(std::size_t k) const {
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size()))};
}

RankTable rank_from_counts(const std::vector<int>& counts, const std::vector<std::string>& feature_names,
                           const std::string& method) {
  const std::size_t n = counts.size();
  RankTable t;
  t.method = method;
  t.feature_names = feature_names;
  t.order.resize(n);
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  t.rank.assign(n, 1);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end + 1 < n && counts[t.order[end + 1]] == counts[t.order[pos]]) ++end;
    // positions pos..end carry values n-pos .. n-end; the span shares the minimum
    const int shared = static_cast<int>(n - end);
    for (std::size_t p = pos; p <= end; ++p) t.rank[t.order[p]] = counts[t.order[p]] == 0 ? 1 : shared;
    pos = end + 1;
  }
  return t;
}

GroupRanking rank_features(const Eigen::MatrixXd& normalized_rows, OutcomeGroup group, const RankingConfig& config,
                           const std::vector<std::string>& feature_names, const std::string& method) {
  if (!(config.tau >= 0.0 && config.tau <= 1.0)) throw Error("ranking", "config_error", "tau must lie in [0, 1]");
  if (normalized_rows.rows() == 0) {
    throw Error("ranking", "empty_group", "group " + to_string(group) + " has no records to rank");
  }
  GroupRanking out;
  out.aggregate.group = group;
  out.aggregate.records = static_cast<std::size_t>(normalized_rows.rows());
  out.aggregate.counts.assign(static_cast<std::size_t>(normalized_rows.cols()), 0);
  for (Eigen::Index r = 0; r < normalized_rows.rows(); ++r) {
    for (Eigen::Index f = 0; f < normalized_rows.cols(); ++f) {
      if (normalized_rows(r, f) >= config.tau) ++out.aggregate.counts[static_cast<std::size_t>(f)];
    }
  }
  out.table = rank_from_counts(out.aggregate.counts, feature_names, method);
  return out;
}

SubsetSelection select_subset(const RankTable& tp, const RankTable& tn, const RankingConfig& config) {
  const std::size_t n = tp.order.size();
  if (tn.order.size() != n) throw Error("ranking", "shape_mismatch", "TP and TN tables cover different features");
  config.validate(n);
  const auto total = static_cast<std::size_t>(config.total);
  const std::size_t tp_quota = std::min<std::size_t>((total + 1) / 2, static_cast<std::size_t>(config.per_class_top));
  const std::size_t tn_quota = std::min<std::size_t>(total / 2, static_cast<std::size_t>(config.per_class_top));

  SubsetSelection out;
  std::set<std::size_t> chosen;
  auto take = [&](std::size_t feature, OutcomeGroup list, std::size_t position) {
    if (!chosen.insert(feature).second) return;
    out.features.push_back(feature);
    out.provenance.push_back({list, position});
  };
  for (std::size_t i = 0; i < tp_quota; ++i) take(tp.order[i], OutcomeGroup::tp, i);
  for (std::size_t i = 0; i < tn_quota; ++i) take(tn.order[i], OutcomeGroup::tn, i);

  std::size_t next_tp = tp_quota, next_tn = tn_quota;
  bool tp_turn = true;
  while (out.features.size() < total) {
    std::size_t& cursor = tp_turn ? next_tp : next_tn;
    const RankTable& table = tp_turn ? tp : tn;
    while (cursor < n && chosen.count(table.order[cursor])) ++cursor;
    if (cursor < n) {
      take(table.order[cursor], tp_turn ? OutcomeGroup::tp : OutcomeGroup::tn, cursor);
      ++cursor;
    }
    tp_turn = !tp_turn;
  }
  for (auto f : out.features) out.names.push_back(f < tp.feature_names.size() ? tp.feature_names[f] : std::to_string(f));
  return out;
}

OverlapReport compare_rankings(const std::vector<RankTable>& tables, std::size_t top_k) {
  OverlapReport r;
  r.top_k = top_k;
  if (tables.empty()) return r;
  const std::size_t n = tables.front().order.size();
  for (const auto& t : tables) {
    if (t.order.size() != n) throw Error("ranking", "shape_mismatch", "rank tables cover different features");
    r.methods.push_back(t.method);
    auto top = t.top(top_k);
    std::sort(top.begin(), top.end());
    r.top_sets.push_back(std::move(top));
  }
  r.pairwise.assign(tables.size(), std::vector<std::size_t>(tables.size(), 0));
  for (std::size_t a = 0; a < tables.size(); ++a) {
    for (std::size_t b = 0; b < tables.size(); ++b) {
      std::vector<std::size_t> both;
      std::set_intersection(r.top_sets[a].begin(), r.top_sets[a].end(), r.top_sets[b].begin(), r.top_sets[b].end(),
                            std::back_inserter(both));
      r.pairwise[a][b] = both.size();
    }
  }
  r.common = r.top_sets.front();
  for (std::size_t a = 1; a < r.top_sets.size(); ++a) {
    std::vector<std::size_t> both;
    std::set_intersection(r.common.begin(), r.common.end(), r.top_sets[a].begin(), r.top_sets[a].end(),
                          std::back_inserter(both));
    r.common = std::move(both);
  }
  return r;
}

std::string rank_tables_csv(const std::vector<RankTable>& tables) {
  if (tables.empty()) return "";
  const RankTable& lead = tables.front();
  std::string out = "method";
  for (auto f : lead.order) {
    out += ',';
    out += csv::quote(f < lead.feature_names.size() ? lead.feature_names[f] : std::to_string(f));
  }
  out += '\n';
  for (const auto& t : tables) {
    out += csv::quote(t.method);
    for (auto f : lead.order) out += ',' + std::to_string(t.rank.at(f));
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const SubsetSelection& s) {
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& p : s.provenance) prov.push_back({{"list", to_string(p.list)}, {"position", p.position}});
  return {{"features", s.features}, {"names", s.names}, {"provenance", prov}};
}

SubsetSelection subset_from_json(const nlohmann::json& j) {
  SubsetSelection s;
  s.features = j.at("features").get<std::vector<std::size_t>>();
  s.names = j.value("names", std::vector<std::string>{});
  for (const auto& p : j.value("provenance", nlohmann::json::array())) {
    s.provenance.push_back({p.at("list").get<std::string>() == "TN" ? OutcomeGroup::tn : OutcomeGroup::tp,
                            p.at("position").get<std::size_t>()});
  }
  return s;
}

nlohmann::json to_json(const OverlapReport& r, const std::vector<std::string>& feature_names) {
  auto names = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(i < feature_names.size() ? feature_names[i] : std::to_string(i));
    return out;
  };
  nlohmann::json top = nlohmann::json::object();
  for (std::size_t m = 0; m < r.methods.size(); ++m) top[r.methods[m]] = names(r.top_sets[m]);
  nlohmann::json pairwise = nlohmann::json::array();
  for (std::size_t a = 0; a < r.methods.size(); ++a) {
    for (std::size_t b = a + 1; b < r.methods.size(); ++b) {
      pairwise.push_back({{"a", r.methods[a]}, {"b", r.methods[b]}, {"overlap", r.pairwise[a][b]}});
    }
  }
  return {{"top_k", r.top_k},
          {"top_sets", top},
          {"pairwise", pairwise},
          {"all_methods_overlap", r.common.size()},
          {"common_features", names(r.common)}};
}

}  // namespace tabxai
