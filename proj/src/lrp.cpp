#include "tabxai/lrp.hpp"

#include <cmath>
#include <sstream>

#include "tabxai/csv.hpp"
#include "tabxai/error.hpp"

namespace tabxai {

std::string to_string(LrpRule rule) {
  switch (rule) {
    case LrpRule::z: return "z";
    case LrpRule::epsilon: return "epsilon";
    case LrpRule::alpha_beta: return "alphabeta";
  }
  return "?";
}

LrpRule lrp_rule_from_string(const std::string& text) {
  if (text == "z") return LrpRule::z;
  if (text == "epsilon") return LrpRule::epsilon;
  if (text == "alphabeta" || text == "alpha_beta") return LrpRule::alpha_beta;
  throw Error("lrp", "config_error", "unknown LRP rule '" + text + "'");
}

void LrpConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error("lrp", "config_error", "epsilon must be >= 0");
  if (rule == LrpRule::alpha_beta && std::abs(alpha - beta - 1.0) > 1e-12) {
    throw Error("lrp", "config_error", "alpha - beta must equal 1");
  }
  if (target && *target != 0 && *target != 1) throw Error("lrp", "config_error", "target class must be 0 or 1");
}

std::string LrpConfig::describe() const {
  std::ostringstream out;
  out << "rule=" << to_string(rule);
  if (rule == LrpRule::epsilon) out << ";epsilon=" << csv::format_number(epsilon);
  if (rule == LrpRule::alpha_beta) out << ";alpha=" << csv::format_number(alpha) << ";beta=" << csv::format_number(beta);
  out << ";target=" << (target ? std::to_string(*target) : std::string("predicted"));
  out << ";start=logit;bias=absorbed";
  return out.str();
}

RelevanceVector propagate_relevance(const Parameters& params, const ForwardTrace& trace, const LrpConfig& config) {
  config.validate();
  const auto& layers = params.spec.layers;
  if (trace.activations.size() != layers.size() + 1 ||
      trace.input().size() != params.spec.input_len) {
    throw Error("lrp", "trace_mismatch", "trace was not produced by these parameters");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (trace.activations[i].size() != layers[i].in_size()) {
      throw Error("lrp", "trace_mismatch", "trace layer " + std::to_string(i) + " has the wrong size");
    }
  }

  const Eigen::VectorXd& logits = trace.logits();
  RelevanceVector out;
  out.rule = config.rule;
  out.explained_class = config.target ? *config.target : (trace.probabilities()(1) > trace.probabilities()(0) ? 1 : 0);
  out.logit = logits(out.explained_class);

  kernels::LrpParams<double> rule{config.rule, config.epsilon, config.alpha, config.beta};
  Eigen::VectorXd r = Eigen::VectorXd::Zero(logits.size());
  r(out.explained_class) = out.logit;

  try {
    // Softmax is bypassed: relevance starts at the logit (input of the last layer).
    for (std::size_t i = layers.size() - 1; i-- > 0;) {
      const LayerSpec& layer = layers[i];
      const LayerParams& p = params.layers[i];
      const Eigen::VectorXd& x = trace.activations[i];
      const Eigen::VectorXd& z = trace.activations[i + 1];
      switch (layer.kind) {
        case LayerKind::dense: r = kernels::lrp_affine(p.weight, p.bias, x, z, r, rule); break;
        case LayerKind::conv1d: r = kernels::lrp_conv1d(p.weight, p.bias, x, z, r, layer.in_channels, rule); break;
        case LayerKind::relu: r = (x.array() > 0.0).select(r, 0.0); break;
        case LayerKind::flatten: break;
        case LayerKind::softmax: throw Error("lrp", "trace_mismatch", "softmax must be the last layer");
      }
    }
  } catch (const kernels::ZeroDenominator&) {
    throw Error("lrp", "zero_denominator", "z-rule hit a zero denominator; use the epsilon rule");
  }
  out.relevance = std::move(r);
  if (!out.relevance.allFinite()) throw Error("lrp", "non_finite", "relevance contains non-finite values");
  return out;
}

Eigen::VectorXd normalize_heatmap(const Eigen::VectorXd& relevance) {
  if (relevance.size() == 0) return relevance;
  const double lo = relevance.minCoeff();
  const double hi = relevance.maxCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Constant(relevance.size(), 0.5);
  return (relevance.array() - lo) / (hi - lo);
}

std::string to_string(OutcomeGroup group) {
  switch (group) {
    case OutcomeGroup::tp: return "TP";
    case OutcomeGroup::tn: return "TN";
    case OutcomeGroup::fp: return "FP";
    case OutcomeGroup::fn: return "FN";
  }
  return "?";
}

HeatmapMatrix aggregate_global(const std::vector<Eigen::VectorXd>& relevances, OutcomeGroup group,
                               const std::vector<std::string>& feature_names,
                               const std::vector<std::size_t>& record_ids) {
  if (relevances.empty()) throw Error("lrp", "empty_group", "group " + to_string(group) + " has no records");
  const Eigen::Index n = relevances.front().size();
  HeatmapMatrix out;
  out.title = to_string(group);
  out.feature_names = feature_names;
  out.rows.resize(static_cast<Eigen::Index>(relevances.size()), n);
  for (std::size_t i = 0; i < relevances.size(); ++i) {
    if (relevances[i].size() != n) throw Error("lrp", "shape_mismatch", "relevance vectors differ in length");
    out.rows.row(static_cast<Eigen::Index>(i)) = normalize_heatmap(relevances[i]).transpose();
    out.record_ids.push_back(i < record_ids.size() ? record_ids[i] : i);
  }
  out.mean_row = normalize_heatmap(out.rows.colwise().mean().transpose());
  return out;
}

nlohmann::json to_json(const RelevanceVector& r, const std::vector<std::string>& feature_names) {
  return {{"method", "lrp"},
          {"rule", to_string(r.rule)},
          {"explained_class", r.explained_class},
          {"logit", r.logit},
          {"features", feature_names},
          {"relevance", std::vector<double>(r.relevance.data(), r.relevance.data() + r.relevance.size())}};
}

}  // namespace tabxai
