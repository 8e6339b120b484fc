#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "tabxai/data.hpp"

namespace tabxai {

/// Black-box model: class-1 probability for every row of a batch.
using PredictFn = std::function<Eigen::VectorXd(const RowMatrix&)>;

struct LimeConfig {
  int n_perturbations = 10;
  double noise_scale = 0.3;
  double kernel_width = 0.0;  // <= 0 means 0.75 * sqrt(n)
  double ridge = 1e-3;
  std::uint64_t seed = 0;

  static LimeConfig baseline() { return {}; }
  static LimeConfig quality() {
    LimeConfig c;
    c.n_perturbations = 5000;
    return c;
  }
  double resolved_kernel_width(std::size_t n_features) const;
  void validate(std::size_t n_features) const;
  std::string describe(std::size_t n_features) const;
};

enum class ShapMode { automatic, exact, sampled };

std::string to_string(ShapMode mode);
ShapMode shap_mode_from_string(const std::string& text);

struct ShapConfig {
  ShapMode mode = ShapMode::sampled;
  int n_permutations = 200;
  Eigen::VectorXd background;  // per-feature training means
  std::uint64_t seed = 0;

  static constexpr std::size_t kMaxExactFeatures = 15;
  ShapMode resolved_mode(std::size_t n_features) const;
  std::string describe(std::size_t n_features) const;
};

struct AttributionVector {
  Eigen::VectorXd scores;
  std::string method;
  double seconds = 0.0;
  // Shapley bookkeeping: v(all features) and v(no features).
  double full_value = 0.0;
  double base_value = 0.0;
  // Per-feature Monte-Carlo standard error (sampled SHAP only).
  std::optional<Eigen::VectorXd> standard_error;
};

/// Weighted ridge regression of the model output on Gaussian perturbations
/// of `record` (clipped to [0, 1]); coefficients are the attributions.
AttributionVector lime_explain(const PredictFn& predict, std::span<const double> record, const LimeConfig& config);

/// Shapley values with absent features replaced by the background means.
AttributionVector shap_explain(const PredictFn& predict, std::span<const double> record, const ShapConfig& config);

/// Column means of `data`, the SHAP background.
Eigen::VectorXd feature_means(const RowMatrix& data);

}  // namespace tabxai
