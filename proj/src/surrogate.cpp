#include "tabxai/surrogate.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "tabxai/csv.hpp"
#include "tabxai/error.hpp"

namespace tabxai {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd to_vector(std::span<const double> record) {
  return Eigen::Map<const Eigen::VectorXd>(record.data(), static_cast<Eigen::Index>(record.size()));
}

void check_output(const Eigen::VectorXd& y, Eigen::Index rows, const char* method) {
  if (y.size() != rows) throw Error("surrogate", "predict_error", std::string(method) + ": predict returned wrong size");
  if (!y.allFinite()) throw Error("surrogate", "predict_error", std::string(method) + ": predict returned non-finite");
}

}  // namespace

double LimeConfig::resolved_kernel_width(std::size_t n_features) const {
  return kernel_width > 0.0 ? kernel_width : 0.75 * std::sqrt(static_cast<double>(n_features));
}

void LimeConfig::validate(std::size_t n_features) const {
  if (n_perturbations < 1) throw Error("surrogate", "config_error", "n_perturbations must be >= 1");
  if (!(noise_scale > 0.0)) throw Error("surrogate", "config_error", "noise_scale must be > 0");
  if (!(ridge >= 0.0)) throw Error("surrogate", "config_error", "ridge must be >= 0");
  if (ridge == 0.0 && static_cast<std::size_t>(n_perturbations) < n_features + 1) {
    throw Error("surrogate", "config_error",
                "without ridge, n_perturbations must be at least n_features + 1 (" + std::to_string(n_features + 1) +
                    ")");
  }
}

std::string LimeConfig::describe(std::size_t n_features) const {
  std::ostringstream out;
  out << "n_perturbations=" << n_perturbations << ";noise_scale=" << csv::format_number(noise_scale)
      << ";kernel_width=" << csv::format_number(resolved_kernel_width(n_features))
      << ";ridge=" << csv::format_number(ridge) << ";seed=" << seed;
  return out.str();
}

std::string to_string(ShapMode mode) {
  switch (mode) {
    case ShapMode::automatic: return "auto";
    case ShapMode::exact: return "exact";
    case ShapMode::sampled: return "sampled";
  }
  return "?";
}

ShapMode shap_mode_from_string(const std::string& text) {
  if (text == "auto") return ShapMode::automatic;
  if (text == "exact") return ShapMode::exact;
  if (text == "sampled") return ShapMode::sampled;
  throw Error("surrogate", "config_error", "unknown SHAP mode '" + text + "'");
}

ShapMode ShapConfig::resolved_mode(std::size_t n_features) const {
  if (mode != ShapMode::automatic) return mode;
  return n_features <= kMaxExactFeatures ? ShapMode::exact : ShapMode::sampled;
}

std::string ShapConfig::describe(std::size_t n_features) const {
  std::ostringstream out;
  const ShapMode m = resolved_mode(n_features);
  out << "mode=" << to_string(m);
  if (m == ShapMode::sampled) out << ";n_permutations=" << n_permutations;
  out << ";background=training_means;seed=" << seed;
  return out.str();
}

AttributionVector lime_explain(const PredictFn& predict, std::span<const double> record, const LimeConfig& config) {
  const auto start = Clock::now();
  const std::size_t n = record.size();
  config.validate(n);
  const Eigen::VectorXd x = to_vector(record);
  const auto samples = static_cast<Eigen::Index>(config.n_perturbations);
  const auto dims = static_cast<Eigen::Index>(n);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_scale);
  RowMatrix perturbed(samples, dims);
  for (Eigen::Index s = 0; s < samples; ++s) {
    for (Eigen::Index f = 0; f < dims; ++f) perturbed(s, f) = std::clamp(x(f) + noise(rng), 0.0, 1.0);
  }
  const Eigen::VectorXd y = predict(perturbed);
  check_output(y, samples, "lime");

  const double width = config.resolved_kernel_width(n);
  // Design matrix [1, z - x]; centring on the record leaves slopes unchanged.
  Eigen::MatrixXd design(samples, dims + 1);
  Eigen::VectorXd weights(samples);
  for (Eigen::Index s = 0; s < samples; ++s) {
    const Eigen::RowVectorXd delta = perturbed.row(s) - x.transpose();
    design(s, 0) = 1.0;
    design.row(s).tail(dims) = delta;
    weights(s) = std::exp(-delta.squaredNorm() / (width * width));
  }
  Eigen::MatrixXd normal = design.transpose() * weights.asDiagonal() * design;
  const Eigen::VectorXd rhs = design.transpose() * weights.asDiagonal() * y;
  normal.diagonal().tail(dims).array() += config.ridge;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  if (qr.rank() < normal.rows()) {
    throw Error("surrogate", "singular_system",
                "LIME normal equations are singular; use ridge > 0 or more perturbations");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);

  AttributionVector out;
  out.method = "lime";
  out.scores = beta.tail(dims);
  out.seconds = seconds_since(start);
  return out;
}

AttributionVector shap_explain(const PredictFn& predict, std::span<const double> record, const ShapConfig& config) {
  const auto start = Clock::now();
  const std::size_t n = record.size();
  const auto dims = static_cast<Eigen::Index>(n);
  if (config.background.size() != dims) {
    throw Error("surrogate", "config_error", "SHAP background must have one mean per feature");
  }
  const Eigen::VectorXd x = to_vector(record);
  const ShapMode mode = config.resolved_mode(n);

  AttributionVector out;
  out.method = "shap";
  out.scores = Eigen::VectorXd::Zero(dims);

  if (mode == ShapMode::exact) {
    if (n > ShapConfig::kMaxExactFeatures) {
      throw Error("surrogate", "too_many_features",
                  "exact SHAP enumerates 2^n subsets and is limited to " +
                      std::to_string(ShapConfig::kMaxExactFeatures) + " features; use sampled mode");
    }
    const std::size_t subsets = std::size_t{1} << n;
    RowMatrix batch(static_cast<Eigen::Index>(subsets), dims);
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      for (Eigen::Index f = 0; f < dims; ++f) {
        batch(static_cast<Eigen::Index>(mask), f) = (mask >> f) & 1U ? x(f) : config.background(f);
      }
    }
    const Eigen::VectorXd v = predict(batch);
    check_output(v, static_cast<Eigen::Index>(subsets), "shap");
    // weight(s) = s! (n - s - 1)! / n! = 1 / (n * C(n - 1, s))
    std::vector<double> weight(n);
    double binom = 1.0;
    for (std::size_t s = 0; s < n; ++s) {
      weight[s] = 1.0 / (static_cast<double>(n) * binom);
      binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
    }
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      for (std::size_t f = 0; f < n; ++f) {
        if ((mask >> f) & 1U) continue;
        out.scores(static_cast<Eigen::Index>(f)) +=
            weight[size] * (v(static_cast<Eigen::Index>(mask | (std::size_t{1} << f))) - v(static_cast<Eigen::Index>(mask)));
      }
    }
    out.full_value = v(static_cast<Eigen::Index>(subsets - 1));
    out.base_value = v(0);
  } else {
    if (config.n_permutations < 1) throw Error("surrogate", "config_error", "n_permutations must be >= 1");
    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Permutations come in antithetic pairs (a shuffle, then its reverse);
    // the standard error is taken over pair means.
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(dims);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dims);
    int units = 0, in_unit = 0;
    RowMatrix batch(dims + 1, dims);
    double full = 0.0, base = 0.0;
    for (int p = 0; p < config.n_permutations; ++p) {
      if (p % 2 == 0) std::shuffle(order.begin(), order.end(), rng);
      else std::reverse(order.begin(), order.end());
      batch.row(0) = config.background.transpose();
      for (Eigen::Index k = 0; k < dims; ++k) {
        batch.row(k + 1) = batch.row(k);
        batch(k + 1, order[static_cast<std::size_t>(k)]) = x(order[static_cast<std::size_t>(k)]);
      }
      const Eigen::VectorXd v = predict(batch);
      check_output(v, dims + 1, "shap");
      for (Eigen::Index k = 0; k < dims; ++k) unit(order[static_cast<std::size_t>(k)]) += v(k + 1) - v(k);
      full += v(dims);
      base += v(0);
      if (++in_unit == 2 || p + 1 == config.n_permutations) {
        out.scores += unit;
        sum_sq += (unit / in_unit).cwiseAbs2();
        unit.setZero();
        in_unit = 0;
        ++units;
      }
    }
    const double count = config.n_permutations;
    out.scores /= count;
    out.full_value = full / count;
    out.base_value = base / count;
    const Eigen::VectorXd variance = (sum_sq / units - out.scores.cwiseAbs2()).cwiseMax(0.0);
    out.standard_error = (variance / units).cwiseSqrt();
  }
  out.seconds = seconds_since(start);
  return out;
}

Eigen::VectorXd feature_means(const RowMatrix& data) {
  if (data.rows() == 0) throw Error("surrogate", "config_error", "background needs at least one row");
  return data.colwise().mean().transpose();
}

}  // namespace tabxai
