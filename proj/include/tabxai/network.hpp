#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tabxai/data.hpp"

namespace tabxai {

enum class LayerKind { conv1d, relu, flatten, dense, softmax };

std::string to_string(LayerKind kind);

/// One layer with its resolved shapes. Activations are (channels, length);
/// dense layers see (features, 1).
struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int units = 0;         // conv out channels or dense units
  int kernel_width = 0;  // conv only
  int in_channels = 1;
  int in_length = 0;
  int out_channels = 1;
  int out_length = 0;

  int in_size() const { return in_channels * in_length; }
  int out_size() const { return out_channels * out_length; }
  bool has_parameters() const { return kind == LayerKind::conv1d || kind == LayerKind::dense; }
};

struct SpecOptions {
  int kernel_width = 3;
  bool relu_every_conv = false;
};

struct NetworkSpec {
  std::string text;
  int input_len = 0;
  SpecOptions options;
  std::vector<LayerSpec> layers;

  /// Width after Flatten (0 when there is no convolution stack).
  int flatten_width() const;
  /// Throws Error("network", "spec_error") on any structural violation.
  void validate() const;
};

/// Parses `C<int>(-C<int>)*(-F<int>)*-O2` (spaces around '-' allowed).
NetworkSpec parse_spec(const std::string& text, int input_len, const SpecOptions& options = {});

/// Rewrites a spec string for a different input length: a first hidden
/// width equal to the old flatten width follows the new flatten width.
std::string rederive_spec(const std::string& text, int old_input_len, int new_input_len,
                          const SpecOptions& options = {});

struct LayerParams {
  Eigen::MatrixXd weight;  // out x in (conv: out_channels x kernel*in_channels)
  Eigen::VectorXd bias;
};

struct Parameters {
  NetworkSpec spec;
  std::vector<LayerParams> layers;  // aligned with spec.layers; empty for parameter-free layers
  std::uint64_t seed = 0;
  std::string init_scheme = "fan_in_uniform";

  std::size_t parameter_count() const;
  bool all_finite() const;
};

/// Schemes: "fan_in_uniform" (U(+-sqrt(6/fan_in)), zero bias) and "zeros".
Parameters init_params(const NetworkSpec& spec, std::uint64_t seed, const std::string& scheme = "fan_in_uniform");

struct ForwardTrace {
  // activations[i] is the input of layer i; activations.back() the probabilities.
  std::vector<Eigen::VectorXd> activations;

  const Eigen::VectorXd& input() const { return activations.front(); }
  const Eigen::VectorXd& probabilities() const { return activations.back(); }
  /// Pre-softmax scores.
  const Eigen::VectorXd& logits() const { return activations[activations.size() - 2]; }
};

struct ForwardResult {
  Eigen::Vector2d probabilities;
  ForwardTrace trace;
};

ForwardResult forward(const Parameters& params, std::span<const double> record);
/// Recomputes the forward pass from the trace input.
ForwardResult replay(const Parameters& params, const ForwardTrace& trace);

struct Prediction {
  int label = 0;
  double probability = 0.0;  // probability of class 1
};

/// Row-by-row forward; ties (exactly 0.5) go to class 0.
std::vector<Prediction> predict_batch(const Parameters& params, const RowMatrix& rows);
std::vector<int> predicted_labels(const std::vector<Prediction>& predictions);

/// Batched class-1 probabilities (GEMM path). Used as the black-box model.
Eigen::VectorXd class1_probabilities(const Parameters& params, const RowMatrix& rows);

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 300;
  int max_iterations = 15000;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  std::string init_scheme = "fan_in_uniform";

  void validate() const;
};

struct HistoryEntry {
  int iteration = 0;
  double loss = 0.0;
  double batch_accuracy = 0.0;
};

struct TrainResult {
  Parameters params;
  std::vector<HistoryEntry> history;
};

/// Mini-batch SGD with momentum on softmax cross-entropy.
TrainResult train(const EncodedMatrix& data, const NetworkSpec& spec, const TrainConfig& config);

struct Gradients {
  double loss = 0.0;
  std::vector<LayerParams> layers;  // aligned with Parameters::layers
};

/// Mean cross-entropy over the columns of `inputs` (features x batch) and its gradient.
Gradients loss_and_gradient(const Parameters& params, const Eigen::MatrixXd& inputs, std::span<const int> labels);
double mean_loss(const Parameters& params, const EncodedMatrix& data);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
};

/// Central finite differences against the analytic gradient on sampled
/// coordinates (weights and biases of every parameterised layer).
GradCheckResult grad_check(const Parameters& params, const Eigen::MatrixXd& inputs, std::span<const int> labels,
                           double h, std::size_t coordinates = 240, std::uint64_t seed = 0);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct Checkpoint {
  Parameters params;
  EncoderState encoder;
  TrainConfig train_config;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tabxai
