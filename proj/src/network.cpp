#include "tabxai/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "tabxai/error.hpp"
#include "tabxai/kernels.hpp"

namespace tabxai {

namespace {

constexpr const char* kCheckpointFormat = "tabxai.checkpoint/1";

[[noreturn]] void spec_error(const std::string& message) { throw Error("network", "spec_error", message); }

struct Token {
  char kind;
  int value;
  std::size_t position;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  while (true) {
    skip_space();
    if (pos >= text.size()) spec_error("unexpected end of spec at position " + std::to_string(pos));
    const std::size_t start = pos;
    const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(text[pos])));
    if (kind != 'C' && kind != 'F' && kind != 'O') {
      spec_error("expected C, F or O at position " + std::to_string(pos) + " in '" + text + "'");
    }
    ++pos;
    const std::size_t digits = pos;
    long value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      if (value > 1'000'000) spec_error("layer width too large at position " + std::to_string(digits));
      ++pos;
    }
    if (pos == digits) spec_error("expected a number at position " + std::to_string(pos) + " in '" + text + "'");
    if (value < 1) spec_error("layer width must be positive at position " + std::to_string(digits));
    tokens.push_back({kind, static_cast<int>(value), start});
    skip_space();
    if (pos >= text.size()) break;
    if (text[pos] != '-') spec_error("expected '-' at position " + std::to_string(pos) + " in '" + text + "'");
    ++pos;
  }
  return tokens;
}

using kernels::Mat;

// Forward over a features x batch matrix. Stores every layer input in `acts`
// when non-null (acts[i] = input of layer i, acts.back() = output).
Eigen::MatrixXd run_forward(const Parameters& params, const Eigen::MatrixXd& input,
                            std::vector<Eigen::MatrixXd>* acts) {
  Eigen::MatrixXd x = input;
  if (acts) {
    acts->clear();
    acts->reserve(params.spec.layers.size() + 1);
  }
  for (std::size_t i = 0; i < params.spec.layers.size(); ++i) {
    const LayerSpec& layer = params.spec.layers[i];
    const LayerParams& p = params.layers[i];
    Eigen::MatrixXd y;
    switch (layer.kind) {
      case LayerKind::conv1d: y = kernels::conv1d_forward(p.weight, p.bias, x, layer.in_channels); break;
      case LayerKind::dense: y = kernels::dense_forward(p.weight, p.bias, x); break;
      case LayerKind::relu: y = kernels::relu(x); break;
      case LayerKind::flatten: y = x; break;
      case LayerKind::softmax: y = kernels::softmax(x); break;
    }
    if (acts) acts->push_back(std::move(x));
    x = std::move(y);
  }
  if (acts) acts->push_back(x);
  return x;
}

void check_record(const Parameters& params, std::span<const double> record) {
  if (record.size() != static_cast<std::size_t>(params.spec.input_len)) {
    throw Error("network", "shape_mismatch",
                "record has " + std::to_string(record.size()) + " features, network expects " +
                    std::to_string(params.spec.input_len));
  }
  for (double v : record) {
    if (!std::isfinite(v)) throw Error("network", "non_finite_input", "record contains a non-finite value");
  }
}

Eigen::MatrixXd gather_columns(const RowMatrix& rows, std::span<const std::size_t> indices) {
  Eigen::MatrixXd x(rows.cols(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t b = 0; b < indices.size(); ++b) {
    x.col(static_cast<Eigen::Index>(b)) = rows.row(static_cast<Eigen::Index>(indices[b])).transpose();
  }
  return x;
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::relu: return "relu";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
  }
  return "?";
}

int NetworkSpec::flatten_width() const {
  for (const auto& l : layers) {
    if (l.kind == LayerKind::flatten) return l.out_size();
  }
  return 0;
}

void NetworkSpec::validate() const {
  if (input_len < 1) spec_error("input length must be at least 1");
  if (layers.empty() || layers.back().kind != LayerKind::softmax) spec_error("last layer must be softmax");
  int softmax = 0, flatten = 0;
  int last_conv = -1, first_dense = -1, flatten_at = -1;
  int channels = 1, length = input_len;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.in_channels != channels || l.in_length != length) spec_error("layer " + std::to_string(i) + " shape mismatch");
    switch (l.kind) {
      case LayerKind::conv1d:
        if (first_dense >= 0) spec_error("convolution after dense layer");
        if (l.out_length != l.in_length - l.kernel_width + 1 || l.out_length < 1) {
          spec_error("convolution output length must be input - kernel + 1 >= 1");
        }
        last_conv = static_cast<int>(i);
        break;
      case LayerKind::dense:
        if (first_dense < 0) first_dense = static_cast<int>(i);
        if (l.in_channels != 1 && l.in_length != 1) spec_error("dense layer needs flat input");
        break;
      case LayerKind::flatten:
        ++flatten;
        flatten_at = static_cast<int>(i);
        break;
      case LayerKind::softmax:
        ++softmax;
        if (l.out_size() != 2) spec_error("softmax must have 2 outputs");
        break;
      case LayerKind::relu: break;
    }
    channels = l.out_channels;
    length = l.out_length;
  }
  if (softmax != 1) spec_error("exactly one softmax required");
  if (first_dense < 0) spec_error("at least one dense layer required");
  if (last_conv >= 0) {
    if (flatten != 1 || flatten_at < last_conv || flatten_at > first_dense) {
      spec_error("exactly one flatten required between the last convolution and the first dense layer");
    }
  } else if (flatten > 1) {
    spec_error("at most one flatten allowed");
  }
}

NetworkSpec parse_spec(const std::string& text, int input_len, const SpecOptions& options) {
  if (input_len < 1) spec_error("input length must be at least 1");
  if (options.kernel_width < 1) spec_error("kernel width must be at least 1");
  const auto tokens = tokenize(text);

  NetworkSpec spec;
  spec.text = text;
  spec.input_len = input_len;
  spec.options = options;
  int channels = 1, length = input_len;
  auto push = [&](LayerKind kind, int out_channels, int out_length, int units = 0, int kernel = 0) {
    LayerSpec l;
    l.kind = kind;
    l.units = units;
    l.kernel_width = kernel;
    l.in_channels = channels;
    l.in_length = length;
    l.out_channels = out_channels;
    l.out_length = out_length;
    spec.layers.push_back(l);
    channels = out_channels;
    length = out_length;
  };

  int phase = 0;  // 0 conv, 1 dense, 2 done
  int convs = 0;
  bool flattened = false;
  auto flatten_once = [&] {
    if (!flattened && convs > 0) push(LayerKind::flatten, channels * length, 1);
    flattened = true;
  };
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Token& tok = tokens[t];
    const std::string at = " at position " + std::to_string(tok.position);
    if (phase == 2) spec_error("tokens after O2" + at);
    switch (tok.kind) {
      case 'C': {
        if (phase != 0) spec_error("convolution after fully connected layer" + at);
        const int out_len = length - options.kernel_width + 1;
        if (out_len < 1) {
          spec_error("convolution stack shrinks the sequence below length 1" + at + " (input length " +
                     std::to_string(input_len) + ")");
        }
        push(LayerKind::conv1d, tok.value, out_len, tok.value, options.kernel_width);
        ++convs;
        if (convs == 1 || options.relu_every_conv) push(LayerKind::relu, channels, length);
        break;
      }
      case 'F':
        phase = 1;
        flatten_once();
        push(LayerKind::dense, tok.value, 1, tok.value);
        push(LayerKind::relu, channels, length);
        break;
      case 'O':
        if (tok.value != 2) spec_error("output layer must be O2" + at);
        flatten_once();
        push(LayerKind::dense, 2, 1, 2);
        push(LayerKind::softmax, 2, 1);
        phase = 2;
        break;
    }
  }
  if (phase != 2) spec_error("spec must end with O2");
  spec.validate();
  return spec;
}

std::string rederive_spec(const std::string& text, int old_input_len, int new_input_len, const SpecOptions& options) {
  const NetworkSpec old_spec = parse_spec(text, old_input_len, options);
  const auto tokens = tokenize(text);
  int convs = 0;
  for (const auto& t : tokens) convs += t.kind == 'C';
  std::string out;
  bool first_f = true;
  int last_channels = 1;
  for (const auto& t : tokens) {
    if (t.kind == 'C') last_channels = t.value;
  }
  const int new_len = new_input_len - convs * (options.kernel_width - 1);
  for (const auto& t : tokens) {
    int value = t.value;
    if (t.kind == 'F' && first_f) {
      first_f = false;
      if (convs > 0 && value == old_spec.flatten_width() && new_len >= 1) value = last_channels * new_len;
    }
    if (!out.empty()) out += '-';
    out += t.kind;
    out += std::to_string(value);
  }
  parse_spec(out, new_input_len, options);
  return out;
}

std::size_t Parameters::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool Parameters::all_finite() const {
  return std::all_of(layers.begin(), layers.end(),
                     [](const LayerParams& l) { return l.weight.allFinite() && l.bias.allFinite(); });
}

Parameters init_params(const NetworkSpec& spec, std::uint64_t seed, const std::string& scheme) {
  if (scheme != "fan_in_uniform" && scheme != "zeros") {
    throw Error("network", "init_error", "unknown init scheme '" + scheme + "'");
  }
  Parameters params;
  params.spec = spec;
  params.seed = seed;
  params.init_scheme = scheme;
  params.layers.resize(spec.layers.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (!l.has_parameters()) continue;
    const int fan_in = l.kind == LayerKind::conv1d ? l.in_channels * l.kernel_width : l.in_size();
    const int rows = l.kind == LayerKind::conv1d ? l.out_channels : l.units;
    LayerParams& p = params.layers[i];
    p.weight = Eigen::MatrixXd::Zero(rows, fan_in);
    p.bias = Eigen::VectorXd::Zero(rows);
    if (scheme == "fan_in_uniform") {
      const double limit = std::sqrt(6.0 / fan_in);
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (Eigen::Index k = 0; k < p.weight.size(); ++k) p.weight.data()[k] = dist(rng);
    }
  }
  return params;
}

ForwardResult forward(const Parameters& params, std::span<const double> record) {
  check_record(params, record);
  const Eigen::MatrixXd input = Eigen::Map<const Eigen::VectorXd>(record.data(), static_cast<Eigen::Index>(record.size()));
  std::vector<Eigen::MatrixXd> acts;
  const Eigen::MatrixXd out = run_forward(params, input, &acts);
  ForwardResult result;
  result.probabilities = out.col(0);
  result.trace.activations.reserve(acts.size());
  for (auto& a : acts) result.trace.activations.emplace_back(a.col(0));
  return result;
}

ForwardResult replay(const Parameters& params, const ForwardTrace& trace) {
  if (trace.activations.size() != params.spec.layers.size() + 1) {
    throw Error("network", "trace_mismatch", "trace does not match the network depth");
  }
  const auto& x = trace.input();
  return forward(params, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

std::vector<Prediction> predict_batch(const Parameters& params, const RowMatrix& rows) {
  if (rows.cols() != params.spec.input_len) {
    throw Error("network", "shape_mismatch",
                "batch has " + std::to_string(rows.cols()) + " columns, network expects " +
                    std::to_string(params.spec.input_len));
  }
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const Eigen::VectorXd x = rows.row(r).transpose();
    check_record(params, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    const Eigen::MatrixXd p = run_forward(params, x, nullptr);
    out.push_back({p(1, 0) > p(0, 0) ? 1 : 0, p(1, 0)});
  }
  return out;
}

std::vector<int> predicted_labels(const std::vector<Prediction>& predictions) {
  std::vector<int> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(p.label);
  return out;
}

Eigen::VectorXd class1_probabilities(const Parameters& params, const RowMatrix& rows) {
  if (rows.cols() != params.spec.input_len) {
    throw Error("network", "shape_mismatch", "batch width does not match the network input length");
  }
  constexpr Eigen::Index kChunk = 512;
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index start = 0; start < rows.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, rows.rows() - start);
    const Eigen::MatrixXd x = rows.middleRows(start, n).transpose();
    out.segment(start, n) = run_forward(params, x, nullptr).row(1).transpose();
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error("network", "config_error", "learning_rate must be > 0");
  if (batch_size < 1) throw Error("network", "config_error", "batch_size must be >= 1");
  if (max_iterations < 1) throw Error("network", "config_error", "max_iterations must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error("network", "config_error", "momentum must lie in [0, 1)");
}

Gradients loss_and_gradient(const Parameters& params, const Eigen::MatrixXd& inputs, std::span<const int> labels) {
  const auto batch = inputs.cols();
  std::vector<Eigen::MatrixXd> acts;
  run_forward(params, inputs, &acts);
  const auto& layers = params.spec.layers;
  const std::size_t n_layers = layers.size();
  const Eigen::MatrixXd& logits = acts[n_layers - 1];
  const Eigen::MatrixXd log_p = kernels::log_softmax(logits);

  Gradients grads;
  grads.layers.resize(n_layers);
  double loss = 0.0;
  Eigen::MatrixXd g = acts[n_layers];  // softmax output
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    loss -= log_p(y, b);
    g(y, b) -= 1.0;
  }
  grads.loss = loss / static_cast<double>(batch);
  g /= static_cast<double>(batch);

  // g is now d loss / d logits; walk the layers below the softmax.
  for (std::size_t i = n_layers - 1; i-- > 0;) {
    const LayerSpec& layer = layers[i];
    const LayerParams& p = params.layers[i];
    const Eigen::MatrixXd& x = acts[i];
    const bool need_input_grad = i > 0;
    switch (layer.kind) {
      case LayerKind::dense: {
        LayerParams& out = grads.layers[i];
        out.weight.noalias() = g * x.transpose();
        out.bias = g.rowwise().sum();
        if (need_input_grad) g = p.weight.transpose() * g;
        break;
      }
      case LayerKind::conv1d: {
        LayerParams& out = grads.layers[i];
        Eigen::MatrixXd grad_in;
        kernels::conv1d_backward(p.weight, x, g, layer.in_channels, out.weight, out.bias,
                                 need_input_grad ? &grad_in : nullptr);
        if (need_input_grad) g = std::move(grad_in);
        break;
      }
      case LayerKind::relu: g = (x.array() > 0.0).select(g, 0.0); break;
      case LayerKind::flatten: break;
      case LayerKind::softmax: throw Error("network", "spec_error", "softmax must be the last layer");
    }
  }
  return grads;
}

double mean_loss(const Parameters& params, const EncodedMatrix& data) {
  constexpr std::size_t kChunk = 1024;
  double total = 0.0;
  for (std::size_t start = 0; start < data.rows(); start += kChunk) {
    const std::size_t n = std::min(kChunk, data.rows() - start);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), start);
    const Eigen::MatrixXd x = gather_columns(data.values, idx);
    std::vector<Eigen::MatrixXd> acts;
    run_forward(params, x, &acts);
    const Eigen::MatrixXd log_p = kernels::log_softmax(acts[acts.size() - 2]);
    for (std::size_t b = 0; b < n; ++b) total -= log_p(data.labels[start + b], static_cast<Eigen::Index>(b));
  }
  return total / static_cast<double>(data.rows());
}

TrainResult train(const EncodedMatrix& data, const NetworkSpec& spec, const TrainConfig& config) {
  config.validate();
  if (data.count(0) == 0 || data.count(1) == 0) {
    throw Error("network", "train_error", "training data needs at least one row per class");
  }
  if (data.cols() != static_cast<std::size_t>(spec.input_len)) {
    throw Error("network", "shape_mismatch", "training data width does not match the spec input length");
  }
  if (!data.values.allFinite()) throw Error("network", "non_finite_input", "training data contains non-finite values");

  TrainResult result;
  result.params = init_params(spec, config.seed, config.init_scheme);
  Parameters& params = result.params;

  std::vector<LayerParams> velocity(params.layers.size());
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    velocity[i].weight = Eigen::MatrixXd::Zero(params.layers[i].weight.rows(), params.layers[i].weight.cols());
    velocity[i].bias = Eigen::VectorXd::Zero(params.layers[i].bias.size());
  }

  std::mt19937_64 rng(config.seed ^ 0x5eedba7c4ULL);
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  std::vector<std::size_t> batch(static_cast<std::size_t>(config.batch_size));
  std::vector<int> labels(batch.size());

  for (int it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch[b] = order[cursor++];
      labels[b] = data.labels[batch[b]];
    }
    const Eigen::MatrixXd x = gather_columns(data.values, batch);
    const Gradients grads = loss_and_gradient(params, x, labels);
    if (!std::isfinite(grads.loss)) {
      std::ostringstream msg;
      msg << "loss became non-finite at iteration " << it << "; batch rows";
      for (std::size_t b = 0; b < std::min<std::size_t>(batch.size(), 10); ++b) msg << ' ' << batch[b];
      if (batch.size() > 10) msg << " ...";
      throw Error("network", "non_finite_loss", msg.str());
    }
    if (it == 1 || it % 100 == 0 || it == config.max_iterations) {
      const Eigen::MatrixXd probs = run_forward(params, x, nullptr);
      int correct = 0;
      for (Eigen::Index b = 0; b < probs.cols(); ++b) {
        correct += ((probs(1, b) > probs(0, b)) ? 1 : 0) == labels[static_cast<std::size_t>(b)];
      }
      result.history.push_back({it, grads.loss, static_cast<double>(correct) / static_cast<double>(batch.size())});
    }
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
      if (!spec.layers[i].has_parameters()) continue;
      velocity[i].weight = config.momentum * velocity[i].weight - config.learning_rate * grads.layers[i].weight;
      velocity[i].bias = config.momentum * velocity[i].bias - config.learning_rate * grads.layers[i].bias;
      params.layers[i].weight += velocity[i].weight;
      params.layers[i].bias += velocity[i].bias;
    }
  }
  return result;
}

GradCheckResult grad_check(const Parameters& params, const Eigen::MatrixXd& inputs, std::span<const int> labels,
                           double h, std::size_t coordinates, std::uint64_t seed) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw Error("network", "config_error", "grad_check step must lie in [1e-7, 1e-3]");
  const Gradients analytic = loss_and_gradient(params, inputs, labels);
  std::vector<std::size_t> param_layers;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    if (params.spec.layers[i].has_parameters()) param_layers.push_back(i);
  }
  Parameters probe = params;
  std::mt19937_64 rng(seed);
  GradCheckResult result;
  const std::size_t per_layer = std::max<std::size_t>(1, (coordinates + param_layers.size() - 1) / param_layers.size());
  for (std::size_t layer : param_layers) {
    LayerParams& p = probe.layers[layer];
    const std::size_t n_weights = static_cast<std::size_t>(p.weight.size());
    const std::size_t n_total = n_weights + static_cast<std::size_t>(p.bias.size());
    std::uniform_int_distribution<std::size_t> pick(0, n_total - 1);
    for (std::size_t s = 0; s < per_layer; ++s) {
      // first draw of every layer is a bias so biases are always covered
      const std::size_t k = s == 0 ? n_weights + pick(rng) % static_cast<std::size_t>(p.bias.size()) : pick(rng);
      double* slot = k < n_weights ? p.weight.data() + k : p.bias.data() + (k - n_weights);
      const double g = k < n_weights ? analytic.layers[layer].weight.data()[k]
                                     : analytic.layers[layer].bias.data()[k - n_weights];
      const double saved = *slot;
      *slot = saved + h;
      const double up = loss_and_gradient(probe, inputs, labels).loss;
      *slot = saved - h;
      const double down = loss_and_gradient(probe, inputs, labels).loss;
      *slot = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double rel = std::abs(g - numeric) / std::max({std::abs(g), std::abs(numeric), 1e-8});
      result.max_relative_error = std::max(result.max_relative_error, rel);
      ++result.coordinates;
    }
  }
  return result;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"max_iterations", c.max_iterations},
       {"momentum", c.momentum},           {"seed", c.seed},             {"init_scheme", c.init_scheme}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.momentum = j.at("momentum").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_scheme = j.at("init_scheme").get<std::string>();
}

nlohmann::json checkpoint_to_json(const Checkpoint& ck) {
  const Parameters& params = ck.params;
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const LayerSpec& l = params.spec.layers[i];
    if (!l.has_parameters()) continue;
    const LayerParams& p = params.layers[i];
    layers.push_back({{"index", i},
                      {"kind", to_string(l.kind)},
                      {"weight_shape", {p.weight.rows(), p.weight.cols()}},
                      {"weight", std::vector<double>(p.weight.data(), p.weight.data() + p.weight.size())},
                      {"bias", std::vector<double>(p.bias.data(), p.bias.data() + p.bias.size())}});
  }
  return {{"format", kCheckpointFormat},
          {"spec", params.spec.text},
          {"input_len", params.spec.input_len},
          {"kernel_width", params.spec.options.kernel_width},
          {"relu_every_conv", params.spec.options.relu_every_conv},
          {"init", {{"scheme", params.init_scheme}, {"seed", params.seed}}},
          {"train", ck.train_config},
          {"layers", layers},
          {"encoder", ck.encoder},
          {"encoder_fingerprint", ck.encoder.fingerprint()},
          {"metadata", ck.metadata}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string{}) != kCheckpointFormat) {
      throw Error("network", "format_version",
                  "checkpoint format '" + j.value("format", std::string{"<none>"}) + "' is not " + kCheckpointFormat);
    }
    Checkpoint ck;
    SpecOptions options;
    options.kernel_width = j.at("kernel_width").get<int>();
    options.relu_every_conv = j.at("relu_every_conv").get<bool>();
    const NetworkSpec spec = parse_spec(j.at("spec").get<std::string>(), j.at("input_len").get<int>(), options);
    ck.params = init_params(spec, j.at("init").at("seed").get<std::uint64_t>(), "zeros");
    ck.params.init_scheme = j.at("init").at("scheme").get<std::string>();
    std::size_t seen = 0;
    for (const auto& layer : j.at("layers")) {
      const auto i = layer.at("index").get<std::size_t>();
      if (i >= spec.layers.size() || !spec.layers[i].has_parameters()) {
        throw Error("network", "shape_mismatch", "checkpoint layer " + std::to_string(i) + " has no parameters in spec");
      }
      LayerParams& p = ck.params.layers[i];
      const auto shape = layer.at("weight_shape").get<std::vector<Eigen::Index>>();
      const auto weight = layer.at("weight").get<std::vector<double>>();
      const auto bias = layer.at("bias").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != p.weight.rows() || shape[1] != p.weight.cols() ||
          static_cast<Eigen::Index>(weight.size()) != p.weight.size() ||
          static_cast<Eigen::Index>(bias.size()) != p.bias.size()) {
        throw Error("network", "shape_mismatch", "checkpoint layer " + std::to_string(i) + " does not match the spec");
      }
      p.weight = Eigen::Map<const Eigen::MatrixXd>(weight.data(), p.weight.rows(), p.weight.cols());
      p.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), p.bias.size());
      ++seen;
    }
    std::size_t expected = 0;
    for (const auto& l : spec.layers) expected += l.has_parameters();
    if (seen != expected) throw Error("network", "shape_mismatch", "checkpoint is missing layers");
    ck.train_config = j.at("train").get<TrainConfig>();
    ck.encoder = j.at("encoder").get<EncoderState>();
    ck.metadata = j.value("metadata", nlohmann::json::object());
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw Error("network", "checkpoint_corrupt", std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("network", "io", "cannot write " + path.string());
  out << checkpoint_to_json(checkpoint).dump() << '\n';
  if (!out) throw Error("network", "io", "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("network", "io", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("network", "checkpoint_corrupt", path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace tabxai
