#include "tabxai/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tabxai/error.hpp"
#include "tabxai/hash.hpp"

namespace tabxai {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error("cli", "config_error", "key '" + key + "' expects " + expected + ", got '" + value + "'");
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& RunConfig::defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"data.path", ""},
      {"data.schema", "auto"},
      {"data.label", ""},
      {"data.ratio", "0.8"},
      {"data.folds", "5"},
      {"data.seed", "42"},
      {"data.record_norm", "true"},
      {"smote.enabled", "true"},
      {"smote.k", "5"},
      {"smote.seed", "7"},
      {"model.spec", "C25-C50-C100-F2200-O2"},
      {"model.relu_every_conv", "false"},
      {"model.kernel_width", "3"},
      {"train.learning_rate", "1e-5"},
      {"train.batch_size", "300"},
      {"train.max_iterations", "15000"},
      {"train.momentum", "0.9"},
      {"train.seed", "1"},
      {"train.init", "fan_in_uniform"},
      {"cv.protocol", "heldout_test"},
      {"eval.cross_validate", "true"},
      {"lrp.rule", "epsilon"},
      {"lrp.epsilon", "1e-6"},
      {"lrp.alpha", "1"},
      {"lrp.beta", "0"},
      {"lrp.target", "predicted"},
      {"lime.n_perturbations", "10"},
      {"lime.noise_scale", "0.3"},
      {"lime.kernel_width", "0"},
      {"lime.ridge", "1e-3"},
      {"lime.seed", "11"},
      {"shap.mode", "sampled"},
      {"shap.n_permutations", "200"},
      {"shap.seed", "13"},
      {"explain.methods", "lrp,lime,shap"},
      {"explain.max_records", "200"},
      {"rank.tau", "0.5"},
      {"rank.per_class_top", "8"},
      {"rank.total", "16"},
      {"rank.top_k", "8"},
      {"reduce.specs", "C25-C50-C100-F2200-O2,C25-C50-C100-C200-F4000-F800-O2"},
      {"reduce.baseline", "true"},
      {"bench.records", "50"},
      {"bench.repetitions", "3"},
      {"out.dir", "out"},
  };
  return table;
}

bool RunConfig::known(const std::string& key) {
  const auto& d = defaults();
  return std::any_of(d.begin(), d.end(), [&](const auto& kv) { return kv.first == key; });
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known(key)) throw Error("cli", "unknown_key", "unknown configuration key '" + key + "'");
  values_[key] = value;
}

void RunConfig::merge_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("cli", "config_error", source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!known(key)) {
      throw Error("cli", "unknown_key", source + ":" + std::to_string(number) + ": unknown key '" + key + "'");
    }
    values_[key] = trim(line.substr(eq + 1));
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cli", "io_error", "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  merge_text(text.str(), path.string());
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error("cli", "unknown_key", "unknown configuration key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

int RunConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  Fnv1a h;
  for (const auto& [k, v] : values_) {
    if (k == "out.dir") continue;
    h.update(k);
    h.update(std::string_view("=", 1));
    h.update(v);
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

}  // namespace tabxai
