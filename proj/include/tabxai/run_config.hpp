#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tabxai {

/// Plain-text `key = value` configuration over a fixed set of documented
/// keys. Unknown keys are rejected; unset keys keep their defaults.
class RunConfig {
 public:
  RunConfig();

  static const std::vector<std::pair<std::string, std::string>>& defaults();
  static bool known(const std::string& key);

  /// Parses `key = value` lines; '#' starts a comment.
  void merge_text(const std::string& text, const std::string& source = "<memory>");
  void merge_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  /// Every key with its resolved value, sorted by key.
  std::string resolved_text() const;
  /// Hash of the resolved values that affect artifact contents (out.dir excluded).
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tabxai
