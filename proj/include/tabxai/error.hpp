#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tabxai {

/// Structured failure raised by every module. `module` names the component
/// (data, network, lrp, ...) and `code` is a short machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), code_(std::move(code)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }

 private:
  std::string module_;
  std::string code_;
};

}  // namespace tabxai
