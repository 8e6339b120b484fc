// Command-line front end: tabxai <subcommand> [--config file] [--key value ...]
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabxai/error.hpp"
#include "tabxai/pipeline.hpp"
#include "tabxai/run_config.hpp"

namespace {

void print_error(const std::string& module, const std::string& code, const std::string& message) {
  nlohmann::json j = {{"error", {{"module", module}, {"code", code}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular 1D-CNN training with LRP, LIME and SHAP explanations"};
  app.require_subcommand(1, 1);
  app.fallthrough();  // allow options after the subcommand name

  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  app.add_option("-c,--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a key, as key=value (repeatable)");
  for (const auto& [key, def] : tabxai::RunConfig::defaults()) {
    app.add_option("--" + key, flags[key], "default: " + (def.empty() ? std::string("<unset>") : def));
  }
  for (const auto& name : tabxai::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    tabxai::RunConfig config;
    if (const char* out = std::getenv("TABXAI_OUT"); out && *out) config.set("out.dir", out);
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& [key, value] : flags) {
      if (app.count("--" + key)) config.set(key, value);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tabxai::Error("cli", "config_error", "--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    tabxai::run(app.get_subcommands().front()->get_name(), config, std::cerr);
  } catch (const tabxai::Error& e) {
    print_error(e.module(), e.code(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("cli", "internal", e.what());
    return 1;
  }
  return 0;
}
