#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tabxai/data.hpp"
#include "tabxai/run_config.hpp"

namespace tabxai {

const std::vector<std::string>& subcommands();

/// Runs one pipeline stage, reading earlier artifacts from and writing its
/// own into config `out.dir`. Progress goes to `log`. Throws Error on failure.
void run(const std::string& subcommand, const RunConfig& config, std::ostream& log);

/// Detects the bundled schemas from a CSV header ("telecom", "fraud" or "").
std::string detect_dataset(const std::vector<std::string>& header);

/// Encoded matrix round-trip used between stages (feature columns then `label`).
std::string encoded_csv(const EncodedMatrix& m, const std::string& comment = "");
EncodedMatrix read_encoded_csv(const std::filesystem::path& path);

}  // namespace tabxai
