#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tabxai::csv {

struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma separated, double-quote quoting, mandatory header. Lines starting
// with '#' before the header are treated as comments. Throws Error on ragged
// rows or a missing header.
Document read(const std::filesystem::path& path);
Document parse(const std::string& text, const std::string& source = "<memory>");

std::string quote(const std::string& field);
std::string format_number(double value);

}  // namespace tabxai::csv
