#include "tabxai/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tabxai/error.hpp"

namespace tabxai::csv {

namespace {

// Splits one record starting at `pos`; advances `pos` past the record
// terminator. Quoted fields may span lines.
std::vector<std::string> next_record(const std::string& text, std::size_t& pos, std::size_t line,
                                     const std::string& source) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
        ++pos;
        continue;
      }
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty() || was_quoted) {
        throw Error("data", "csv_syntax",
                    source + ": stray quote in line " + std::to_string(line));
      }
      in_quotes = true;
      was_quoted = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
      ++pos;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(c);
      ++pos;
    }
  }
  if (in_quotes) {
    throw Error("data", "csv_syntax", source + ": unterminated quote in line " + std::to_string(line));
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

Document parse(const std::string& text, const std::string& source) {
  Document doc;
  std::size_t pos = 0;
  std::size_t line = 1;
  // skip UTF-8 BOM
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) pos = 3;
  bool have_header = false;
  while (pos < text.size()) {
    if (!have_header && text[pos] == '#') {
      const auto eol = text.find('\n', pos);
      pos = eol == std::string::npos ? text.size() : eol + 1;
      ++line;
      continue;
    }
    if (text[pos] == '\n' || text[pos] == '\r') {
      // blank line
      if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      ++line;
      continue;
    }
    auto fields = next_record(text, pos, line, source);
    if (!have_header) {
      doc.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != doc.header.size()) {
        throw Error("data", "ragged_row",
                    source + ": line " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                        " fields, header has " + std::to_string(doc.header.size()));
      }
      doc.rows.push_back(std::move(fields));
    }
    ++line;
  }
  if (!have_header) throw Error("data", "missing_header", source + ": no header row");
  return doc;
}

Document read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("data", "io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace tabxai::csv
