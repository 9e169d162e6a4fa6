#include "bgmo/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace bgmo::detail {
const std::vector<std::pair<std::string_view, std::string_view>>& fixture_texts();
}

namespace bgmo::data {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool is_comment_or_blank(std::string_view line) {
  for (char c : line) {
    if (is_space(c)) continue;
    return c == '#';
  }
  return true;
}

double parse_number(std::string_view token, int line, int column) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("cannot parse '" + std::string(token) + "' as a finite number", line, column);
  }
  return value;
}

}  // namespace

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

Dataset parse_dataset(std::string_view text, Format format, std::string name) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (format == Format::Auto) {
    format = Format::Whitespace;
    for (auto line : lines) {
      if (!is_comment_or_blank(line) && line.find(',') != std::string_view::npos) {
        format = Format::Csv;
        break;
      }
    }
  }

  Dataset ds;
  ds.name = std::move(name);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string_view line = lines[li];
    if (is_comment_or_blank(line)) continue;
    const int line_no = static_cast<int>(li) + 1;
    std::size_t pos = 0;
    bool expect_value = true;  // Csv: a comma must be followed by a value
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      if (pos >= line.size()) break;
      if (line[pos] == ',' && format == Format::Csv) {
        if (expect_value) throw ParseError("empty field", line_no, static_cast<int>(pos) + 1);
        expect_value = true;
        ++pos;
        continue;
      }
      const std::size_t begin = pos;
      while (pos < line.size() && !is_space(line[pos]) &&
             !(format == Format::Csv && line[pos] == ',')) {
        ++pos;
      }
      const int column = static_cast<int>(begin) + 1;
      if (format == Format::Csv && !expect_value) {
        throw ParseError("missing comma between values", line_no, column);
      }
      ds.values.push_back(parse_number(line.substr(begin, pos - begin), line_no, column));
      expect_value = false;
    }
    if (format == Format::Csv && expect_value && !ds.values.empty() &&
        line.find(',') != std::string_view::npos) {
      throw ParseError("trailing comma", line_no, static_cast<int>(line.size()));
    }
  }
  if (ds.values.empty()) throw ParseError("dataset contains no values", 1, 1);
  return ds;
}

Dataset load_dataset(const std::string& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), format, path);
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
  out << "# " << ds.name << '\n';
  char buf[64];
  for (double v : ds.values) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing dataset file '" + path + "'");
}

Dataset builtin_dataset(std::string_view name) {
  for (const auto& [key, text] : detail::fixture_texts()) {
    if (key == name) return parse_dataset(text, Format::Whitespace, std::string(key));
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::runtime_error("unknown builtin dataset '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& entry : detail::fixture_texts()) out.emplace_back(entry.first);
  return out;
}

Dataset resolve_dataset(const std::string& source, Format format) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_dataset(source.substr(prefix.size()));
  return load_dataset(source, format);
}

}  // namespace bgmo::data
