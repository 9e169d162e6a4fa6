#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bgmo::data {

struct Dataset {
  std::string name;
  std::vector<double> values;

  std::size_t n_obs() const { return values.size(); }
};

enum class Format { Auto, Whitespace, Csv };

// Parse failure with a 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// Text format: numbers separated by whitespace (Whitespace) or commas and
// whitespace (Csv); lines whose first non-blank character is '#' are
// comments. Auto picks Csv when any data line has a comma.
Dataset parse_dataset(std::string_view text, Format format = Format::Auto,
                      std::string name = "data");

// Throws std::runtime_error when the file cannot be read, ParseError on bad
// content or when no numbers are present.
Dataset load_dataset(const std::string& path, Format format = Format::Auto);

// One value per line in shortest round-trip form, after a '# name' line.
void save_dataset(const Dataset& ds, const std::string& path);

// turbocharger, nicotine, carbon_fibres.
Dataset builtin_dataset(std::string_view name);
std::vector<std::string> builtin_names();

// "builtin:<name>" or a file path.
Dataset resolve_dataset(const std::string& source, Format format = Format::Auto);

}  // namespace bgmo::data
