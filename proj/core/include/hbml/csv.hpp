#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hbml::csv {

/// A header plus string cells, as read from disk. No type conversion is done.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Position of a header name, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
Table parse(std::istream& in, const std::string& source_name = "<stream>");

std::vector<std::string> split_line(std::string_view line);

/// True for the two spellings of a missing cell: empty and ".".
bool is_missing(std::string_view cell);

/// Strict numeric conversion of a whole cell; nullopt when not a finite number.
std::optional<double> to_double(std::string_view cell);

/// Shortest round-tripping text for a value already quantized to `digits`
/// significant digits.
std::string format_number(double value, int digits = 9);

/// Round a value to `digits` significant decimal digits.
double quantize(double value, int digits = 9);

enum class WriteMode { Create, Replace, Append };

WriteMode write_mode(bool replace, bool append);

}  // namespace hbml::csv
