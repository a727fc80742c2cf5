// Minimal comma-separated I/O for the numeric tables this project exchanges.
// Fields never contain commas, quotes or newlines.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace topofuse::csv {

std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Every data row must have exactly header.size() fields.
Table read(const std::filesystem::path& path);

double parse_double(const std::string& field, const std::string& context);
long long parse_int(const std::string& field, const std::string& context);

/// Shortest text that parses back to the identical double.
std::string format_double(double v);

/// Rejects text that would break the table layout.
void require_plain_field(const std::string& field);

}  // namespace topofuse::csv
