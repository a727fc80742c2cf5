#include "topofuse/csv.hpp"

#include <charconv>
#include <fstream>

#include "topofuse/error.hpp"

namespace topofuse::csv {

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV file: " + path.string());
  table.header = split_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("non-numeric value '" + field + "' in " + context);
  return v;
}

long long parse_int(const std::string& field, const std::string& context) {
  long long v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("non-integer value '" + field + "' in " + context);
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, ptr);
}

void require_plain_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") != std::string::npos) {
    throw Error("field contains a comma, quote or newline: " + field);
  }
}

}  // namespace topofuse::csv
