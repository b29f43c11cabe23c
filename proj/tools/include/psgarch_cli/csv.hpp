#pragma once

#include <optional>
#include <string>
#include <vector>

namespace psgarch::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;   // throws InvalidInput when absent
};

// Comma-separated text with a mandatory header row. Blank lines are
// ignored; every other row must have as many fields as the header.
Table read_csv(const std::string& path);
Table parse_csv(const std::string& text, const std::string& source = "<memory>");

// Strict decimal parse of a whole field (leading/trailing blanks allowed).
std::optional<double> parse_number(const std::string& field);

// One numeric column; any unparsable entry is an InvalidInput naming the row.
std::vector<double> numeric_column(const Table& table, const std::string& name);
// ISO-8601 dates (YYYY-MM-DD, optionally followed by a time part).
std::vector<std::string> date_column(const Table& table, const std::string& name);

// Shortest text that reads back as the same double.
std::string format_number(double x);

}  // namespace psgarch::cli
