#include "psgarch_cli/csv.hpp"

#include "psgarch/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace psgarch::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidInput("column '" + name + "' not found in header");
}

Table parse_csv(const std::string& text, const std::string& source) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      if (line_no == 1 && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw InvalidInput(source + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(t.header.size()) + " fields, found " +
                         std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw InvalidInput(source + ": missing header row");
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), path);
}

std::optional<double> parse_number(const std::string& field) {
  const std::string s = trim(field);
  if (s.empty()) return std::nullopt;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, v, std::chars_format::general);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<double> numeric_column(const Table& table, const std::string& name) {
  const std::size_t c = table.column(name);
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto v = parse_number(table.rows[r][c]);
    if (!v) {
      throw InvalidInput("row " + std::to_string(r + 1) + ": cannot parse '" + table.rows[r][c] +
                         "' in column '" + name + "'");
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> date_column(const Table& table, const std::string& name) {
  static const std::regex iso(R"(^\d{4}-\d{2}-\d{2}([T ][0-9:.+\-Z]*)?$)");
  const std::size_t c = table.column(name);
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& d = table.rows[r][c];
    if (!std::regex_match(d, iso)) {
      throw InvalidInput("row " + std::to_string(r + 1) + ": '" + d + "' is not an ISO-8601 date");
    }
    out.push_back(d);
  }
  return out;
}

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace psgarch::cli
