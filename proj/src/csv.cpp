#include "portopt/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "portopt/errors.hpp"

namespace portopt {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  throw ConfigError("missing CSV column: " + name);
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const int idx = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(idx)]);
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path.string());
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  }
  if (table.columns.empty()) throw ConfigError("headerless CSV: " + path.string());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin || *end != '\0') {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": not a number: '" << cell << "'";
        throw ConfigError(msg.str());
      }
      row.push_back(value);
    }
    if (row.size() != table.columns.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << table.columns.size()
          << " cells, got " << row.size();
      throw ConfigError(msg.str());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace portopt
