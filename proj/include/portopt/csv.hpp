#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace portopt {

/// Flat numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ConfigError when absent.
  int column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Reads a numeric CSV. IoError when unreadable, ConfigError when the
/// content is not a rectangular numeric table.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes with %.17g so doubles round-trip exactly.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

std::string format_double(double x);

}  // namespace portopt
