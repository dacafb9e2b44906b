#pragma once

// Tabular report emission. CSV uses ',' delimiter, '.' decimal point, a
// header line, and renders doubles with 17 significant digits so every
// value round-trips exactly; JSON mirrors the same fields. Same table in,
// same bytes out.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace distill {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(const std::string& s);
const char* format_extension(ReportFormat f);

std::string render_report(const ReportTable& table, ReportFormat format);

// Writes atomically (temp file + rename) so a failed run never leaves a
// partial report behind. Throws std::runtime_error with the path on I/O
// failure.
void write_report(const ReportTable& table, const std::string& path,
                  ReportFormat format);

// 17-significant-digit rendering used for every double in reports.
std::string format_double(double v);

}  // namespace distill
