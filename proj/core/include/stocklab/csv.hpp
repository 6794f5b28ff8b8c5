#pragma once

#include <string>
#include <vector>

namespace stocklab {

/// Minimal RFC-4180-style CSV: comma separated, double-quote escaping,
/// first record is the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Throws DataError on a missing file or a row whose field count does not
/// match the header (reported with its 1-based row index).
CsvTable read_csv(const std::string& path);

std::string csv_escape(const std::string& field);

void write_csv(const std::string& path, const CsvTable& table);

/// Fixed formatting for floating-point CSV fields ("%.12g").
std::string format_double(double v);

}  // namespace stocklab
