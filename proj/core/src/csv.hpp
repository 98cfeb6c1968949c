#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace advscore::detail {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and
// newlines; accepts LF and CRLF; strips a UTF-8 BOM; skips blank lines.
// Throws ParseError (with file:line context) on unterminated quotes and
// IoError when the file cannot be read.
std::vector<CsvRecord> read_csv(const std::filesystem::path& path);

// Quotes a field iff it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& value);

}  // namespace advscore::detail
