#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cpred/dataset.hpp"

namespace cpred::io {

/// Shortest round-trip decimal representation of v ("inf"/"nan" spelled out).
/// Every numeric cell written by this toolkit goes through here so outputs
/// are byte-stable.
std::string format_double(double v);

/// Raw CSV contents: a header row plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: quoted fields, escaped quotes, CRLF or LF line ends.
/// The first record is the header. Throws IoError when the file cannot be
/// opened and ValidationError on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

/// RFC-4180 writer: fields containing separators, quotes, or line breaks are
/// quoted; records end with CRLF.
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Reads a CSV file and binds the named columns into a Dataset. Only the
/// referenced columns are parsed as numbers.
Dataset read_dataset(const std::filesystem::path& path,
                     const std::string& response,
                     const std::vector<std::string>& predictors,
                     const std::vector<std::string>& covariates = {});

}  // namespace cpred::io
