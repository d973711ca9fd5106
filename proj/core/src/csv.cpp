#include "cpred/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "cpred/errors.hpp"

namespace cpred::io {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw ValidationError("failed to format a number");
  return std::string(buf, ptr);
}

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;

  std::size_t i = 0;
  const std::size_t n = text.size();
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  while (i < n) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        ++i;
        break;
      case ',':
        end_field();
        any = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field.push_back(c);
        any = true;
        ++i;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto records = parse_records(buffer.str());
  if (records.empty()) {
    throw ValidationError(
        fmt::format("'{}' is empty: expected a CSV header row", path.string()));
  }
  CsvTable table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ValidationError(fmt::format(
          "'{}' has a record with {} fields, header has {}", path.string(),
          row.size(), table.header.size()));
    }
  }
  return table;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_record = [&](const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out << ',';
      out << quote_if_needed(record[i]);
    }
    out << "\r\n";
  };
  write_record(table.header);
  for (const auto& row : table.rows) write_record(row);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_csv(out, table);
  out.flush();
  if (!out) {
    throw IoError(fmt::format("failed writing '{}'", path.string()));
  }
}

Dataset read_dataset(const std::filesystem::path& path,
                     const std::string& response,
                     const std::vector<std::string>& predictors,
                     const std::vector<std::string>& covariates) {
  const CsvTable table = read_csv(path);

  std::vector<std::string> wanted;
  wanted.push_back(response);
  wanted.insert(wanted.end(), predictors.begin(), predictors.end());
  wanted.insert(wanted.end(), covariates.begin(), covariates.end());

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  for (const auto& name : wanted) {
    if (std::any_of(columns.begin(), columns.end(),
                    [&](const auto& c) { return c.first == name; })) {
      continue;
    }
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      throw ValidationError(fmt::format(
          "column '{}' not found in '{}'", name, path.string()));
    }
    const auto col = static_cast<std::size_t>(it - table.header.begin());
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& cell = table.rows[r][col];
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ValidationError(fmt::format(
            "column '{}', record {}: '{}' is not a number", name, r + 1,
            cell));
      }
      values.push_back(v);
    }
    columns.emplace_back(name, std::move(values));
  }
  return Dataset(std::move(columns), response, predictors, covariates);
}

}  // namespace cpred::io
