#pragma once

#include <string>
#include <vector>

#include "meva/common.hpp"

namespace meva {

/// Minimal CSV table: comma separator, '.' decimal, LF endings, doubles at 17
/// significant digits.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<std::string>& cells);
  int column_index(const std::string& name) const;  // -1 when absent
};

std::string csv_cell(double v);

void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

/// `key = value` lines; '#' starts a comment. Used for run manifests and
/// config files.
struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);
  const std::string* find(const std::string& key) const;
};

void write_key_values(const KeyValueFile& kv, const std::string& path);
KeyValueFile read_key_values(const std::string& path);

}  // namespace meva
