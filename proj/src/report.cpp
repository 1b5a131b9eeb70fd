#include "meva/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace meva {

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns.size()) throw InvalidInput("CsvTable: cell count mismatch");
  rows.push_back(cells);
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::string csv_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  if (!std::getline(in, line)) throw ParseError("read_csv: empty file " + path);
  table.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.columns.size()) throw ParseError("read_csv: ragged row in " + path);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void KeyValueFile::set(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
void KeyValueFile::set(const std::string& key, double value) { entries.emplace_back(key, csv_cell(value)); }
void KeyValueFile::set(const std::string& key, std::uint64_t value) { entries.emplace_back(key, std::to_string(value)); }

const std::string* KeyValueFile::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

void write_key_values(const KeyValueFile& kv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_key_values: cannot open " + path);
  for (const auto& [k, v] : kv.entries) out << k << " = " << v << '\n';
}

KeyValueFile read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_key_values: cannot open " + path);
  KeyValueFile kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    kv.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

}  // namespace meva
