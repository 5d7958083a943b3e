#include <cmath>
#include <fstream>
#include <sstream>

#include "idlab/errors.hpp"
#include "idlab/stats.hpp"

namespace idlab {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "nan" || s == "NaN";
}

}  // namespace

MetricTable load_metric_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metric table " + path.string());
  MetricTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv(line);
    if (!have_header) {
      if (cells.empty() || cells.front() != "dataset_id") {
        throw SchemaError(path.string() + ": first column must be dataset_id");
      }
      t.columns.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 1) {
      throw FormatError(path.string() + " line " + std::to_string(lineno) + ": expected " +
                        std::to_string(t.columns.size() + 1) + " fields, got " +
                        std::to_string(cells.size()));
    }
    t.row_ids.push_back(cells.front());
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      if (is_missing(cells[j])) {
        row.push_back(std::nan(""));
        continue;
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[j], &used);
        if (used != cells[j].size() || !std::isfinite(v)) throw std::invalid_argument("bad");
        row.push_back(v);
      } catch (const std::exception&) {
        throw FormatError(path.string() + " line " + std::to_string(lineno) + ": bad value '" +
                          cells[j] + "' in column " + t.columns[j - 1]);
      }
    }
    t.cells.push_back(std::move(row));
  }
  if (!have_header) throw FormatError(path.string() + " has no header row");
  t.validate();
  return t;
}

void save_metric_table(const std::filesystem::path& path, const MetricTable& table) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metric table " + path.string());
  out.precision(17);
  out << "dataset_id";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < table.row_ids.size(); ++i) {
    out << table.row_ids[i];
    for (double v : table.cells[i]) {
      out << ',';
      if (std::isfinite(v)) out << v;
    }
    out << '\n';
  }
}

}  // namespace idlab
