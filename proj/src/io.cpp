#include "iongate/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "iongate/core.hpp"

namespace iongate {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("table row has " + std::to_string(row.size()) +
                                                " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
  return os.str();
}

Json Table::to_json() const {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < r.size(); ++i)
      std::visit([&](const auto& v) { obj[columns[i]] = v; }, r[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

CsvText parse_csv(const std::string& text) {
  CsvText out;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      out.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != out.header.size()) throw Error("CSV row has the wrong number of cells: " + line);
      out.rows.push_back(std::move(cells));
    }
  }
  if (first) throw Error("CSV input is empty");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("write failed for '" + path + "'");
}

Json result_envelope(const std::string& config_hash, std::uint64_t seed, Json outputs) {
  Json j = Json::object();
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["outputs"] = std::move(outputs);
  j["versions"] = {{"iongate", kVersion}, {"rng", kRngVersion}};
  return j;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 of the combined state.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace iongate
