#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

namespace iongate {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";
// Identifies the random-number pipeline (engine + distributions) for bit-exact replay.
inline constexpr const char* kRngVersion = "mt19937_64/libstdc++-distributions/1";

// Fixed 17-significant-digit formatting (round-trips every double).
std::string format_double(double x);

using Cell = std::variant<double, std::int64_t, std::string>;

// Column-named table with one header line when written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
  Json to_json() const;  // array of objects, column order preserved
};

// Parses CSV written by Table::to_csv; every cell is kept as text.
struct CsvText {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvText parse_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// {config_hash, seed, outputs, versions}.
Json result_envelope(const std::string& config_hash, std::uint64_t seed, Json outputs);

// Evaluates f(0..n-1) on `jobs` threads; results are ordered by index and the
// first exception (lowest index) is rethrown.
template <class F>
auto parallel_map(std::size_t n, unsigned jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Seed for item `index` of a stream identified by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace iongate
