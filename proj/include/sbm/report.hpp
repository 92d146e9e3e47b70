#pragma once

#include <deque>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sbm::report {

using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row);
};

struct Document {
  std::string command;
  std::vector<std::pair<std::string, std::string>> header;
  std::deque<Table> tables;  // deque: references from table() stay valid
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  bool passed = true;

  Table& table(std::string name, std::vector<std::string> columns);
  void append(Document other);  // tables and summary of a sub-run, prefixed by its command
};

// shortest round-trip decimal; "nan", "inf", "-inf" for non-finite
std::string format_number(double x);
std::string provenance_quadrature(double tol);
std::string provenance_monte_carlo(std::size_t paths, unsigned long long seed);
inline const char* kSymbolic = "symbolic";

std::string to_json(const Document& doc);
std::string to_csv(const Table& table);
std::string to_txt(const Document& doc);

// Writes <command>.json, <command>.txt and <command>_<table>.csv as requested.
std::vector<std::filesystem::path> write(const Document& doc, const std::filesystem::path& dir,
                                         std::span<const std::string> formats);

}  // namespace sbm::report
