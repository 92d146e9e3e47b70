#include "sbm/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbm/error.hpp"

namespace sbm::report {

namespace {

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct V {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      if (std::isfinite(v)) return v;
      return format_number(v);
    }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
  if (!f) throw ConfigError("write failed for " + p.string());
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

Table& Document::table(std::string name, std::vector<std::string> columns) {
  tables.push_back({std::move(name), std::move(columns), {}});
  return tables.back();
}

void Document::append(Document other) {
  for (auto& t : other.tables) {
    t.name = other.command + "_" + t.name;
    tables.push_back(std::move(t));
  }
  summary[other.command] = std::move(other.summary);
  passed = passed && other.passed;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string provenance_quadrature(double tol) { return "quadrature(" + format_number(tol) + ")"; }

std::string provenance_monte_carlo(std::size_t paths, unsigned long long seed) {
  return "monte-carlo(" + std::to_string(paths) + "," + std::to_string(seed) + ")";
}

std::string to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["command"] = doc.command;
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.header) h[k] = v;
  j["header"] = h;
  j["passed"] = doc.passed;
  j["summary"] = doc.summary;
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  for (const auto& t : doc.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json row = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < r.size(); ++i) row[t.columns[i]] = cell_json(r[i]);
      rows.push_back(std::move(row));
    }
    tables[t.name] = std::move(rows);
  }
  j["tables"] = std::move(tables);
  return j.dump(2) + "\n";
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_escape(table.columns[i]);
  out += '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_escape(cell_text(r[i]));
    out += '\n';
  }
  return out;
}

std::string to_txt(const Document& doc) {
  std::ostringstream os;
  os << "# " << doc.command << "\n";
  for (const auto& [k, v] : doc.header) os << "# " << k << ": " << v << "\n";
  os << "# passed: " << (doc.passed ? "true" : "false") << "\n";
  for (const auto& t : doc.tables) {
    os << "\n[" << t.name << "]\n";
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    std::vector<std::vector<std::string>> text;
    for (const auto& r : t.rows) {
      text.emplace_back();
      for (std::size_t i = 0; i < r.size(); ++i) {
        text.back().push_back(cell_text(r[i]));
        width[i] = std::max(width[i], text.back().back().size());
      }
    }
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += "  ";
        s += cells[i];
        if (i + 1 < cells.size()) s.append(width[i] - cells[i].size(), ' ');
      }
      os << s << "\n";
    };
    line(t.columns);
    for (const auto& r : text) line(r);
  }
  if (!doc.summary.empty()) os << "\n[summary]\n" << doc.summary.dump(2) << "\n";
  return os.str();
}

std::vector<std::filesystem::path> write(const Document& doc, const std::filesystem::path& dir,
                                         std::span<const std::string> formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> out;
  for (const auto& f : formats) {
    if (f == "json") {
      out.push_back(dir / (doc.command + ".json"));
      write_file(out.back(), to_json(doc));
    } else if (f == "txt") {
      out.push_back(dir / (doc.command + ".txt"));
      write_file(out.back(), to_txt(doc));
    } else if (f == "csv") {
      for (const auto& t : doc.tables) {
        out.push_back(dir / (doc.command + "_" + t.name + ".csv"));
        write_file(out.back(), to_csv(t));
      }
    } else {
      throw ConfigError("unknown output format '" + f + "'");
    }
  }
  return out;
}

}  // namespace sbm::report
