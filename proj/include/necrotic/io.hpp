#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "necrotic/spectral.hpp"
#include "necrotic/strip_elliptic.hpp"

namespace necrotic::io {

/// Bad or missing configuration entry; key() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// 17 significant digits, so every double round-trips.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// Writes through a sibling temp file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

/// Flat key=value text. '#' starts a comment; blank lines are skipped;
/// whitespace around keys and values is trimmed.
class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(line, "config line " + std::to_string(lineno) + ": expected key=value");
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) {
        throw ConfigError("", "config line " + std::to_string(lineno) + ": empty key");
      }
      cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read config file " + path.string());
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::optional<double> get_double(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, key + ": not a number: '" + it->second + "'");
    }
  }

  std::optional<int> get_int(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    try {
      std::size_t used = 0;
      const int v = std::stoi(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, key + ": not an integer: '" + it->second + "'");
    }
  }

  double require_double(const std::string& key) const {
    if (auto v = get_double(key)) return *v;
    throw ConfigError(key, "missing required key " + key);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

/// (x_j, rho_j) rows.
inline CsvTable curve_table(const BoundaryCurve& rho) {
  CsvTable t{{"x", "rho"}, {}};
  for (int j = 0; j < rho.size(); ++j) t.rows.push_back({BoundaryCurve::node(j, rho.size()), rho[j]});
  return t;
}

inline BoundaryCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("curve csv: empty input");
  std::vector<double> rho;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("curve csv: expected x,rho");
    rho.push_back(std::stod(line.substr(comma + 1)));
  }
  return BoundaryCurve(std::move(rho));
}

/// Header "m,n", then the sizes, then one line of n+1 values per x node.
inline std::string grid_dump(const GridFunction2D& g) {
  std::string out = "m,n\n" + std::to_string(g.m()) + "," + std::to_string(g.n()) + "\n";
  for (int j = 0; j < g.m(); ++j) {
    for (int l = 0; l <= g.n(); ++l) {
      if (l) out += ',';
      out += format_double(g(j, l));
    }
    out += '\n';
  }
  return out;
}

inline GridFunction2D read_grid_dump(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line != "m,n") throw std::runtime_error("grid dump: bad header");
  int m = 0, n = 0;
  char comma = 0;
  std::getline(in, line);
  std::istringstream sizes(line);
  sizes >> m >> comma >> n;
  if (!sizes || comma != ',' || m < 1 || n < 1) throw std::runtime_error("grid dump: bad sizes");
  GridFunction2D g(m, n);
  for (int j = 0; j < m; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("grid dump: truncated");
    std::istringstream row(line);
    std::string cell;
    for (int l = 0; l <= n; ++l) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("grid dump: short row");
      g(j, l) = std::stod(cell);
    }
  }
  return g;
}

}  // namespace necrotic::io
