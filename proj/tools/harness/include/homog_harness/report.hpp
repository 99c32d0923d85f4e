#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace homog::harness {

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in"
  double lo = 0.0, hi = 0.0;
  bool pass = false;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN is written as an empty field
};

using Series = std::vector<std::pair<double, double>>;

/// Everything one run produces. Tables, plot series and checks are keyed by name
/// and written in key order, so output does not depend on evaluation order.
class Report {
 public:
  nlohmann::json summary = nlohmann::json::object();
  std::map<std::string, Table> tables;  // file stem -> table
  std::map<std::string, Series> plots;  // file stem -> log-log series

  void at_most(const std::string& name, double value, double bound);
  void at_least(const std::string& name, double value, double bound);
  void within(const std::string& name, double value, double lo, double hi);
  /// A pipeline error at one point: recorded, the run continues.
  void point_failed(const std::string& point, const std::string& error);
  void flag(const std::string& name) { flags_.push_back(name); }

  bool passed() const;
  const std::vector<Check>& checks() const { return checks_; }

  /// summary.json, <table>.csv, <plot>.dat and optionally <plot>.svg into dir.
  void write(const std::string& dir, const nlohmann::json& metadata, bool svg) const;

 private:
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, std::string>> failures_;
  std::vector<std::string> flags_;
};

/// "%.17g", or empty for NaN.
std::string csv_number(double x);

/// Minimal log-log line chart.
std::string svg_loglog(const std::string& title, const Series& s);

}  // namespace homog::harness
