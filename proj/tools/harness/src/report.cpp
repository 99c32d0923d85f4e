#include "homog_harness/report.hpp"

#include "homog/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace homog::harness {
namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::DataError, "cannot write " + p.string());
  f << text;
}

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string csv_number(double x) {
  if (std::isnan(x)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Report::at_most(const std::string& name, double value, double bound) {
  checks_.push_back({name, value, "<=", bound, bound, value <= bound});
}

void Report::at_least(const std::string& name, double value, double bound) {
  checks_.push_back({name, value, ">=", bound, bound, value >= bound});
}

void Report::within(const std::string& name, double value, double lo, double hi) {
  checks_.push_back({name, value, "in", lo, hi, value >= lo && value <= hi});
}

void Report::point_failed(const std::string& point, const std::string& error) { failures_.emplace_back(point, error); }

bool Report::passed() const {
  return failures_.empty() && std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

void Report::write(const std::string& dir, const nlohmann::json& metadata, bool svg) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::DataError, "cannot create " + dir + ": " + ec.message());

  nlohmann::json out = summary;
  out["metadata"] = metadata;
  nlohmann::json checks = nlohmann::json::object();
  for (const Check& c : checks_) {
    nlohmann::json j = {{"value", number(c.value)}, {"relation", c.relation}, {"pass", c.pass}};
    if (c.relation == "in") {
      j["bound"] = {c.lo, c.hi};
    } else {
      j["bound"] = c.lo;
    }
    checks[c.name] = j;
  }
  out["checks"] = checks;
  nlohmann::json failures = nlohmann::json::object();
  for (const auto& [point, error] : failures_) failures[point] = error;
  out["failed_points"] = failures;
  std::vector<std::string> flags = flags_;
  std::sort(flags.begin(), flags.end());
  flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
  out["flags"] = flags;
  out["pass"] = passed();
  write_file(fs::path(dir) / "summary.json", out.dump(2) + "\n");

  for (const auto& [name, t] : tables) {
    std::string text;
    for (std::size_t i = 0; i < t.columns.size(); ++i) text += (i ? "," : "") + t.columns[i];
    text += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_number(row[i]);
      text += "\n";
    }
    write_file(fs::path(dir) / (name + ".csv"), text);
  }
  for (const auto& [name, s] : plots) {
    std::string text;
    for (const auto& [x, y] : s) text += csv_number(x) + " " + csv_number(y) + "\n";
    write_file(fs::path(dir) / (name + ".dat"), text);
    if (svg) write_file(fs::path(dir) / (name + ".svg"), svg_loglog(name, s));
  }
}

std::string svg_loglog(const std::string& title, const Series& s) {
  const double W = 480, H = 320, pad = 48;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : s)
    if (x > 0 && y > 0) pts.emplace_back(std::log10(x), std::log10(y));
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << pad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title
    << " (log10 axes)</text>\n";
  if (!pts.empty()) {
    double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
    auto py = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
    o << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) o << px(x) << "," << py(y) << " ";
    o << "\"/>\n";
    for (const auto& [x, y] : pts) o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    o << "<text x=\"" << pad << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">x: " << x0
      << " .. " << x1 << ", y: " << y0 << " .. " << y1 << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace homog::harness
