#include "homog_harness/config.hpp"

#include "homog/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace homog::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> to_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto v = to_real(trim(item));
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

void check_type(const std::string& key, const std::string& value, ValueType t) {
  bool ok = true;
  switch (t) {
    case ValueType::integer: ok = to_int(value).has_value(); break;
    case ValueType::real: ok = to_real(value).has_value(); break;
    case ValueType::boolean: ok = to_bool(value).has_value(); break;
    case ValueType::real_list: ok = to_reals(value).has_value(); break;
    case ValueType::string:
    case ValueType::path: ok = !value.empty(); break;
  }
  if (!ok) fail("bad value for " + key + ": '" + value + "'");
}

}  // namespace

const std::map<std::string, KeySpec>& config_schema() {
  using T = ValueType;
  static const std::map<std::string, KeySpec> schema = {
      {"run.command", {T::string, "cell-solve | fiber-check | abstract-check | converge | evolve | scalar-example"}},
      {"run.seed", {T::integer, "seed for random probes, instances and coefficients"}},
      {"run.threads", {T::integer, "worker threads (0: HOMOG_THREADS or hardware)"}},
      {"run.out", {T::string, "output directory"}},
      {"run.svg", {T::boolean, "also write SVG line charts next to the plot data"}},

      {"problem.preset",
       {T::string, "harmonic_1d | constant | oscillatory_1d | random_smooth | divergence_free | scalar_schrodinger | grid"}},
      {"problem.d", {T::integer, "dimension (constant, random_smooth, scalar_schrodinger, grid)"}},
      {"problem.n", {T::integer, "unknowns per point (constant, random_smooth, grid)"}},
      {"problem.mean", {T::real, "harmonic_1d: mean of g"}},
      {"problem.amp", {T::real, "harmonic_1d: cosine amplitude of g"}},
      {"problem.g_value", {T::real, "constant: g = g_value times identity"}},
      {"problem.harmonics", {T::integer, "random_smooth: lattice harmonics per coefficient"}},
      {"problem.amplitude", {T::real, "random_smooth: harmonic amplitude relative to the mean"}},
      {"problem.coef_seed", {T::integer, "random_smooth: coefficient seed (defaults to run.seed)"}},
      {"problem.lower_order", {T::boolean, "oscillatory_1d, random_smooth: include a_j and Q"}},
      {"problem.weight", {T::boolean, "oscillatory_1d, random_smooth: include the weight f"}},
      {"problem.lambda", {T::string, "number, or 'auto' for an admissible value"}},
      {"problem.a1_re", {T::real, "divergence_free: constant a_1, real part"}},
      {"problem.a1_im", {T::real, "divergence_free: constant a_1, imaginary part"}},
      {"problem.a2_re", {T::real, "divergence_free: constant a_2, real part"}},
      {"problem.a2_im", {T::real, "divergence_free: constant a_2, imaginary part"}},
      {"problem.g_amp", {T::real, "scalar_schrodinger: metric amplitude"}},
      {"problem.A_amp", {T::real, "scalar_schrodinger: magnetic potential amplitude"}},
      {"problem.v_amp", {T::real, "scalar_schrodinger: real vector field amplitude"}},
      {"problem.V_amp", {T::real, "scalar_schrodinger: electric potential amplitude"}},
      {"problem.g_file", {T::path, "grid: m x m coefficient g, m = d n"}},
      {"problem.f_file", {T::path, "grid: n x n weight f (optional)"}},
      {"problem.q_file", {T::path, "grid: n x n potential Q (optional)"}},

      {"discretization.modes", {T::integer, "Fourier truncation N_modes (>= 4)"}},
      {"discretization.kgrid", {T::integer, "quasimomentum points per axis"}},
      {"discretization.grid_factor", {T::integer, "quadrature points per mode and axis"}},

      {"sweep.eps", {T::real_list, "eps values in (0, 1], strictly decreasing"}},
      {"sweep.s", {T::real_list, "times s > 0"}},
      {"sweep.mode", {T::string, "principal | corrected | both"}},
      {"sweep.box_length", {T::real, "box side; box_length / eps must be an integer"}},
      {"sweep.probes", {T::integer, "random wave-packet probes"}},
      {"sweep.probe_cutoff", {T::real, "physical frequency radius of the probe centres"}},
      {"sweep.variant", {T::string, "smoothed | unsmoothed corrector"}},
      {"sweep.rate", {T::real, "envelope decay constant; measured when absent"}},

      {"evolve.centre", {T::real, "initial packet: physical frequency along the first axis"}},
      {"evolve.width", {T::real, "initial packet: spatial width"}},
      {"evolve.source", {T::string, "none | decaying"}},
      {"evolve.p_norm", {T::real, "time exponent p of the source norm"}},
      {"evolve.steps", {T::integer, "Duhamel midpoint steps"}},
      {"evolve.quad_tol", {T::real, "relative change allowed under step halving"}},

      {"abstract.instances", {T::integer, "random families"}},
      {"abstract.dim", {T::integer, "largest dimension of H"}},
      {"abstract.n", {T::integer, "largest kernel dimension"}},
      {"abstract.tau_steps", {T::integer, "dyadic tau values per order fit"}},
      {"abstract.degenerate", {T::boolean, "add a direct sum with a doubled germ spectrum"}},

      {"check.expect_g0", {T::real, "cell-solve: expected g0 (1 x 1 problems)"}},
      {"check.g0_tol", {T::real, "cell-solve: tolerance on expect_g0"}},
      {"check.bracket_tol", {T::real, "cell-solve: slack in harmonic <= g0 <= mean"}},
      {"check.residual_tol", {T::real, "cell-solve: relative cell residual"}},
      {"check.cross_tol", {T::real, "fiber-check: abstract vs explicit, Z and L"}},
      {"check.cross_n_tol", {T::real, "fiber-check: abstract vs explicit, N"}},
      {"check.envelope_spread", {T::real, "fiber-check: allowed spread of per-time constants"}},
      {"check.slope_min", {T::real, "converge: lower slope bound (corrected)"}},
      {"check.slope_max", {T::real, "converge: upper slope bound (corrected)"}},
      {"check.principal_slope_min", {T::real, "converge: lower slope bound (principal)"}},
      {"check.principal_slope_max", {T::real, "converge: upper slope bound (principal)"}},
      {"check.envelope_slack", {T::real, "evolve: allowed shortfall of the error slope below the envelope slope"}},
      {"check.floor", {T::real, "errors at or below this count as exact agreement"}},
      {"check.orders", {T::real_list, "abstract-check: minimum orders of the four threshold expansions"}},
      {"check.mdecomp_tol", {T::real, "abstract-check: closed form vs quadrature"}},
      {"check.nstar_tol", {T::real, "abstract-check: off-diagonal part for n = 1"}},
      {"check.scalar_tol", {T::real, "scalar-example: closed forms vs generic pipeline"}},
      {"check.corrector_tol", {T::real, "scalar-example: commuted vs generic corrector"}},
  };
  return schema;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::stringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where + ": expected key = value");
    if (section.empty()) fail(where + ": key outside a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (c.values_.count(key)) fail(where + ": duplicate key " + key);
    try {
      c.set(key, value);
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Config c = parse(ss.str(), path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  for (const auto& [key, value] : c.values_) {
    if (config_schema().at(key).type != ValueType::path) continue;
    const auto p = c.path(key);
    if (!std::filesystem::exists(*p)) fail(key + ": file not found: " + *p);
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto it = config_schema().find(key);
  if (it == config_schema().end()) fail("unknown key " + key);
  check_type(key, value, it->second.type);
  values_[key] = value;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : *to_int(it->second);
}

double Config::real(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : *to_real(it->second);
}

bool Config::boolean(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : *to_bool(it->second);
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : *to_reals(it->second);
}

std::optional<std::string> Config::path(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::filesystem::path p(it->second);
  if (p.is_relative() && !base_dir_.empty()) p = std::filesystem::path(base_dir_) / p;
  return p.string();
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_)
    if (k != "run.out" && k != "run.threads") out += k + " = " + v + "\n";
  return out;
}

std::string Config::hash() const {
  // FNV-1a, stable across platforms
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace homog::harness
