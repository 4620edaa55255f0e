#include "psys/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "psys/error.hpp"

namespace psys::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile kv;
  kv.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
    if (kv.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.values_[key] = value;
    kv.lines_[key] = lineno;
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void KeyValueFile::fail(const std::string& key, const std::string& what) const {
  const auto it = lines_.find(key);
  const std::string where = it == lines_.end() ? source_ : source_ + ":" + std::to_string(it->second);
  throw ConfigError(where + ": key '" + key + "' " + what);
}

std::optional<std::string> KeyValueFile::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

std::optional<double> KeyValueFile::get_double(const std::string& key) const {
  const auto s = raw(key);
  if (!s) return std::nullopt;
  double v = 0.0;
  if (!parse_number(*s, v) || !std::isfinite(v)) fail(key, "expects a finite number, got '" + *s + "'");
  return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return get_double(key).value_or(fallback);
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  const auto s = raw(key);
  if (!s) return fallback;
  long long v = 0;
  if (!parse_number(*s, v)) fail(key, "expects an integer, got '" + *s + "'");
  return v;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto s = raw(key);
  if (!s) return fallback;
  std::uint64_t v = 0;
  if (!parse_number(*s, v)) fail(key, "expects an unsigned 64-bit integer, got '" + *s + "'");
  return v;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "domain.x0",          "domain.x1",         "domain.y0",         "domain.y1",
      "domain.n",           "problem.d",         "problem.p",         "problem.r",
      "problem.eps",        "coupling.kind",     "coupling.phi",      "coupling.psi",
      "coupling.a1",        "coupling.a2",       "coupling.b1",       "coupling.b2",
      "boundary.h",         "boundary.k",        "solver.tol",        "solver.max_iter",
      "solver.eps_reg",     "picard.theta",      "picard.max_iter",   "picard.tol",
      "calibration.samples", "calibration.seed", "ball.trials",       "ball.radius_factor",
      "verify.tol",         "verify.alpha",      "verify.beta",       "verify.branch",
      "verify.u",           "verify.v",          "study.case",        "study.p",
      "study.c",            "study.resolutions", "study.min_order",   "output.dir",
  };
  return keys;
}

std::vector<int> parse_resolutions(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    int n = 0;
    if (!parse_number(item, n) || n < 2) throw ConfigError("invalid resolution '" + item + "' (integers >= 2)");
    out.push_back(n);
  }
  if (out.empty()) throw ConfigError("empty resolution list");
  return out;
}

Config from_key_values(const KeyValueFile& kv) {
  for (const auto& [key, value] : kv.entries())
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");

  Config c;
  c.d = static_cast<int>(kv.get_int("problem.d", 2));
  if (c.d != 1 && c.d != 2) throw ConfigError("problem.d must be 1 or 2");
  const double x0 = kv.get_double("domain.x0", 0.0), x1 = kv.get_double("domain.x1", 1.0);
  const double y0 = kv.get_double("domain.y0", 0.0), y1 = kv.get_double("domain.y1", 1.0);
  c.box = c.d == 1 ? Box::interval(x0, x1) : Box::rect(x0, x1, y0, y1);
  if (!(x1 > x0) || (c.d == 2 && !(y1 > y0))) throw ConfigError("domain box is degenerate");
  const long long n = kv.get_int("domain.n", 32);
  if (n < 2 || n > 4096) throw ConfigError("domain.n must lie in [2, 4096]");
  c.n = static_cast<int>(n);

  c.p = kv.get_double("problem.p", 2.0);
  c.r = kv.get_double("problem.r");
  c.eps = kv.get_double("problem.eps", 1.0);
  if (!(c.eps > 0.0)) throw ConfigError("problem.eps must be > 0");

  const std::string kind = kv.get_string("coupling.kind", "builtin");
  if (kind == "builtin") {
    c.coupling_kind = CouplingKind::builtin;
    if (kv.has("coupling.phi") || kv.has("coupling.psi"))
      throw ConfigError("coupling.phi/psi are only read when coupling.kind = expression");
  } else if (kind == "expression") {
    c.coupling_kind = CouplingKind::expression;
    c.phi = kv.get_string("coupling.phi", "0");
    c.psi = kv.get_string("coupling.psi", "0");
  } else {
    throw ConfigError("coupling.kind must be 'builtin' or 'expression', got '" + kind + "'");
  }
  c.a1 = kv.get_double("coupling.a1", 0.0);
  c.a2 = kv.get_double("coupling.a2", 0.0);
  c.b1 = kv.get_double("coupling.b1", 0.0);
  c.b2 = kv.get_double("coupling.b2", 0.0);
  for (double a : {c.a1, c.a2, c.b1, c.b2})
    if (a < 0.0) throw ConfigError("coupling constants must be non-negative");
  c.h = kv.get_string("boundary.h", "0");
  c.k = kv.get_string("boundary.k", "0");

  c.solver.tol = kv.get_double("solver.tol", c.solver.tol);
  c.solver.max_iter = static_cast<int>(kv.get_int("solver.max_iter", c.solver.max_iter));
  c.solver.eps_reg = kv.get_double("solver.eps_reg", c.solver.eps_reg);
  if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1 || !(c.solver.eps_reg > 0.0))
    throw ConfigError("solver.tol and solver.eps_reg must be > 0, solver.max_iter >= 1");
  c.picard.solver = c.solver;
  c.picard.theta = kv.get_double("picard.theta", 1.0);
  c.picard.max_iter = static_cast<int>(kv.get_int("picard.max_iter", 200));
  c.picard.tol = kv.get_double("picard.tol", 1e-7);
  if (!(c.picard.theta > 0.0) || c.picard.theta > 1.0) throw ConfigError("picard.theta must lie in (0, 1]");
  if (!(c.picard.tol > 0.0) || c.picard.max_iter < 1)
    throw ConfigError("picard.tol must be > 0 and picard.max_iter >= 1");

  const long long samples = kv.get_int("calibration.samples", 20);
  if (samples < static_cast<long long>(fixpoint::kMinCalibrationSamples))
    throw ConfigError("calibration.samples must be >= " + std::to_string(fixpoint::kMinCalibrationSamples));
  c.calibration_samples = static_cast<std::size_t>(samples);
  c.seed = kv.get_u64("calibration.seed", 0);
  const long long trials = kv.get_int("ball.trials", 100);
  if (trials < 1) throw ConfigError("ball.trials must be >= 1");
  c.ball_trials = static_cast<std::size_t>(trials);
  c.ball_radius_factor = kv.get_double("ball.radius_factor", 1.1);
  if (!(c.ball_radius_factor >= 1.0)) throw ConfigError("ball.radius_factor must be >= 1");

  c.verify_tol = kv.get_double("verify.tol", c.verify_tol);
  if (!(c.verify_tol >= 0.0)) throw ConfigError("verify.tol must be >= 0");
  c.alpha = kv.get_double("verify.alpha");
  c.beta = kv.get_double("verify.beta");
  const std::string branch = kv.get_string("verify.branch", "super");
  if (branch == "super") c.branch = verify::ShiftBranch::super;
  else if (branch == "sub") c.branch = verify::ShiftBranch::sub;
  else throw ConfigError("verify.branch must be 'super' or 'sub'");
  c.u_csv = kv.get_string("verify.u", "");
  c.v_csv = kv.get_string("verify.v", "");

  const std::string study = kv.get_string("study.case", "sine");
  if (study == "sine") c.study = StudyKind::sine;
  else if (study == "affine") c.study = StudyKind::affine;
  else if (study == "constant_1d") c.study = StudyKind::constant_1d;
  else throw ConfigError("study.case must be 'sine', 'affine' or 'constant_1d'");
  c.study_p = kv.get_double("study.p", 3.0);
  c.study_c = kv.get_double("study.c", -1.0);
  if (const auto res = kv.raw("study.resolutions")) c.resolutions = parse_resolutions(*res);
  c.min_order = kv.get_double("study.min_order");

  c.output = kv.get_string("output.dir", "out");
  return c;
}

Config load(const std::string& path) { return from_key_values(KeyValueFile::load(path)); }

fixpoint::Exponents exponents(const Config& c) {
  const double r = c.r ? *c.r : fixpoint::admissible_r(c.d, c.p).first;
  return fixpoint::make_exponents(c.d, c.p, r);
}

coupling::Coupling build_coupling(const Config& c) {
  if (c.coupling_kind == CouplingKind::builtin) return coupling::Coupling::power_family(c.p, c.a1, c.a2, c.b1, c.b2);
  return coupling::Coupling::from_strings(c.phi, c.psi, c.a1, c.a2, c.b1, c.b2);
}

fixpoint::SystemProblem build_problem(const Config& c) {
  if (c.d != 2) throw ConfigError("the coupled system requires problem.d = 2");
  const auto e = exponents(c);
  const GridPtr grid = build_grid(c.box, c.n);
  fixpoint::SystemProblem prob{grid,
                               e.p,
                               e.r,
                               c.eps,
                               ScalarField::interpolate(grid, expr::parse(c.h)),
                               ScalarField::interpolate(grid, expr::parse(c.k)),
                               build_coupling(c)};
  prob.validate();
  return prob;
}

verify::StudyCase build_study(const Config& c) {
  verify::StudyCase s;
  switch (c.study) {
    case StudyKind::sine: s = verify::StudyCase::manufactured_sine(); break;
    case StudyKind::affine: s = verify::StudyCase::affine(); break;
    case StudyKind::constant_1d: s = verify::StudyCase::constant_source_1d(c.study_p, c.study_c); break;
  }
  s.solver = c.solver;
  return s;
}

std::vector<int> study_resolutions(const Config& c) {
  if (!c.resolutions.empty()) return c.resolutions;
  if (c.study == StudyKind::constant_1d) return {64, 128, 256};
  return {16, 32, 64};
}

std::optional<double> study_threshold(const Config& c) {
  if (c.min_order) return c.min_order;
  switch (c.study) {
    case StudyKind::sine: return 1.7;
    case StudyKind::affine: return std::nullopt;
    case StudyKind::constant_1d: return 0.9;
  }
  return std::nullopt;
}

}  // namespace psys::config
