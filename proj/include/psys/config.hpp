#pragma once

// Flat `key = value` configuration with dotted section keys. Lines starting
// with '#' (after optional whitespace) are comments; so is anything after a
// '#' on a value line. Keys are unique.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psys/coupling.hpp"
#include "psys/field.hpp"
#include "psys/fixpoint.hpp"
#include "psys/plap.hpp"
#include "psys/verify.hpp"

namespace psys::config {

class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::string source_;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

enum class CouplingKind { builtin, expression };
enum class StudyKind { sine, affine, constant_1d };

struct Config {
  Box box = Box::unit_square();
  int n = 32;
  int d = 2;
  double p = 2.0;
  std::optional<double> r;  // defaults to the lower end of the admissible interval
  double eps = 1.0;

  CouplingKind coupling_kind = CouplingKind::builtin;
  std::string phi = "0", psi = "0";
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
  std::string h = "0", k = "0";

  plap::SolverOptions solver;
  fixpoint::PicardOptions picard;

  std::size_t calibration_samples = 20;
  std::uint64_t seed = 0;
  std::size_t ball_trials = 100;
  double ball_radius_factor = 1.1;

  double verify_tol = verify::kDefaultTolerance;
  std::optional<double> alpha, beta;
  verify::ShiftBranch branch = verify::ShiftBranch::super;
  std::string u_csv, v_csv;  // empty: <output>/u.csv, <output>/v.csv

  StudyKind study = StudyKind::sine;
  double study_p = 3.0;
  double study_c = -1.0;
  std::vector<int> resolutions;  // empty: the case default
  std::optional<double> min_order;

  std::string output = "out";
};

/// Known keys; any other key is a ConfigError.
const std::set<std::string>& known_keys();

Config from_key_values(const KeyValueFile& kv);
Config load(const std::string& path);

/// "16,32,64" -> {16, 32, 64}; throws ConfigError.
std::vector<int> parse_resolutions(const std::string& text);

/// Exponents validated strictly (throws ExponentError).
fixpoint::Exponents exponents(const Config& c);
fixpoint::SystemProblem build_problem(const Config& c);
coupling::Coupling build_coupling(const Config& c);
verify::StudyCase build_study(const Config& c);
std::vector<int> study_resolutions(const Config& c);
/// Threshold on the fitted order; nullopt for the exact (affine) case.
std::optional<double> study_threshold(const Config& c);

}  // namespace psys::config
