#pragma once

// Text artifacts. Every writer emits LF line endings and 17 significant
// digits so that identical inputs give byte-identical files.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "psys/fixpoint.hpp"
#include "psys/verify.hpp"

namespace psys::report {

/// Ordered `key = value` lines.
class KeyValueReport {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, bool value);
  void write(std::ostream& out) const;
  std::string str() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Keys d, p, r, s, p_prime, C, C_samples, epsilon, lambda, M0, valid,
/// followed by provenance keys.
KeyValueReport certificate_report(const fixpoint::Certificate& cert);

/// `iter,norm_f,norm_g,delta,weak_residual`
void write_trace_csv(std::ostream& out, const fixpoint::ConvergenceTrace& trace);
/// `hat_index,R1,R2`
void write_classification_csv(std::ostream& out, const verify::Classification& c);
/// `n,error_max,error_l2,order`; the order column is empty when undefined.
void write_study_csv(std::ostream& out, const verify::StudyReport& s);

/// Writes `content` to `path` in binary mode; throws Error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace psys::report
