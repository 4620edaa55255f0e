#include "psys/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "psys/error.hpp"

namespace psys::report {

void KeyValueReport::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void KeyValueReport::add(const std::string& key, double value) { add(key, format_double(value)); }
void KeyValueReport::add(const std::string& key, long long value) { add(key, std::to_string(value)); }
void KeyValueReport::add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

void KeyValueReport::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

std::string KeyValueReport::str() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

KeyValueReport certificate_report(const fixpoint::Certificate& cert) {
  KeyValueReport r;
  const auto& e = cert.exponents;
  r.add("d", static_cast<long long>(e.d));
  r.add("p", e.p);
  r.add("r", e.r);
  r.add("s", e.s);
  r.add("p_prime", e.p_prime);
  r.add("C", cert.C);
  r.add("C_samples", static_cast<long long>(cert.C_samples));
  r.add("epsilon", cert.epsilon);
  r.add("lambda", cert.lambda);
  r.add("M0", cert.M0 ? format_double(*cert.M0) : std::string("undefined"));
  r.add("valid", cert.valid);
  r.add("seed", std::to_string(cert.seed));
  r.add("a1_prime", cert.a1p);
  r.add("a2_prime", cert.a2p);
  r.add("b1_prime", cert.b1p);
  r.add("b2_prime", cert.b2p);
  r.add("measure", cert.measure);
  r.add("norm_c", cert.norm_c);
  r.add("norm_c_prime", cert.norm_c_prime);
  r.add("C_kind", std::string("empirical: safety factor times the sampled maximum, not a proven bound"));
  return r;
}

void write_trace_csv(std::ostream& out, const fixpoint::ConvergenceTrace& trace) {
  out << "iter,norm_f,norm_g,delta,weak_residual\n";
  for (const auto& t : trace.records)
    out << t.iter << ',' << format_double(t.norm_f) << ',' << format_double(t.norm_g) << ','
        << format_double(t.delta) << ',' << format_double(t.weak_residual) << '\n';
}

void write_classification_csv(std::ostream& out, const verify::Classification& c) {
  out << "hat_index,R1,R2\n";
  for (std::size_t i = 0; i < c.hats.size(); ++i)
    out << c.hats[i] << ',' << format_double(c.r1[i]) << ',' << format_double(c.r2[i]) << '\n';
}

void write_study_csv(std::ostream& out, const verify::StudyReport& s) {
  out << "n,error_max,error_l2,order\n";
  for (const auto& row : s.rows) {
    out << row.n << ',' << format_double(row.error_max) << ',' << format_double(row.error_l2) << ',';
    if (row.order) out << format_double(*row.order);
    out << '\n';
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace psys::report
