#include "commands.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "psys/config.hpp"
#include "psys/error.hpp"
#include "psys/fixpoint.hpp"
#include "psys/report.hpp"
#include "psys/verify.hpp"

namespace psys::cli {

namespace {

namespace fs = std::filesystem;

struct Loaded {
  config::Config cfg;
  fs::path out;
};

Loaded load(const Options& o) {
  Loaded l{config::load(o.config), {}};
  if (o.out) l.cfg.output = *o.out;
  if (o.seed) l.cfg.seed = *o.seed;
  if (o.alpha) l.cfg.alpha = *o.alpha;
  if (o.beta) l.cfg.beta = *o.beta;
  if (o.resolutions) l.cfg.resolutions = config::parse_resolutions(*o.resolutions);
  l.out = l.cfg.output;
  return l;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory '" + p.string() + "': " + ec.message());
}

std::string csv_of(const ScalarField& w) {
  std::ostringstream ss;
  write_csv(ss, w);
  return ss.str();
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

std::uint64_t ball_seed(std::uint64_t seed) { return seed + 1; }

}  // namespace

int cmd_solve(const Options& o, std::ostream& log) {
  const Loaded l = load(o);
  const auto prob = config::build_problem(l.cfg);
  ensure_dir(l.out);

  const auto cal = fixpoint::calibrate_C(prob.grid, prob.exponents(), l.cfg.calibration_samples, l.cfg.seed,
                                         l.cfg.solver);
  const auto cert = fixpoint::certify(prob, cal);
  if (!cert.valid) log << "warning: smallness certificate invalid (lambda = " << format_double(cert.lambda)
                       << "); iterating anyway\n";

  const auto res = fixpoint::picard_solve(prob, l.cfg.picard);
  const auto cls = verify::weak_residuals(res.u, res.v, prob.coupling, prob.p, l.cfg.verify_tol);

  report::write_file((l.out / "u.csv").string(), csv_of(res.u));
  report::write_file((l.out / "v.csv").string(), csv_of(res.v));
  report::write_file((l.out / "trace.csv").string(),
                     render([&](std::ostream& s) { report::write_trace_csv(s, res.trace); }));
  report::write_file((l.out / "classification.csv").string(),
                     render([&](std::ostream& s) { report::write_classification_csv(s, cls); }));

  auto rep = report::certificate_report(cert);
  rep.add("converged", res.trace.converged);
  rep.add("iterations", static_cast<long long>(res.trace.records.size()));
  rep.add("theta_final", res.trace.theta_final);
  rep.add("damping_fallback", res.trace.damping_fallback);
  rep.add("weak_residual_max", cls.max_abs());
  rep.add("verify_tol", cls.tol);
  rep.add("verdict", std::string(verify::to_string(cls.verdict)));
  report::write_file((l.out / "report.txt").string(), rep.str());

  std::cout << "converged=" << (res.trace.converged ? "true" : "false")
            << " iterations=" << res.trace.records.size() << " lambda=" << format_double(cert.lambda)
            << " verdict=" << verify::to_string(cls.verdict) << '\n';
  if (!res.trace.converged) {
    log << "error: Picard iteration did not converge within " << l.cfg.picard.max_iter << " iterations\n";
    return solver_failure;
  }
  if (!cls.is_solution()) {
    log << "error: result classified " << verify::to_string(cls.verdict) << " (max |R| = "
        << format_double(cls.max_abs()) << ", tol " << format_double(cls.tol) << ")\n";
    return check_failed;
  }
  return ok;
}

int cmd_certify(const Options& o, std::ostream& log) {
  const Loaded l = load(o);
  const auto prob = config::build_problem(l.cfg);
  ensure_dir(l.out);

  const auto cal = fixpoint::calibrate_C(prob.grid, prob.exponents(), l.cfg.calibration_samples, l.cfg.seed,
                                         l.cfg.solver);
  const auto cert = fixpoint::certify(prob, cal);
  auto rep = report::certificate_report(cert);
  rep.add("C_raw_max", cal.raw_max);

  int code = ok;
  if (cert.valid) {
    const double M = l.cfg.ball_radius_factor * *cert.M0;
    const auto ball = fixpoint::check_ball_invariance(prob, cert, M, l.cfg.ball_trials, ball_seed(l.cfg.seed),
                                                      l.cfg.solver);
    rep.add("ball_radius", M);
    rep.add("ball_trials", static_cast<long long>(ball.trials));
    rep.add("ball_max_output_norm", ball.max_output_norm);
    rep.add("ball_violations", static_cast<long long>(ball.violations));
    rep.add("ball_pass", ball.pass);
    if (!ball.pass) {
      log << "error: " << ball.violations << " of " << ball.trials << " trials left the ball of radius "
          << format_double(M) << '\n';
      code = check_failed;
    }
  } else {
    log << "note: certificate invalid (lambda = " << format_double(cert.lambda) << " >= 1); recorded\n";
  }
  report::write_file((l.out / "certificate.txt").string(), rep.str());
  std::cout << "lambda=" << format_double(cert.lambda) << " M0="
            << (cert.M0 ? format_double(*cert.M0) : std::string("undefined"))
            << " valid=" << (cert.valid ? "true" : "false") << '\n';
  return code;
}

int cmd_verify(const Options& o, std::ostream& log) {
  const Loaded l = load(o);
  const auto prob = config::build_problem(l.cfg);
  const std::string up = l.cfg.u_csv.empty() ? (l.out / "u.csv").string() : l.cfg.u_csv;
  const std::string vp = l.cfg.v_csv.empty() ? (l.out / "v.csv").string() : l.cfg.v_csv;
  const ScalarField u = read_csv(up, prob.grid);
  const ScalarField v = read_csv(vp, prob.grid);

  const auto cls = verify::weak_residuals(u, v, prob.coupling, prob.p, l.cfg.verify_tol);
  std::cout << "verdict=" << verify::to_string(cls.verdict) << " max_abs_residual=" << format_double(cls.max_abs())
            << " tol=" << format_double(cls.tol) << '\n';
  const auto bad = cls.offending();
  if (!bad.empty()) {
    std::cout << "offending_hats=";
    for (std::size_t i = 0; i < bad.size(); ++i) std::cout << (i ? "," : "") << bad[i];
    std::cout << '\n';
  }

  if (!l.cfg.alpha) return ok;
  const double beta = l.cfg.beta.value_or(0.0);
  const auto shift = verify::shift_test(u, v, prob.coupling, prob.p, *l.cfg.alpha, beta, l.cfg.branch, cls.tol);
  const char* branch = l.cfg.branch == verify::ShiftBranch::super ? "super" : "sub";
  if (!shift.precondition_ok) {
    std::cout << "shift_test=precondition_failed branch=" << branch << '\n';
    log << "error: shift test precondition failed: " << shift.precondition_failure << '\n';
    return check_failed;
  }
  std::cout << "shift_test=" << (shift.pass ? "pass" : "fail") << " branch=" << branch
            << " alpha=" << format_double(*l.cfg.alpha) << " beta=" << format_double(beta)
            << " verdict_after=" << verify::to_string(shift.after->verdict) << '\n';
  if (!shift.pass) {
    log << "error: shifted pair classified " << verify::to_string(shift.after->verdict) << '\n';
    return check_failed;
  }
  return ok;
}

int cmd_study(const Options& o, std::ostream& log) {
  const Loaded l = load(o);
  const auto study = config::build_study(l.cfg);
  const auto res = config::study_resolutions(l.cfg);
  const auto rep = verify::convergence_study(study, res);
  ensure_dir(l.out);
  report::write_file((l.out / "study.csv").string(),
                     render([&](std::ostream& s) { report::write_study_csv(s, rep); }));

  std::cout << "case=" << rep.name << " fitted_order="
            << (rep.fitted_order ? format_double(*rep.fitted_order) : std::string("indeterminate"))
            << " exact=" << (rep.exact ? "true" : "false") << '\n';
  for (const auto& row : rep.rows)
    if (!row.converged) {
      log << "error: inner solve did not converge at n = " << row.n << '\n';
      return solver_failure;
    }
  const auto threshold = config::study_threshold(l.cfg);
  if (!threshold) {
    if (!rep.exact) {
      log << "error: expected exact reproduction, max error " << format_double(rep.rows.back().error_max) << '\n';
      return check_failed;
    }
    return ok;
  }
  if (rep.exact) return ok;
  if (!rep.fitted_order || *rep.fitted_order < *threshold) {
    log << "error: fitted order below threshold " << format_double(*threshold) << '\n';
    return check_failed;
  }
  return ok;
}

int guarded(const char* command, int (*fn)(const Options&, std::ostream&), const Options& o, std::ostream& log) {
  try {
    return fn(o, log);
  } catch (const ExponentError& e) {
    log << command << ": exponent error: " << e.what() << '\n';
    return config_error;
  } catch (const ConfigError& e) {
    log << command << ": config error: " << e.what() << '\n';
    return config_error;
  } catch (const CsvError& e) {
    log << command << ": csv error: " << e.what() << '\n';
    return config_error;
  } catch (const ParseError& e) {
    log << command << ": expression error: " << e.what() << '\n';
    return config_error;
  } catch (const EvaluationError& e) {
    log << command << ": evaluation error: " << e.what() << '\n';
    return config_error;
  } catch (const GridError& e) {
    log << command << ": grid error: " << e.what() << '\n';
    return config_error;
  } catch (const PreconditionError& e) {
    log << command << ": invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const SolverError& e) {
    log << command << ": solver failure: " << e.what() << '\n';
    return solver_failure;
  } catch (const std::exception& e) {
    log << command << ": error: " << e.what() << '\n';
    return solver_failure;
  }
}

}  // namespace psys::cli
