#pragma once

// Experiment configuration, the end-to-end run and its validation report.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scinv/controllers.hpp"
#include "scinv/dynamics/lti.hpp"
#include "scinv/errors.hpp"
#include "scinv/fail.hpp"
#include "scinv/geometry.hpp"
#include "scinv/invariance.hpp"
#include "scinv/report_io.hpp"

namespace scinv {

inline constexpr int kReportSchemaVersion = 1;

/// Thresholds behind the report's pass flags.
namespace thresholds {
inline constexpr double kProjectionHausdorff = 1e-6;
inline constexpr double kFailEquality = tol::kSetEquality;
inline constexpr double kLearnedRowMatch = tol::kHalfspaceMatch;
inline constexpr double kPullbackMatch = 1e-6;
inline constexpr int kIterationSlack = 1;
}  // namespace thresholds

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct Expectations {
  std::optional<int> msci_rows;
  std::optional<int> msci_iterations;
  std::optional<int> mci_rows;
  std::optional<int> mci_iterations;
  std::optional<int> learned_rows;
  std::optional<int> max_fail_iterations;
  std::optional<int> max_failing_trajectories;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Box state_box;
  Box input_box;
  FailOptions fail;
  std::vector<ControllerSpec> schedule;
  /// Set by the validation section; without it the run is model-blind apart
  /// from simulation.
  bool ground_truth = false;
  Expectations expect;
  std::string output_dir = "out";
  bool plot_data = true;
  bool certification_trajectories = true;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
};

namespace detail {

/// Field accessors that report the JSON path of the offending value.
class ConfigReader {
 public:
  explicit ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(source_ + ": " + (path.empty() ? "/" : path) + ": " + msg);
  }

  const Json& require(const Json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    if (!obj.contains(key)) fail(path + "/" + key, "missing required field");
    return obj.at(key);
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  int integer(const Json& j, const std::string& path, int min_value) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < min_value || v > 1000000000LL) fail(path, "must be at least " + std::to_string(min_value));
    return static_cast<int>(v);
  }

  bool boolean(const Json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const Json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  Eigen::VectorXd vector(const Json& j, const std::string& path, std::optional<int> size = std::nullopt) const {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    if (size && static_cast<int>(j.size()) != *size) {
      fail(path, "expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], path + "/" + std::to_string(i));
    return v;
  }

  Eigen::MatrixXd matrix(const Json& j, const std::string& path) const {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    const Json& first = j[0];
    if (!first.is_array() || first.empty()) fail(path + "/0", "expected a nonempty row");
    const auto cols = static_cast<int>(first.size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
      m.row(static_cast<Eigen::Index>(r)) = vector(j[r], path + "/" + std::to_string(r), cols).transpose();
    }
    return m;
  }

  Box box(const Json& j, const std::string& path, int dim) const {
    Box b{vector(require(j, path, "lower"), path + "/lower", dim), vector(require(j, path, "upper"), path + "/upper", dim)};
    for (int i = 0; i < dim; ++i) {
      if (!(b.lower[i] < b.upper[i])) fail(path, "lower must be strictly below upper in coordinate " + std::to_string(i));
    }
    return b;
  }

  void no_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> known) const {
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) fail(path + "/" + key, "unknown field");
    }
  }

 private:
  std::string source_;
};

inline bool inside(const Box& b, const Eigen::VectorXd& v) {
  return ((v - b.lower).array() >= -tol::kFeasibility).all() && ((b.upper - v).array() >= -tol::kFeasibility).all();
}

}  // namespace detail

/// Parses and validates a configuration document. Errors name the JSON path.
inline ExperimentConfig parse_config(const Json& j, const std::string& source = "config") {
  const detail::ConfigReader rd(source);
  if (!j.is_object()) rd.fail("", "expected an object");
  rd.no_unknown(j, "", {"schema_version", "name", "system", "constraints", "fail", "validation", "output"});
  ExperimentConfig c;
  if (j.contains("schema_version") && rd.integer(j["schema_version"], "/schema_version", 1) != 1) {
    rd.fail("/schema_version", "unsupported schema version");
  }
  if (j.contains("name")) c.name = rd.string(j["name"], "/name");

  const Json& sys = rd.require(j, "", "system");
  rd.no_unknown(sys, "/system", {"A", "B"});
  c.A = rd.matrix(rd.require(sys, "/system", "A"), "/system/A");
  if (c.A.rows() != c.A.cols()) rd.fail("/system/A", "must be square");
  c.B = rd.matrix(rd.require(sys, "/system", "B"), "/system/B");
  if (c.B.rows() != c.A.rows()) {
    rd.fail("/system/B", "expected " + std::to_string(c.A.rows()) + " rows to match A, got " + std::to_string(c.B.rows()));
  }
  const int n_x = c.state_dim();
  const int n_u = c.input_dim();

  const Json& cons = rd.require(j, "", "constraints");
  rd.no_unknown(cons, "/constraints", {"state_box", "input_box"});
  c.state_box = rd.box(rd.require(cons, "/constraints", "state_box"), "/constraints/state_box", n_x);
  c.input_box = rd.box(rd.require(cons, "/constraints", "input_box"), "/constraints/input_box", n_u);

  {
    const Json& f = rd.require(j, "", "fail");
    rd.no_unknown(f, "/fail", {"max_iterations", "horizon", "seed", "certification_rollouts", "schedule"});
    if (f.contains("max_iterations")) c.fail.max_iterations = rd.integer(f["max_iterations"], "/fail/max_iterations", 0);
    if (f.contains("horizon")) c.fail.horizon = rd.integer(f["horizon"], "/fail/horizon", 1);
    if (f.contains("certification_rollouts")) {
      c.fail.certification_rollouts = rd.integer(f["certification_rollouts"], "/fail/certification_rollouts", 1);
    }
    const Json& seed = rd.require(f, "/fail", "seed");
    if (!seed.is_number_unsigned()) rd.fail("/fail/seed", "expected a nonnegative integer");
    c.fail.seed = seed.get<std::uint64_t>();
    if (f.contains("schedule")) {
      const Json& s = f["schedule"];
      if (!s.is_array()) rd.fail("/fail/schedule", "expected an array");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string path = "/fail/schedule/" + std::to_string(i);
        const Json& e = s[i];
        rd.no_unknown(e, path, {"kind", "u", "x0"});
        const std::string kind = rd.string(rd.require(e, path, "kind"), path + "/kind");
        ControllerSpec spec;
        if (kind == "constant") {
          spec.kind = ControllerKind::constant;
          spec.value = rd.vector(rd.require(e, path, "u"), path + "/u", n_u);
          if (!detail::inside(c.input_box, spec.value)) rd.fail(path + "/u", "constant input lies outside the input box");
        } else if (kind == "random") {
          spec.kind = ControllerKind::random_admissible;
          if (e.contains("u")) rd.fail(path + "/u", "random entries take no input value");
          if (i + 1 != s.size()) rd.fail(path, "a random entry must be the last schedule entry");
        } else {
          rd.fail(path + "/kind", "expected \"constant\" or \"random\", got \"" + kind + "\"");
        }
        if (e.contains("x0")) {
          spec.x0 = rd.vector(e["x0"], path + "/x0", n_x);
          if (!detail::inside(c.state_box, *spec.x0)) rd.fail(path + "/x0", "initial state lies outside the state box");
        }
        c.schedule.push_back(std::move(spec));
      }
    }
  }
  if (c.schedule.empty()) {
    c.schedule.push_back({ControllerKind::constant, c.input_box.lower, std::nullopt});
    c.schedule.push_back({ControllerKind::constant, c.input_box.upper, std::nullopt});
    c.schedule.push_back({ControllerKind::random_admissible, Eigen::VectorXd(), std::nullopt});
  }
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n_x);
  for (const auto& spec : c.schedule) {
    if (spec.kind == ControllerKind::constant && !spec.x0 && !detail::inside(c.state_box, origin)) {
      rd.fail("/fail/schedule", "constant entries start at the origin, which lies outside the state box; give x0");
    }
  }

  if (j.contains("validation")) {
    const Json& v = j["validation"];
    rd.no_unknown(v, "/validation", {"ground_truth", "expect"});
    c.ground_truth = true;
    if (v.contains("ground_truth")) c.ground_truth = rd.boolean(v["ground_truth"], "/validation/ground_truth");
    if (v.contains("expect")) {
      const Json& e = v["expect"];
      rd.no_unknown(e, "/validation/expect",
                    {"msci_rows", "msci_iterations", "mci_rows", "mci_iterations", "learned_rows",
                     "max_fail_iterations", "max_failing_trajectories"});
      auto opt_int = [&](const char* key, std::optional<int>& dst) {
        if (e.contains(key)) dst = rd.integer(e[key], std::string("/validation/expect/") + key, 0);
      };
      opt_int("msci_rows", c.expect.msci_rows);
      opt_int("msci_iterations", c.expect.msci_iterations);
      opt_int("mci_rows", c.expect.mci_rows);
      opt_int("mci_iterations", c.expect.mci_iterations);
      opt_int("learned_rows", c.expect.learned_rows);
      opt_int("max_fail_iterations", c.expect.max_fail_iterations);
      opt_int("max_failing_trajectories", c.expect.max_failing_trajectories);
    }
  }

  if (j.contains("output")) {
    const Json& o = j["output"];
    rd.no_unknown(o, "/output", {"dir", "plot_data", "certification_trajectories"});
    if (o.contains("dir")) c.output_dir = rd.string(o["dir"], "/output/dir");
    if (o.contains("plot_data")) c.plot_data = rd.boolean(o["plot_data"], "/output/plot_data");
    if (o.contains("certification_trajectories")) {
      c.certification_trajectories = rd.boolean(o["certification_trajectories"], "/output/certification_trajectories");
    }
  }

  try {
    LtiSystem check(c.A, c.B);
    (void)check;
  } catch (const Error& e) {
    rd.fail("/system", e.what());
  }
  return c;
}

/// Reads a configuration file. Syntax errors report line and column.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j, path);
}

struct Problem {
  LtiSystem sys;
  Polytope state_set;
  Polytope input_set;
  Polytope joint_set;
};

inline Problem make_problem(const ExperimentConfig& c, const WarningSink& warn = warn_to_clog) {
  LtiSystem sys(c.A, c.B);
  Polytope x = Polytope::box(c.state_box.lower, c.state_box.upper);
  Polytope u = Polytope::box(c.input_box.lower, c.input_box.upper);
  Polytope z = make_joint_constraints(x, u, warn);
  return {std::move(sys), std::move(x), std::move(u), std::move(z)};
}

/// Command-line overrides.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> rollouts;
  std::optional<std::string> out_dir;
  bool write_artifacts = true;
};

inline FailOptions effective_fail_options(const ExperimentConfig& c, const RunOptions& o) {
  FailOptions f = c.fail;
  if (o.seed) f.seed = *o.seed;
  if (o.rollouts) f.certification_rollouts = *o.rollouts;
  return f;
}

/// Certification draws from a stream separate from the learner's.
inline Rng certification_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xce71u};
  return Rng(seq);
}

struct ValidationReport {
  std::string name;
  std::uint64_t seed = 0;
  int state_dim = 0;
  int input_dim = 0;
  bool ground_truth = false;

  int msci_rows = 0;
  int msci_iterations = 0;
  int mci_rows = 0;
  int mci_iterations = 0;
  double projection_hausdorff = 0.0;

  int fail_iterations = 0;
  int learned_rows = 0;
  int failing_trajectory_count = 0;
  int rollouts_run = 0;
  bool fail_certified = false;
  bool fail_cap_reached = false;
  bool fail_equals_msci = false;
  double fail_projection_hausdorff = 0.0;
  std::vector<double> learned_row_match_errors;
  std::vector<double> pullback_errors;
  bool monotone = false;

  CertificationReport certification;

  std::map<std::string, bool> pass;

  bool passed() const {
    for (const auto& [_, ok] : pass) {
      if (!ok) return false;
    }
    return true;
  }

  Json to_json() const {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["name"] = name;
    j["seed"] = seed;
    j["state_dim"] = state_dim;
    j["input_dim"] = input_dim;
    j["ground_truth"] = ground_truth;
    if (ground_truth) {
      j["msci_rows"] = msci_rows;
      j["msci_iterations"] = msci_iterations;
      j["mci_rows"] = mci_rows;
      j["mci_iterations"] = mci_iterations;
      j["projection_hausdorff"] = projection_hausdorff;
    }
    j["fail_iterations"] = fail_iterations;
    j["learned_rows"] = learned_rows;
    j["failing_trajectory_count"] = failing_trajectory_count;
    j["rollouts_run"] = rollouts_run;
    j["fail_certified"] = fail_certified;
    j["fail_iteration_cap_reached"] = fail_cap_reached;
    if (ground_truth) {
      j["fail_equals_msci"] = fail_equals_msci;
      j["fail_projection_hausdorff"] = fail_projection_hausdorff;
      j["learned_row_match_errors"] = learned_row_match_errors;
      j["pullback_errors"] = pullback_errors;
      j["monotone"] = monotone;
    }
    j["certification"] = scinv::to_json(certification);
    Json t;
    t["projection_hausdorff"] = thresholds::kProjectionHausdorff;
    t["fail_equality"] = thresholds::kFailEquality;
    t["learned_row_match"] = thresholds::kLearnedRowMatch;
    t["pullback_match"] = thresholds::kPullbackMatch;
    t["iteration_slack"] = thresholds::kIterationSlack;
    j["thresholds"] = t;
    Json p = Json::object();
    for (const auto& [k, ok] : pass) p[k] = ok;
    j["pass"] = p;
    j["passed"] = passed();
    return j;
  }
};

struct ExperimentResult {
  ValidationReport report;
  std::optional<RecursionTrace> msci;
  std::optional<RecursionTrace> mci;
  LearnState learn;
};

inline double worst(const std::vector<double>& v) {
  double w = 0.0;
  for (double e : v) w = std::max(w, e);
  return w;
}

namespace detail {

template <typename F>
auto in_module(const char* module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(module, e.what());
  }
}

inline void expect_flags(const Expectations& e, const char* which, int rows, int iterations,
                         std::map<std::string, bool>& pass) {
  const std::string w(which);
  const auto& er = w == "msci" ? e.msci_rows : e.mci_rows;
  const auto& ei = w == "msci" ? e.msci_iterations : e.mci_iterations;
  if (er) pass[w + "_rows"] = rows == *er;
  if (ei) pass[w + "_iterations"] = std::abs(iterations - *ei) <= thresholds::kIterationSlack;
}

}  // namespace detail

/// Ground-truth recursion alone, for the mci and msci subcommands.
struct TraceResult {
  RecursionTrace trace;
  std::map<std::string, bool> pass;

  bool passed() const {
    for (const auto& [_, ok] : pass) {
      if (!ok) return false;
    }
    return true;
  }

  Json to_json() const {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["rows"] = trace.fixpoint().size();
    j["iterations"] = trace.iterations_to_fixpoint;
    Json p = Json::object();
    for (const auto& [k, ok] : pass) p[k] = ok;
    j["pass"] = p;
    j["passed"] = passed();
    return j;
  }
};

inline TraceResult run_msci(const ExperimentConfig& c, const std::optional<std::filesystem::path>& out,
                            const WarningSink& warn = warn_to_clog) {
  const Problem prob = make_problem(c, warn);
  TraceResult r{detail::in_module("invariance", [&] { return compute_msci(prob.sys, prob.joint_set); }), {}};
  detail::expect_flags(c.expect, "msci", static_cast<int>(r.trace.fixpoint().size()), r.trace.iterations_to_fixpoint,
                       r.pass);
  if (out) {
    detail::in_module("cli", [&] {
      emit_plot_data(r.trace.iterates, r.trace.iterations_to_fixpoint, *out, c.state_dim());
      write_json((*out / "report.json").string(), r.to_json());
    });
  }
  return r;
}

inline TraceResult run_mci(const ExperimentConfig& c, const std::optional<std::filesystem::path>& out,
                           const WarningSink& warn = warn_to_clog) {
  const Problem prob = make_problem(c, warn);
  TraceResult r{detail::in_module("invariance",
                                  [&] { return compute_mci(prob.sys, prob.state_set, prob.input_set); }),
                {}};
  detail::expect_flags(c.expect, "mci", static_cast<int>(r.trace.fixpoint().size()), r.trace.iterations_to_fixpoint,
                       r.pass);
  if (out) {
    detail::in_module("cli", [&] {
      emit_plot_data(r.trace.iterates, r.trace.iterations_to_fixpoint, *out);
      write_json((*out / "report.json").string(), r.to_json());
    });
  }
  return r;
}

/// The learner alone; the model is used only to simulate.
inline LearnState run_fail_learn(const ExperimentConfig& c, const RunOptions& opt,
                                 const std::optional<std::filesystem::path>& out,
                                 const WarningSink& warn = warn_to_clog) {
  const Problem prob = make_problem(c, warn);
  LearnState s = detail::in_module(
      "fail", [&] { return run_fail(make_step_oracle(prob.sys), prob.joint_set, c.schedule, effective_fail_options(c, opt)); });
  if (out) detail::in_module("cli", [&] { emit_plot_data(s, *out); });
  return s;
}

/// Random-admissible certification of a given joint-space polytope.
inline CertificationReport run_certify(const ExperimentConfig& c, const Polytope& p, const RunOptions& opt,
                                       const std::optional<std::filesystem::path>& out,
                                       const WarningSink& warn = warn_to_clog) {
  const Problem prob = make_problem(c, warn);
  if (p.dim() != c.state_dim() + c.input_dim()) {
    throw DimensionMismatch("certify: polytope dimension " + std::to_string(p.dim()) + " does not match the system");
  }
  const FailOptions fo = effective_fail_options(c, opt);
  Rng rng = certification_rng(fo.seed);
  const bool keep = out.has_value() && c.certification_trajectories;
  CertificationReport r = detail::in_module(
      "fail", [&] { return certify(make_step_oracle(prob.sys), p, fo.certification_rollouts, fo.horizon, rng, keep); });
  if (out) {
    detail::in_module("cli", [&] {
      std::filesystem::create_directories(*out);
      Json j = to_json(r);
      j = Json{{"schema_version", kReportSchemaVersion}, {"certification", j}};
      write_json((*out / "report.json").string(), j);
      if (keep) emit_certification_trajectories(r, c.state_dim(), c.input_dim(), *out / "trajectories.csv");
    });
  }
  return r;
}

struct Comparison {
  bool p_in_q = false;
  bool q_in_p = false;
  std::optional<double> hausdorff;

  bool equal() const { return p_in_q && q_in_p; }

  Json to_json() const {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["p_in_q"] = p_in_q;
    j["q_in_p"] = q_in_p;
    j["equal"] = equal();
    j["hausdorff"] = hausdorff ? Json(*hausdorff) : Json(nullptr);
    return j;
  }
};

/// Containment both ways at the set-equality tolerance; the Hausdorff
/// distance is reported when both sets are bounded and vertex enumeration
/// applies (dimension <= 4).
inline Comparison compare(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("compare: polytopes live in different dimensions");
  Comparison c;
  c.p_in_q = contains(q, p, tol::kSetEquality);
  c.q_in_p = contains(p, q, tol::kSetEquality);
  if (p.dim() <= 4 && is_bounded(p) && is_bounded(q)) c.hausdorff = hausdorff(p, q);
  return c;
}

/// Ground truth (when configured), the learner, certification and the
/// report. Artifacts go to the configured output directory unless disabled.
inline ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& opt = {},
                                       const WarningSink& warn = warn_to_clog) {
  const Problem prob = make_problem(c, warn);
  const FailOptions fo = effective_fail_options(c, opt);
  const int n_x = c.state_dim();
  const int n_u = c.input_dim();
  const std::filesystem::path out = opt.out_dir ? *opt.out_dir : c.output_dir;

  ExperimentResult res;
  ValidationReport& rep = res.report;
  rep.name = c.name;
  rep.seed = fo.seed;
  rep.state_dim = n_x;
  rep.input_dim = n_u;
  rep.ground_truth = c.ground_truth;

  if (c.ground_truth) {
    res.msci = detail::in_module("invariance", [&] { return compute_msci(prob.sys, prob.joint_set); });
    res.mci = detail::in_module("invariance", [&] { return compute_mci(prob.sys, prob.state_set, prob.input_set); });
    rep.msci_rows = static_cast<int>(res.msci->fixpoint().size());
    rep.msci_iterations = res.msci->iterations_to_fixpoint;
    rep.mci_rows = static_cast<int>(res.mci->fixpoint().size());
    rep.mci_iterations = res.mci->iterations_to_fixpoint;
    rep.projection_hausdorff = hausdorff(state_projection(res.msci->fixpoint(), n_x), res.mci->fixpoint());
  }

  res.learn = detail::in_module("fail", [&] { return run_fail(make_step_oracle(prob.sys), prob.joint_set, c.schedule, fo); });
  const LearnState& ls = res.learn;
  rep.fail_iterations = ls.iteration();
  rep.learned_rows = static_cast<int>(ls.learned.size());
  rep.failing_trajectory_count = static_cast<int>(ls.failing_trajectories.size());
  rep.rollouts_run = ls.rollouts_run;
  rep.fail_certified = ls.certified;
  rep.fail_cap_reached = ls.iteration_cap_reached;

  if (c.ground_truth) {
    const Polytope& zinf = res.msci->fixpoint();
    rep.fail_equals_msci = equal(ls.current(), zinf, thresholds::kFailEquality);
    rep.fail_projection_hausdorff = hausdorff(ls.current_projection(), res.mci->fixpoint());
    const Eigen::MatrixXd ab_t = prob.sys.AB().transpose();
    for (const auto& l : ls.learned) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : zinf.rows()) best = std::min(best, halfspace_distance(l.row, r));
      rep.learned_row_match_errors.push_back(best);
      const Halfspace pullback(ab_t * l.projected.row.normal, l.projected.row.offset);
      rep.pullback_errors.push_back(halfspace_distance(l.row, pullback));
    }
    rep.monotone = true;
    for (std::size_t k = 0; k < ls.polytopes.size(); ++k) {
      if (!contains(ls.polytopes[k], zinf)) rep.monotone = false;
      if (k > 0 && !contains(ls.polytopes[k - 1], ls.polytopes[k])) rep.monotone = false;
    }
  }

  Rng cert_rng = certification_rng(fo.seed);
  rep.certification = detail::in_module("fail", [&] {
    return certify(make_step_oracle(prob.sys), ls.current(), fo.certification_rollouts, fo.horizon, cert_rng,
                   opt.write_artifacts && c.certification_trajectories);
  });

  const Expectations& e = c.expect;
  if (c.ground_truth) {
    detail::expect_flags(e, "msci", rep.msci_rows, rep.msci_iterations, rep.pass);
    detail::expect_flags(e, "mci", rep.mci_rows, rep.mci_iterations, rep.pass);
    rep.pass["projection_identity"] = rep.projection_hausdorff <= thresholds::kProjectionHausdorff;
    rep.pass["fail_equals_msci"] = rep.fail_equals_msci;
    rep.pass["learned_rows_match"] = worst(rep.learned_row_match_errors) < thresholds::kLearnedRowMatch;
    rep.pass["pullback_match"] = worst(rep.pullback_errors) <= thresholds::kPullbackMatch;
    rep.pass["monotone"] = rep.monotone;
  }
  if (e.learned_rows) rep.pass["learned_rows"] = rep.learned_rows == *e.learned_rows;
  if (e.max_fail_iterations) rep.pass["fail_iterations"] = rep.fail_iterations <= *e.max_fail_iterations;
  if (e.max_failing_trajectories) {
    rep.pass["failing_trajectories"] = rep.failing_trajectory_count <= *e.max_failing_trajectories;
  }
  rep.pass["certified"] = rep.fail_certified;
  rep.pass["certification"] = rep.certification.passed();

  if (opt.write_artifacts) detail::in_module("cli", [&] {
    std::filesystem::create_directories(out);
    write_json((out / "report.json").string(), rep.to_json());
    if (c.plot_data) {
      if (res.msci) emit_plot_data(res.msci->iterates, res.msci->iterations_to_fixpoint, out / "msci", n_x);
      if (res.mci) emit_plot_data(res.mci->iterates, res.mci->iterations_to_fixpoint, out / "mci");
      emit_plot_data(ls, out / "fail");
    } else {
      std::filesystem::create_directories(out / "fail");
      write_json((out / "fail" / "transcript.json").string(), to_json(ls));
    }
    if (c.certification_trajectories) {
      emit_certification_trajectories(rep.certification, n_x, n_u, out / "certification" / "trajectories.csv");
    }
  });
  return res;
}

}  // namespace scinv
