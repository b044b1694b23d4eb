#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include "scinv/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitError = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> rollouts;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  if (needs_config) opt->required();
  cmd->add_option("--seed", c.seed, "override fail.seed");
  cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
  cmd->add_option("--rollouts", c.rollouts, "override fail.certification_rollouts")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", c.quiet, "print nothing on success");
}

scinv::RunOptions run_options(const Common& c) {
  scinv::RunOptions o;
  o.seed = c.seed;
  o.rollouts = c.rollouts;
  o.out_dir = c.out;
  return o;
}

std::filesystem::path out_dir(const Common& c, const scinv::ExperimentConfig& cfg, const char* sub) {
  if (c.out) return *c.out;
  return std::filesystem::path(cfg.output_dir) / sub;
}

scinv::WarningSink sink(const Common& c) {
  if (c.quiet) return [](std::string_view) {};
  return scinv::warn_to_clog;
}

void print(const Common& c, const scinv::Json& j) {
  if (!c.quiet) std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal control invariant and state-control invariant sets for LTI systems"};
  app.require_subcommand(1);

  Common common;
  std::string p_path;
  std::string q_path;

  auto* run = app.add_subcommand("run", "ground truth, learning, certification and validation");
  add_common(run, common, true);
  auto* mci = app.add_subcommand("mci", "maximal control invariant set by fixed-point recursion");
  add_common(mci, common, true);
  auto* msci = app.add_subcommand("msci", "maximal state-control invariant set by fixed-point recursion");
  add_common(msci, common, true);
  auto* learn = app.add_subcommand("fail-learn", "learn the state-control invariant set from failing trajectories");
  add_common(learn, common, true);
  auto* cert = app.add_subcommand("certify", "random-admissible certification of a joint-space polytope");
  add_common(cert, common, true);
  cert->add_option("polytope", p_path, "polytope JSON")->required()->check(CLI::ExistingFile);
  auto* cmp = app.add_subcommand("compare", "containment, equality and Hausdorff distance of two polytopes");
  cmp->add_flag("--quiet", common.quiet, "print nothing");
  cmp->add_option("P", p_path, "polytope JSON")->required()->check(CLI::ExistingFile);
  cmp->add_option("Q", q_path, "polytope JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (cmp->parsed()) {
      const auto c = scinv::compare(scinv::read_polytope(p_path), scinv::read_polytope(q_path));
      print(common, c.to_json());
      return c.equal() ? kExitPass : kExitFail;
    }

    const scinv::ExperimentConfig cfg = scinv::load_config(common.config);
    const scinv::RunOptions opts = run_options(common);

    if (run->parsed()) {
      const auto res = scinv::run_experiment(cfg, opts, sink(common));
      print(common, res.report.to_json());
      return res.report.passed() ? kExitPass : kExitFail;
    }
    if (msci->parsed()) {
      const auto r = scinv::run_msci(cfg, out_dir(common, cfg, "msci"), sink(common));
      print(common, r.to_json());
      return r.passed() ? kExitPass : kExitFail;
    }
    if (mci->parsed()) {
      const auto r = scinv::run_mci(cfg, out_dir(common, cfg, "mci"), sink(common));
      print(common, r.to_json());
      return r.passed() ? kExitPass : kExitFail;
    }
    if (learn->parsed()) {
      const auto s = scinv::run_fail_learn(cfg, opts, out_dir(common, cfg, "fail"), sink(common));
      scinv::Json j;
      j["schema_version"] = scinv::kReportSchemaVersion;
      j["iterations"] = s.iteration();
      j["learned_rows"] = s.learned.size();
      j["failing_trajectories"] = s.failing_trajectories.size();
      j["rollouts_run"] = s.rollouts_run;
      j["certified"] = s.certified;
      print(common, j);
      return s.certified ? kExitPass : kExitFail;
    }
    if (cert->parsed()) {
      const scinv::Polytope p = scinv::read_polytope(p_path);
      const auto r = scinv::run_certify(cfg, p, opts, out_dir(common, cfg, "certification"), sink(common));
      print(common, scinv::to_json(r));
      return r.passed() ? kExitPass : kExitFail;
    }
  } catch (const scinv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const scinv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitConfig;
}
