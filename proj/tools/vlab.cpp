// vlab: run one experiment, or the acceptance suite.
//
//   vlab <experiment> --bases walsh:8 --p 1/2 --phi const1 --kmax 3 --seed 0 --out results
//   vlab verify [--out dir] [--tamper-kernel]
//
// Exit codes: 0 ok, 1 config error, 2 assertion failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vlab/vlab.hpp"

namespace {

struct Flags {
  std::string bases, p, phi, out, config, variant, rho;
  std::size_t kmax = vlab::kAll, samples = 0, detail = vlab::kAll;
  std::uint64_t seed = 0;
  bool parallel = false;
};

void add_experiment_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--bases", f.bases, "walsh:N or a comma list of bases (default walsh:8)");
  cmd.add_option("--p", f.p, "exponent, decimal or fraction such as 1/2 (default 1/2)");
  cmd.add_option("--phi", f.phi, "phi preset: const1, log, loglog, critical (default const1)");
  cmd.add_option("--kmax", f.kmax, "largest k (or n) swept");
  cmd.add_option("--seed", f.seed, "random seed (default 0)");
  cmd.add_option("--out", f.out, "output directory (default .)");
  cmd.add_option("--samples", f.samples, "random functions or atoms per level");
  cmd.add_option("--detail", f.detail, "sub-levels of detail in random atoms");
  cmd.add_option("--variant", f.variant, "coefficient variant for counterexample-4b: inv_Mi, inv_M2i");
  cmd.add_option("--rho", f.rho, "spectral decay of the modulus-convergence test function");
  cmd.add_flag("--parallel", f.parallel, "run independent sweeps concurrently");
  cmd.add_option("--config", f.config, "JSON config; its keys override the flags");
}

vlab::ExperimentConfig build_config(const std::string& experiment, const Flags& f) {
  vlab::ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (!f.bases.empty()) cfg.bases = f.bases;
  if (!f.p.empty()) cfg.p = vlab::parse_real(f.p);
  if (!f.phi.empty()) cfg.phi = f.phi;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.variant.empty()) cfg.variant = f.variant;
  if (!f.rho.empty()) cfg.rho = vlab::parse_real(f.rho);
  cfg.kmax = f.kmax;
  cfg.seed = f.seed;
  cfg.samples = f.samples;
  cfg.detail = f.detail;
  cfg.parallel = f.parallel;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw vlab::ConfigError("cannot open config file " + f.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw vlab::ConfigError(std::string("malformed config file: ") + e.what());
    }
    cfg = vlab::apply_json(cfg, j);
  }
  cfg.ceiling = vlab::ceiling_from_env(std::getenv("VLAB_CEILING"));
  return cfg;
}

int run_experiment(const std::string& experiment, const Flags& f) {
  const vlab::RunResult r = vlab::run(build_config(experiment, f));
  std::printf("%s: %s\n", experiment.c_str(), r.summary.c_str());
  for (const auto& file : r.files) std::printf("  wrote %s\n", file.c_str());
  for (const auto& failure : r.failures) std::printf("  ASSERTION FAILED: %s\n", failure.c_str());
  return r.exit_code;
}

int run_verify(const std::string& out, bool tamper, bool parallel, bool rerun) {
  vlab::ceiling_from_env(std::getenv("VLAB_CEILING"));
  vlab::VerifyOptions o;
  if (!out.empty()) o.out = out;
  o.tamper_kernel = tamper;
  o.parallel = parallel;
  o.determinism = rerun;
  bool all = true;
  vlab::verify_all(o, [&](const vlab::CriterionResult& r) {
    all &= r.passed;
    std::printf("[%s] %2d %-36s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  });
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computation on bounded Vilenkin groups"};
  app.require_subcommand(1);

  Flags flags;
  for (const auto& name : vlab::experiment_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_experiment_options(*cmd, flags);
    cmd->callback([&, name] { throw CLI::RuntimeError(run_experiment(name, flags)); });
  }

  std::string verify_out;
  bool tamper = false, verify_parallel = false, no_rerun = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--out", verify_out, "directory for the criterion CSVs (default verify-out)");
  verify->add_flag("--tamper-kernel", tamper, "perturb the factored kernel route (negative control)");
  verify->add_flag("--parallel", verify_parallel, "run independent sweeps concurrently");
  verify->add_flag("--no-rerun", no_rerun, "skip the determinism rerun");
  verify->callback([&] { throw CLI::RuntimeError(run_verify(verify_out, tamper, verify_parallel, !no_rerun)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const vlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const vlab::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  return 0;
}
