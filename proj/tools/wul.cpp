#include <iostream>

#include "CLI11.hpp"
#include "wul/driver.hpp"
#include "wul/store.hpp"

namespace {

void common_flags(CLI::App* cmd, std::string& file, wul::RunOptions& o, std::string& ctx, bool& no_ctx,
                  double& timeout, std::string& cfg) {
  cmd->add_option("FILE", file, "benchmark file")->required();
  cmd->add_flag("--skeleton", o.skeleton, "print the proof skeleton and stop");
  cmd->add_flag("--dump-vcs", o.dump_vcs, "print the PVCs before and after optimization");
  cmd->add_flag("--skolemize", o.skolemize, "race a SyGuS query for right-hand existentials");
  cmd->add_flag("--no-optimize", o.no_optimize, "check the unoptimized PVCs");
  cmd->add_option("--ctx", ctx, "assume proven summaries from this store");
  cmd->add_flag("--no-ctx", no_ctx, "ignore any summary store (default)");
  cmd->add_option("--timeout", timeout, "per-query solver timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--solver-config", cfg, "JSON solver configuration")->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unrealizability prover for regular tree grammars of programs"};
  app.require_subcommand(1);

  std::string file, ctx, cfg, save;
  bool no_ctx = false;
  double timeout = 0;
  wul::RunOptions o;

  auto* prove = app.add_subcommand("prove", "check a triple with the given summaries");
  common_flags(prove, file, o, ctx, no_ctx, timeout, cfg);

  auto* synth = app.add_subcommand("synth", "synthesize missing summaries, then check");
  common_flags(synth, file, o, ctx, no_ctx, timeout, cfg);
  synth->add_flag("--unconstrained", o.unconstrained, "use the built-in grammar where no template is given");
  synth->add_option("--save-ctx", save, "append proven summaries to this store");

  wul::OracleRunOptions oo;
  std::string domain = "0..3";
  auto* oracle = app.add_subcommand("oracle", "test the triple on all programs up to a depth");
  oracle->add_option("FILE", file, "benchmark file")->required();
  oracle->add_option("--depth", oo.depth, "derivation depth")->check(CLI::PositiveNumber);
  oracle->add_option("--domain", domain, "initial value range LO..HI");
  oracle->add_option("--fuel", oo.fuel, "loop iteration bound")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : wul::kExitError;
  }

  try {
    wul::Benchmark b = wul::load_benchmark(file);
    if (oracle->parsed()) {
      std::tie(oo.lo, oo.hi) = wul::parse_domain(domain);
      return wul::cmd_oracle(b, oo, std::cout);
    }
    if (!ctx.empty() && !no_ctx) o.ctx_store = ctx;
    if (!save.empty()) o.save_store = save;
    if (timeout > 0) o.timeout = timeout;
    if (!cfg.empty()) o.solver_config = cfg;
    return prove->parsed() ? wul::cmd_prove(b, o, std::cout) : wul::cmd_synth(b, o, std::cout);
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << "\n";
    return wul::kExitError;
  }
}
