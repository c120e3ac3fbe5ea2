#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  using namespace chvirial::cli;
  CLI::App app{"Pseudospectral simulation and virial diagnostics for Camassa-Holm type equations"};
  app.require_subcommand(1);

  std::string cfg;
  auto* sim = app.add_subcommand("simulate", "run a scenario and write trajectory.snap and series.csv");
  sim->add_option("config", cfg, "scenario file")->required();
  auto* ver = app.add_subcommand("verify-identities", "check virial identities on a stored trajectory");
  ver->add_option("config", cfg, "scenario file")->required();
  auto* dec = app.add_subcommand("decay-report", "region norms, decay.csv and log-log fits");
  dec->add_option("config", cfg, "scenario file")->required();

  std::string list;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* bat = app.add_subcommand("batch", "simulate every scenario listed in a file");
  bat->add_option("list", list, "file with one scenario path per line")->required();
  bat->add_option("-j,--jobs", workers, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> spec;
  auto* ex = app.add_subcommand("exact-eval", "evaluate a closed-form solution (key=value ...)");
  ex->add_option("spec", spec, "kind=... c= k= p= A= sigma= x0= t= [x=] [N= L=]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (sim->parsed()) return cmd_simulate(cfg, std::cerr);
  if (ver->parsed()) return cmd_verify_identities(cfg, std::cerr);
  if (dec->parsed()) return cmd_decay_report(cfg, std::cerr);
  if (bat->parsed()) return cmd_batch(list, workers, std::cerr);
  return cmd_exact_eval(spec, std::cout, std::cerr);
}
