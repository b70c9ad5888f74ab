#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "skt/app/commands.hpp"

int main(int argc, char** argv) {
  using namespace skt::app;
  CLI::App app{"Monte Carlo and finite-difference solvers for the SKT cross-diffusion system"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string mode;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Run configuration file")->required();
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", seed, "Override the master seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--mode", mode, "layered or picard")->check(CLI::IsMember({"layered", "picard"}));
    sub->add_flag("--progress", opts.progress, "Write per-layer progress.jsonl");
    sub->add_flag("--flip-correction-sign", opts.flip_correction_sign,
                  "Debug: flip the sign of the drift correction in c~");
  };
  auto* solve_mc = app.add_subcommand("solve-mc", "Monte Carlo solution");
  auto* solve_fd = app.add_subcommand("solve-fd", "Finite-difference reference solution");
  auto* verify = app.add_subcommand("verify", "Run the verification checks");
  auto* compare = app.add_subcommand("compare", "Compare Monte Carlo against finite differences");
  for (auto* sub : {solve_mc, solve_fd, verify, compare}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {solve_mc, solve_fd, verify, compare}) {
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--workers")) opts.workers = workers;
  }
  if (!mode.empty()) opts.mode = mode == "picard" ? SolveMode::picard : SolveMode::layered;

  if (solve_mc->parsed()) return cmd_solve_mc(opts, std::cerr);
  if (solve_fd->parsed()) return cmd_solve_fd(opts, std::cerr);
  if (verify->parsed()) return cmd_verify(opts, std::cerr);
  return cmd_compare(opts, std::cerr);
}
