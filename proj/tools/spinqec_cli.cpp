#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "spinqec/commands.hpp"
#include "spinqec/selftest.hpp"

using spinqec::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{
      "spinqec - spin-chain state transfer as a noisy channel, with "
      "adaptive quantum error correction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "plain-text key=value config file");

  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads")
      ->capture_default_str();

  auto add_chain_options = [&](CLI::App* cmd) {
    cmd->add_option("--n", cfg.n, "chain length")->capture_default_str();
    cmd->add_option("--s", cfg.s, "sender site (1-based)")
        ->capture_default_str();
    cmd->add_option("--r", cfg.r, "receiver site (default: last)")
        ->capture_default_str();
  };
  auto add_disorder_options = [&](CLI::App* cmd, bool single_delta) {
    cmd->add_option("--m", cfg.m, "Monte Carlo realizations")
        ->capture_default_str();
    cmd->add_option("--t", cfg.t_fixed,
                    "fixed evolution time (default: optimal over (0, N^2])");
    if (single_delta) {
      cmd->add_option("--delta", cfg.delta, "disorder strength")
          ->capture_default_str();
    } else {
      cmd->add_option("--deltas", cfg.deltas, "disorder strengths")
          ->capture_default_str();
    }
  };

  CLI::App* transfer =
      app.add_subcommand("transfer", "time scan of the transition amplitude");
  add_chain_options(transfer);
  transfer->add_option("--t-end", cfg.scan_t_end, "scan end time")
      ->capture_default_str();
  transfer->add_option("--dt", cfg.scan_dt, "scan step")
      ->capture_default_str();

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "fidelity vs chain length, with and without QEC");
  fig2->add_option("--n-min", cfg.n_min, "first length")
      ->capture_default_str();
  fig2->add_option("--n-max", cfg.n_max, "last length")->capture_default_str();
  fig2->add_option("--t-max", cfg.t_max, "optimal-time window")
      ->capture_default_str();

  CLI::App* fig3 =
      app.add_subcommand("fig3", "repeated QEC every 8 sites vs single shot");
  fig3->add_option("--lengths", cfg.lengths, "total chain lengths")
      ->capture_default_str();
  fig3->add_option("--segment", cfg.segment, "segment length")
      ->capture_default_str();
  fig3->add_option("--code", cfg.code, "four or five")->capture_default_str();

  CLI::App* dist = app.add_subcommand(
      "dist", "distribution of the disordered transition amplitude");
  add_chain_options(dist);
  add_disorder_options(dist, true);
  dist->add_option("--bins", cfg.bins, "histogram bins")
      ->capture_default_str();

  CLI::App* fig5 = app.add_subcommand(
      "fig5", "disorder-averaged worst-case fidelity with R_avg");
  add_chain_options(fig5);
  add_disorder_options(fig5, false);
  fig5->add_option("--code", cfg.code, "four or five")->capture_default_str();

  CLI::App* localization = app.add_subcommand(
      "localization", "site profile of the disorder-averaged amplitude");
  add_chain_options(localization);
  add_disorder_options(localization, false);

  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the acceptance suite and print pass/fail per criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*transfer) return spinqec::run_transfer(cfg);
    if (*fig2) return spinqec::run_fig2(cfg);
    if (*fig3) return spinqec::run_fig3(cfg);
    if (*dist) return spinqec::run_dist(cfg);
    if (*fig5) return spinqec::run_fig5(cfg);
    if (*localization) return spinqec::run_localization(cfg);
    if (*selftest) {
      spinqec::SelftestOptions opts;
      opts.seed = cfg.seed;
      opts.out_dir = cfg.out_dir;
      opts.threads = cfg.threads;
      const auto results = spinqec::run_acceptance(opts, &std::cout);
      int failed = 0;
      for (const auto& res : results) failed += res.passed ? 0 : 1;
      std::cout << (failed == 0 ? "all criteria passed"
                                : std::to_string(failed) +
                                      " criterion(s) failed")
                << "\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
