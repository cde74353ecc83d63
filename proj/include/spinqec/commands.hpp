#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spinqec {

/// Parameters of one CLI invocation. Flags override config-file entries,
/// which override these defaults.
struct RunConfig {
  std::string out_dir = "out";
  std::uint64_t seed = 0xC0FFEE;  // documented default
  int threads = 1;

  // chain
  int n = 8;
  int s = 1;
  int r = 0;  // 0 means the last site
  double coupling = 1.0;

  // time controls
  double t_max = 4000.0;      // optimal-time window of the length sweeps
  double coarse_step = 0.05;
  double scan_t_end = 20.0;   // transfer scan
  double scan_dt = 0.01;
  double t_fixed = 0.0;       // disorder commands; 0 = optimize over (0, N^2]

  // sweeps
  int n_min = 2;
  int n_max = 16;
  std::vector<int> lengths = {8, 16, 24, 32, 40, 48, 56, 64};
  int segment = 8;
  std::string code = "four";

  // disorder
  double delta = 0.001;
  std::vector<double> deltas = {0.0, 0.001, 0.01, 0.03, 0.06, 0.1};
  int m = 1000;
  int bins = 61;
};

int run_transfer(const RunConfig& cfg);
int run_fig2(const RunConfig& cfg);
int run_fig3(const RunConfig& cfg);
int run_dist(const RunConfig& cfg);
int run_fig5(const RunConfig& cfg);
int run_localization(const RunConfig& cfg);

/// Serialize a double with 17 significant digits (round-trip exact).
std::string csv_double(double v);

}  // namespace spinqec
