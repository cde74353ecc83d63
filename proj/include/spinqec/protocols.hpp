#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinqec/disorder.hpp"
#include "spinqec/qec.hpp"

namespace spinqec {

/// One row of a sweep result: parameters in, fidelity statistics out.
/// Fields that a given experiment does not produce stay unset.
struct ExperimentRecord {
  int n = 0;
  int s = 1;
  int r = 0;
  double t = 0.0;
  double delta = 0.0;
  std::string code = "none";  // "none", "four", "five"
  int m = 0;
  std::uint64_t seed = 0;

  std::optional<double> t_star;
  std::optional<double> f_sq;     // |f|^2
  std::optional<double> f2_min;   // worst-case fidelity (or its average)
  std::optional<double> std_err;

  // repeated-QEC extras
  int k_segments = 0;
  std::optional<double> p_segment;
  std::optional<double> p_new_closed_form;
  std::optional<double> f2_closed_form;
  std::optional<double> f2_noqec_stitched;
};

struct OptimalTime {
  double t_star = 0.0;
  double magnitude = 0.0;  // |f(t_star)|
};

/// Coarse scan over (0, t_max] at coarse_step, then golden-section
/// refinement of the best bracket to width 1e-6. The returned magnitude is
/// never below the best coarse sample.
OptimalTime find_optimal_time(const SubspaceHamiltonian& h, int s, int r,
                              double t_max, double coarse_step = 0.05);

/// Window used when optimizing the wait time of disorder-study experiments:
/// (0, N^2/J]. The (0, 4000/J] window of the length sweeps lands on late
/// revivals whose amplitudes are destroyed by even tiny coupling disorder.
double disorder_time_window(int n, double coupling = 1.0);

struct LengthSweepOptions {
  double t_max = 4000.0;
  double coarse_step = 0.05;
  bool with_five = true;
};

/// Per chain length N: t* (s=1, r=N), no-QEC fidelity |f(t*)|^2, and the
/// 4-qubit (Petz) and 5-qubit (syndrome) worst-case fidelities at that t*.
/// Emits one record per (N, code).
std::vector<ExperimentRecord> fidelity_vs_length(
    const std::vector<int>& n_values, const LengthSweepOptions& opts = {});

/// Repeated QEC over a chain of total length L: k = max{k : seg*k < L} hops
/// over `segment_length`-site chains at that chain's t*, plus a final
/// (L - (seg-1)k)-site hop at its own optimal wait time. Also reports the
/// closed form p_new = 1 - (1 - alpha p^2)^k and the stitched no-QEC
/// fidelity of the same hop sequence.
ExperimentRecord repeated_qec_fidelity(int total_length,
                                       int segment_length = 8,
                                       CodeId code = CodeId::kFour,
                                       double t_max = 4000.0);

/// Disorder-averaged adaptive QEC: builds R_avg once from the disorder-
/// averaged amplitude, then averages the exact per-realization worst-case
/// fidelity of R_avg o noise^x4 over model.n_samples realizations.
ExperimentRecord disorder_averaged_qec(const ChainSpec& base,
                                       const DisorderModel& model,
                                       CodeId code, int s, int r, double t);

struct LocalizationProfile {
  Eigen::VectorXd avg_prob;  // <|f_{n,1}(t)|^2> for n = 1..N
  bool fit_ok = false;
  double slope = 0.0;       // of log avg_prob vs site
  double intercept = 0.0;
  double loc_length = 0.0;  // sites over which the fit falls by 1/e
};

/// Monte Carlo site profile of <|f_{n,1}(t)|^2> with a least-squares line
/// fit on log scale over sites where the average exceeds 1e-6.
LocalizationProfile localization_profile(const ChainSpec& base,
                                         const DisorderModel& model, double t);

}  // namespace spinqec
