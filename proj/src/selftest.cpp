#include "spinqec/selftest.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "spinqec/commands.hpp"
#include "spinqec/counter_rng.hpp"
#include "spinqec/parallel.hpp"
#include "spinqec/protocols.hpp"

namespace spinqec {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

ChainSpec random_spec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coupling(0.2, 1.0);
  std::uniform_real_distribution<double> field(-0.5, 0.5);
  ChainSpec spec;
  spec.n_sites = n;
  spec.xx_couplings.resize(n - 1);
  spec.zz_couplings.resize(n - 1);
  spec.fields.resize(n);
  for (int k = 0; k + 1 < n; ++k) {
    spec.xx_couplings[k] = coupling(rng);
    spec.zz_couplings[k] = coupling(rng);
  }
  for (int j = 0; j < n; ++j) spec.fields[j] = field(rng);
  return spec;
}

// ---------------------------------------------------------------------------
// criterion implementations
// ---------------------------------------------------------------------------

CriterionResult criterion_oracle_equivalence(std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed ^ 0x01);
  std::uniform_real_distribution<double> time_dist(0.0, 20.0);

  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      const ChainSpec spec = random_spec(n, rng);
      const SubspaceHamiltonian h(spec);
      const Eigen::MatrixXcd full = build_full_hamiltonian(spec);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(full);
      const double e0 = full(0, 0).real();

      const double t = time_dist(rng);
      const int s = 1 + static_cast<int>(rng() % n);
      const int r = 1 + static_cast<int>(rng() % n);
      const auto idx = [n](int site) { return std::size_t{1} << (n - site); };

      Eigen::VectorXcd phases(solver.eigenvalues().size());
      for (int m = 0; m < phases.size(); ++m) {
        phases[m] = std::polar(1.0, -(solver.eigenvalues()[m] - e0) * t);
      }
      const Complex f_full =
          (solver.eigenvectors().row(idx(r)).array() * phases.transpose().array() *
           solver.eigenvectors().row(idx(s)).conjugate().array())
              .sum();
      const Complex f_sub = transition_amplitude(h, s, r, t).value;
      worst = std::max(worst, std::abs(f_full - f_sub));
    }
  }

  const double elapsed = seconds_since(start);
  CriterionResult res{1, "oracle equivalence (subspace vs full space)"};
  res.seconds = elapsed;
  res.passed = worst < 1e-10 && elapsed < 30.0;
  res.detail = "max |f_sub - f_full| = " + fmt(worst, 3) + ", " +
               fmt(elapsed, 3) + " s (limit 30 s)";
  return res;
}

CriterionResult criterion_unitarity(std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed ^ 0x02);
  std::uniform_real_distribution<double> time_dist(0.0, 50.0);

  double worst = 0.0;
  for (int n : {3, 8, 17, 33, 64}) {
    const ChainSpec spec = random_spec(n, rng);
    const SubspaceHamiltonian h(spec);
    for (int rep = 0; rep < 20; ++rep) {
      const double t = time_dist(rng);
      Eigen::MatrixXcd prop(n, n);
      for (int s = 1; s <= n; ++s) prop.col(s - 1) = transition_row(h, s, t);
      const double err =
          (prop * prop.adjoint() - Eigen::MatrixXcd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff();
      worst = std::max(worst, err);
    }
  }

  CriterionResult res{2, "propagator unitarity up to N = 64"};
  res.seconds = seconds_since(start);
  res.passed = worst < 1e-10;
  res.detail = "max unitarity defect = " + fmt(worst, 3);
  return res;
}

struct CoefficientFit {
  double intercept = 0.0;
  std::array<double, 3> values{};
};

CoefficientFit fit_quadratic_coefficient(CodeId code_id) {
  const CodeSpace code =
      (code_id == CodeId::kFour) ? four_qubit_code() : five_qubit_code();
  const int chains = code.n_physical;
  const std::array<double, 3> ps = {0.005, 0.01, 0.02};

  CoefficientFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    const double p = ps[i];
    const QuantumChannel noise = tensor_power(
        channel_from_amplitude(Complex(std::sqrt(1.0 - p), 0.0)), chains);
    const RecoveryMap rec = (code_id == CodeId::kFour)
                                ? petz_recovery(noise, code)
                                : five_qubit_syndrome_recovery();
    const double fmin = worst_case_fidelity(noise, rec, code).f_sq_min;
    const double y = (1.0 - fmin) / (p * p);
    fit.values[i] = y;
    sx += p;
    sy += y;
    sxx += p * p;
    sxy += p * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  fit.intercept = (sy - slope * sx) / 3;
  return fit;
}

double mod_pi_distance(double angle, double target) {
  double a = std::fmod(angle, kPi);
  if (a < 0) a += kPi;
  return std::min(std::abs(a - target), kPi - std::abs(a - target));
}

CriterionResult criterion_theorem1() {
  const auto start = Clock::now();
  const CoefficientFit fit = fit_quadratic_coefficient(CodeId::kFour);

  const CodeSpace code = four_qubit_code();
  const double p = 0.005;
  const QuantumChannel noise = tensor_power(
      channel_from_amplitude(Complex(std::sqrt(1.0 - p), 0.0)), 4);
  const FidelityReport report =
      worst_case_fidelity(noise, petz_recovery(noise, code), code);
  const double dtheta = mod_pi_distance(report.argmin_theta, kPi / 2);
  const double dphi = mod_pi_distance(report.argmin_phi, kPi / 2);

  const double elapsed = seconds_since(start);
  CriterionResult res{3, "Theorem 1 quadratic coefficient (4-qubit)"};
  res.seconds = elapsed;
  res.passed = std::abs(fit.intercept - 1.75) <= 0.02 && dtheta < 1e-3 &&
               dphi < 1e-3 && elapsed < 120.0;
  res.detail = "fitted = " + fmt(fit.intercept, 6) +
               " (target 1.75 +- 0.02), argmin off by (" + fmt(dtheta, 2) +
               ", " + fmt(dphi, 2) + ") rad mod pi, " + fmt(elapsed, 3) +
               " s (limit 120 s)";
  return res;
}

CriterionResult criterion_five_qubit_coefficient() {
  const auto start = Clock::now();
  const CoefficientFit fit = fit_quadratic_coefficient(CodeId::kFive);

  CriterionResult res{4, "5-qubit quadratic coefficient"};
  res.seconds = seconds_since(start);
  res.passed = std::abs(fit.intercept - 1.875) <= 0.02;
  res.detail = "fitted = " + fmt(fit.intercept, 6) + " (target 1.875 +- 0.02)";
  return res;
}

CriterionResult criterion_theta_independence() {
  const auto start = Clock::now();
  const CodeSpace code = four_qubit_code();
  const std::array<double, 5> thetas = {0.0, 0.7, kPi / 3, 2.1, kPi};

  double worst = 0.0;
  for (double mag : {0.7, 0.9, 0.99}) {
    Eigen::MatrixXcd reference;
    for (double theta : thetas) {
      const QuantumChannel noise =
          tensor_power(channel_from_amplitude(std::polar(mag, theta)), 4);
      const QuantumChannel composite =
          compose(petz_recovery(noise, code), noise);
      const Eigen::MatrixXcd choi = choi_matrix(composite);
      if (reference.size() == 0) {
        reference = choi;
      } else {
        worst = std::max(worst, (choi - reference).cwiseAbs().maxCoeff());
      }
    }
  }

  CriterionResult res{5, "Theta independence of the composite map"};
  res.seconds = seconds_since(start);
  res.passed = worst < 1e-10;
  res.detail = "max Choi deviation across Theta = " + fmt(worst, 3);
  return res;
}

CriterionResult criterion_break_even() {
  const auto start = Clock::now();

  struct Scan {
    const char* label;
    CodeId id;
    double target;
    double crossing = std::numeric_limits<double>::quiet_NaN();
    double min_gap = std::numeric_limits<double>::infinity();
    double min_gap_p = 0.0;
  };
  std::array<Scan, 2> scans = {Scan{"4-qubit", CodeId::kFour, 4.0 / 7.0},
                               Scan{"5-qubit", CodeId::kFive, 8.0 / 15.0}};

  for (Scan& scan : scans) {
    const CodeSpace code =
        (scan.id == CodeId::kFour) ? four_qubit_code() : five_qubit_code();
    const int chains = code.n_physical;
    auto gap = [&](double p) {
      const QuantumChannel noise = tensor_power(
          channel_from_amplitude(Complex(std::sqrt(1.0 - p), 0.0)), chains);
      const RecoveryMap rec = (scan.id == CodeId::kFour)
                                  ? petz_recovery(noise, code)
                                  : five_qubit_syndrome_recovery();
      return worst_case_fidelity(noise, rec, code).f_sq_min - (1.0 - p);
    };

    double prev_p = 0.02;
    double prev_gap = gap(prev_p);
    for (double p = 0.04; p <= 0.981; p += 0.02) {
      const double g = gap(p);
      if (g < scan.min_gap) {
        scan.min_gap = g;
        scan.min_gap_p = p;
      }
      if (prev_gap > 0.0 != g > 0.0) {
        double lo = prev_p, hi = p;
        for (int i = 0; i < 40; ++i) {
          const double mid = (lo + hi) / 2.0;
          ((gap(mid) > 0.0) == (prev_gap > 0.0) ? lo : hi) = mid;
        }
        scan.crossing = (lo + hi) / 2.0;
        break;
      }
      prev_p = p;
      prev_gap = g;
    }
  }

  CriterionResult res{6, "break-even thresholds from exact fidelities"};
  res.seconds = seconds_since(start);
  bool ok = true;
  std::string detail;
  for (const Scan& scan : scans) {
    if (std::isnan(scan.crossing)) {
      ok = false;
      detail += std::string(scan.label) +
                ": no crossing on p in (0,1); exact worst-case fidelity "
                "stays above 1-p everywhere (smallest gap " +
                fmt(scan.min_gap, 4) + " at p = " + fmt(scan.min_gap_p, 3) +
                "). ";
    } else {
      const bool in_band = std::abs(scan.crossing - scan.target) <= 0.03;
      ok = ok && in_band;
      detail += std::string(scan.label) + ": crossing at p = " +
                fmt(scan.crossing, 4) + " (target " + fmt(scan.target, 4) +
                " +- 0.03). ";
    }
  }
  res.passed = ok;
  res.detail = detail;
  return res;
}

struct DisorderFixture {
  ChainSpec base;
  double t_star;
  DysonCoefficients coeffs;

  DisorderFixture()
      : base(ideal_xxx_spec(8, 1.0)),
        t_star(find_optimal_time(SubspaceHamiltonian(base), 1, 8,
                                 disorder_time_window(8))
                   .t_star),
        coeffs(dyson_first_order_coeffs(base, 1, 8, t_star)) {}
};

const DisorderFixture& disorder_fixture() {
  static const DisorderFixture fixture;
  return fixture;
}

CriterionResult criterion_dyson(std::uint64_t seed) {
  const auto start = Clock::now();
  const auto& fx = disorder_fixture();
  const int bonds = 7;

  // central finite differences against the exact disordered amplitude
  double fd_worst = 0.0;
  const double eps = 1e-5;
  for (int i = 0; i < bonds; ++i) {
    ChainSpec plus = fx.base, minus = fx.base;
    plus.xx_couplings[i] += eps / 2.0;
    plus.zz_couplings[i] += eps / 2.0;
    minus.xx_couplings[i] -= eps / 2.0;
    minus.zz_couplings[i] -= eps / 2.0;
    const Complex fp =
        transition_amplitude(SubspaceHamiltonian(plus), 1, 8, fx.t_star).value;
    const Complex fm =
        transition_amplitude(SubspaceHamiltonian(minus), 1, 8, fx.t_star).value;
    const Complex fd = (fp - fm) / (2.0 * eps);
    fd_worst = std::max(fd_worst, std::abs(fd - fx.coeffs.c[i]));
  }

  const double delta = 0.001;
  const DisorderMoments moments =
      disorder_moments(fx.coeffs, delta, 100000, seed ^ 0x07);
  const double ratio_re = moments.var_re / moments.var_predicted_re;
  const double ratio_im = moments.var_im / moments.var_predicted_im;

  const double elapsed = seconds_since(start);
  CriterionResult res{7, "Dyson coefficients (finite differences + variance)"};
  res.seconds = elapsed;
  res.passed = fd_worst < 1e-6 && std::abs(ratio_re - 1.0) < 0.05 &&
               std::abs(ratio_im - 1.0) < 0.05 && elapsed < 300.0;
  res.detail = "fd err = " + fmt(fd_worst, 3) +
               ", var ratios (re, im) = " + fmt(ratio_re, 4) + ", " +
               fmt(ratio_im, 4) + ", " + fmt(elapsed, 3) + " s (limit 300 s)";
  return res;
}

CriterionResult criterion_distribution(std::uint64_t seed) {
  const auto start = Clock::now();
  const auto& fx = disorder_fixture();
  const double delta = 0.001;
  const int m = 100000;
  const int bonds = 7;

  double worst_ks = 0.0;
  double worst_integral_err = 0.0;
  for (Component comp : {Component::kRe, Component::kIm}) {
    const AmplitudeDistribution dist =
        analytic_density(fx.coeffs, delta, comp);

    std::vector<double> samples(m);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
      Eigen::VectorXd deltas(bonds);
      for (int k = 0; k < bonds; ++k) {
        deltas[k] = counter_uniform_symmetric(seed ^ 0x08, i, k, delta);
      }
      const Complex f = perturbative_amplitude(fx.coeffs, deltas);
      samples[i] = comp == Component::kRe ? f.real() : f.imag();
    });
    std::sort(samples.begin(), samples.end());
    double ks = 0.0;
    for (int i = 0; i < m; ++i) {
      const double c = dist.cdf(samples[i]);
      ks = std::max(ks, std::abs(c - static_cast<double>(i) / m));
      ks = std::max(ks, std::abs(c - static_cast<double>(i + 1) / m));
    }
    worst_ks = std::max(worst_ks, ks);

    // independent quadrature of the density over its support
    const int steps = 16384;
    const double h = (dist.support_hi() - dist.support_lo()) / steps;
    double integral = dist.density(dist.support_lo()) +
                      dist.density(dist.support_hi());
    for (int i = 1; i < steps; ++i) {
      integral +=
          dist.density(dist.support_lo() + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    integral *= h / 3.0;
    worst_integral_err = std::max(worst_integral_err,
                                  std::abs(integral - 1.0));
  }

  CriterionResult res{8, "analytic amplitude distribution vs Monte Carlo"};
  res.seconds = seconds_since(start);
  res.passed = worst_ks <= 0.01 && worst_integral_err <= 1e-6;
  res.detail = "max KS = " + fmt(worst_ks, 4) + " (limit 0.01), integral err = " +
               fmt(worst_integral_err, 3);
  return res;
}

CriterionResult criterion_disorder_averaged_qec(std::uint64_t seed) {
  const auto start = Clock::now();
  const auto& fx = disorder_fixture();

  std::string detail;
  bool ok = true;
  for (const auto& [delta, want_high] :
       {std::pair{0.001, true}, {0.01, true}, {0.06, false}, {0.1, false}}) {
    DisorderModel model{delta, 1.0, 1000, seed ^ 0x09};
    const ExperimentRecord rec = disorder_averaged_qec(
        fx.base, model, CodeId::kFour, 1, 8, fx.t_star);
    const double value = *rec.f2_min;
    const bool pass = want_high ? value >= 0.8 : value < 0.5;
    ok = ok && pass;
    detail += "delta=" + fmt(delta, 3) + ": <F2min> = " + fmt(value, 4) +
              (want_high ? " (need >= 0.8)" : " (need < 0.5)") +
              (pass ? " ok; " : " FAIL; ");
  }

  const double elapsed = seconds_since(start);
  CriterionResult res{9, "disorder-averaged adaptive QEC (Fig. 5 regime)"};
  res.seconds = elapsed;
  res.passed = ok && elapsed < 600.0;
  res.detail = detail + fmt(elapsed, 3) + " s (limit 600 s)";
  return res;
}

CriterionResult criterion_localization(std::uint64_t seed) {
  const auto start = Clock::now();
  const auto& fx = disorder_fixture();
  const int m = 3000;

  auto end_prob = [&](double delta) {
    DisorderModel model{delta, 1.0, m, seed ^ 0x0a};
    return localization_profile(fx.base, model, fx.t_star).avg_prob[7];
  };

  // monotone over the sampled grid
  const std::array<double, 4> grid = {0.01, 0.03, 0.06, 0.1};
  std::string detail = "profile(8): ";
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : grid) {
    const double v = end_prob(delta);
    detail += "d=" + fmt(delta, 3) + ":" + fmt(v, 4) + " ";
    monotone = monotone && v < prev;
    prev = v;
  }

  // crossing of 0.43 inside [0.04, 0.09]
  const double at_lo = end_prob(0.04);
  const double at_hi = end_prob(0.09);
  double crossing = std::numeric_limits<double>::quiet_NaN();
  if (at_lo > 0.43 && at_hi < 0.43) {
    double lo = 0.04, hi = 0.09;
    for (int i = 0; i < 12; ++i) {
      const double mid = (lo + hi) / 2.0;
      (end_prob(mid) > 0.43 ? lo : hi) = mid;
    }
    crossing = (lo + hi) / 2.0;
  }

  CriterionResult res{10, "localization threshold of <|f_81|^2>"};
  res.seconds = seconds_since(start);
  res.passed = monotone && !std::isnan(crossing);
  res.detail = detail + "| at 0.04: " + fmt(at_lo, 4) + ", at 0.09: " +
               fmt(at_hi, 4) +
               (std::isnan(crossing)
                    ? " (no 0.43 crossing inside [0.04, 0.09])"
                    : ", crossing 0.43 at delta = " + fmt(crossing, 4));
  return res;
}

CriterionResult criterion_repeated_qec() {
  const auto start = Clock::now();
  const CodeSpace code = four_qubit_code();

  bool exceed_ok = true;
  std::string detail;
  for (int length : {16, 24, 32}) {
    const ExperimentRecord rep = repeated_qec_fidelity(length, 8,
                                                       CodeId::kFour);
    const SubspaceHamiltonian h(ideal_xxx_spec(length, 1.0));
    const OptimalTime opt = find_optimal_time(h, 1, length, 4000.0);
    const TransitionAmplitude f =
        transition_amplitude(h, 1, length, opt.t_star);
    const QuantumChannel noise = tensor_power(channel_from_amplitude(f), 4);
    const double single =
        worst_case_fidelity(noise, petz_recovery(noise, code), code).f_sq_min;
    const bool pass = *rep.f2_min > single;
    exceed_ok = exceed_ok && pass;
    detail += "L=" + std::to_string(length) + ": repeated " +
              fmt(*rep.f2_min, 4) + " vs single " + fmt(single, 4) +
              (pass ? " ok; " : " FAIL; ");
  }

  // closed form vs k equal segments at p <= 0.1
  bool closed_ok = true;
  double worst_rel = 0.0;
  for (double p : {0.02, 0.05, 0.1}) {
    const QuantumChannel noise = tensor_power(
        channel_from_amplitude(Complex(std::sqrt(1.0 - p), 0.0)), 4);
    const RecoveryMap rec = petz_recovery(noise, code);
    std::vector<QuantumChannel> stages;
    for (int k = 1; k <= 3; ++k) {
      stages.push_back(noise);
      stages.push_back(rec);
      const double sim =
          1.0 - worst_case_fidelity_pipeline(stages, code).f_sq_min;
      const double closed = 1.0 - std::pow(1.0 - 1.75 * p * p, k);
      const double rel = std::abs(sim - closed) / closed;
      worst_rel = std::max(worst_rel, rel);
      closed_ok = closed_ok && rel <= 0.2;
    }
  }
  detail += "closed-form worst rel err = " + fmt(worst_rel, 3) +
            " (limit 0.2)";

  CriterionResult res{11, "repeated QEC beats single shot; closed form"};
  res.seconds = seconds_since(start);
  res.passed = exceed_ok && closed_ok;
  res.detail = detail;
  return res;
}

CriterionResult criterion_reproducibility(const SelftestOptions& opts) {
  const auto start = Clock::now();

  auto run_into = [&](const std::string& sub) {
    RunConfig cfg;
    cfg.seed = opts.seed;
    cfg.threads = opts.threads;
    cfg.out_dir = (fs::path(opts.out_dir) / sub).string();
    cfg.n = 8;
    cfg.scan_t_end = 10.0;
    cfg.m = 200;
    cfg.deltas = {0.0, 0.01};
    cfg.bins = 41;
    run_transfer(cfg);
    run_fig5(cfg);
    run_dist(cfg);
    return cfg.out_dir;
  };

  const std::string dir1 = run_into("selftest_rep1");
  const std::string dir2 = run_into("selftest_rep2");

  bool identical = true;
  std::string mismatch;
  for (const char* name :
       {"transfer.csv", "fig5.csv", "dist_hist.csv", "dist_analytic.csv"}) {
    std::ifstream a(fs::path(dir1) / name), b(fs::path(dir2) / name);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (sa.str().empty() || sa.str() != sb.str()) {
      identical = false;
      mismatch += std::string(name) + " ";
    }
  }

  CriterionResult res{12, "byte-identical CSV artifacts across reruns"};
  res.seconds = seconds_since(start);
  res.passed = identical;
  res.detail = identical ? "4 CSV artifacts identical across two runs"
                         : "mismatch in: " + mismatch;
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const SelftestOptions& opts,
                                            std::ostream* progress) {
  set_max_threads(opts.threads);
  std::vector<CriterionResult> results;
  auto record = [&](CriterionResult res) {
    if (progress) {
      (*progress) << (res.passed ? "[PASS] " : "[FAIL] ") << "criterion "
                  << res.id << ": " << res.name << " -- " << res.detail
                  << "\n";
      progress->flush();
    }
    results.push_back(std::move(res));
  };

  record(criterion_oracle_equivalence(opts.seed));
  record(criterion_unitarity(opts.seed));
  record(criterion_theorem1());
  record(criterion_five_qubit_coefficient());
  record(criterion_theta_independence());
  record(criterion_break_even());
  record(criterion_dyson(opts.seed));
  record(criterion_distribution(opts.seed));
  record(criterion_disorder_averaged_qec(opts.seed));
  record(criterion_localization(opts.seed));
  record(criterion_repeated_qec());
  record(criterion_reproducibility(opts));
  return results;
}

}  // namespace spinqec
