#include "spinqec/protocols.hpp"

#include <cmath>
#include <limits>

#include "spinqec/parallel.hpp"

namespace spinqec {

namespace {

const double kGoldenRatio = (std::sqrt(5.0) - 1.0) / 2.0;

double magnitude_at(const SubspaceHamiltonian& h, int s, int r, double t) {
  return transition_amplitude(h, s, r, t).magnitude;
}

RecoveryMap recovery_for(const QuantumChannel& noise, const CodeSpace& code,
                         CodeId id) {
  if (id == CodeId::kFour) return petz_recovery(noise, code);
  (void)noise;
  return five_qubit_syndrome_recovery();
}

}  // namespace

OptimalTime find_optimal_time(const SubspaceHamiltonian& h, int s, int r,
                              double t_max, double coarse_step) {
  if (t_max <= 0.0) throw std::invalid_argument("t_max must be positive");
  if (coarse_step <= 0.0) throw std::invalid_argument("step must be positive");

  const auto& lam = h.eigenvalues();
  const auto& v = h.eigenvectors();
  Eigen::VectorXd weight_r(h.size()), weight_s(h.size());
  for (int m = 0; m < h.size(); ++m) {
    weight_r[m] = v(r - 1, m);
    weight_s[m] = v(s - 1, m);
  }

  double best_t = coarse_step;
  double best_f = 0.0;
  const auto n_steps = static_cast<std::size_t>(t_max / coarse_step);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double t = i * coarse_step;
    Complex f = 0.0;
    for (int m = 0; m < h.size(); ++m) {
      f += weight_r[m] * weight_s[m] * std::polar(1.0, -lam[m] * t);
    }
    const double mag = std::abs(f);
    if (mag > best_f) {
      best_f = mag;
      best_t = t;
    }
  }

  // Golden-section refinement of the winning bracket; keeps the best sample
  // seen so the result never falls below the coarse maximum.
  double lo = std::max(best_t - coarse_step, coarse_step / 2.0);
  double hi = std::min(best_t + coarse_step, t_max);
  double c = hi - kGoldenRatio * (hi - lo);
  double d = lo + kGoldenRatio * (hi - lo);
  double fc = magnitude_at(h, s, r, c);
  double fd = magnitude_at(h, s, r, d);
  while (hi - lo > 1e-6) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGoldenRatio * (hi - lo);
      fc = magnitude_at(h, s, r, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGoldenRatio * (hi - lo);
      fd = magnitude_at(h, s, r, d);
    }
  }
  const double mid = (lo + hi) / 2.0;
  const double fmid = magnitude_at(h, s, r, mid);

  OptimalTime out{best_t, best_f};
  for (const auto& [tv, fv] : {std::pair{c, fc}, {d, fd}, {mid, fmid}}) {
    if (fv > out.magnitude) out = {tv, fv};
  }
  return out;
}

double disorder_time_window(int n, double coupling) {
  return static_cast<double>(n) * static_cast<double>(n) / coupling;
}

std::vector<ExperimentRecord> fidelity_vs_length(
    const std::vector<int>& n_values, const LengthSweepOptions& opts) {
  const CodeSpace code4 = four_qubit_code();
  const CodeSpace code5 = five_qubit_code();
  const RecoveryMap rec5 = five_qubit_syndrome_recovery();

  std::vector<ExperimentRecord> records;
  for (int n : n_values) {
    if (n < 2) throw std::invalid_argument("sweep needs N >= 2");
    const SubspaceHamiltonian h(ideal_xxx_spec(n, 1.0));
    const OptimalTime opt =
        find_optimal_time(h, 1, n, opts.t_max, opts.coarse_step);
    const TransitionAmplitude f = transition_amplitude(h, 1, n, opt.t_star);

    ExperimentRecord base;
    base.n = n;
    base.s = 1;
    base.r = n;
    base.t = opt.t_star;
    base.t_star = opt.t_star;
    base.f_sq = worst_case_fidelity_noqec(f);

    {
      const QuantumChannel noise = tensor_power(channel_from_amplitude(f), 4);
      ExperimentRecord rec = base;
      rec.code = "four";
      rec.f2_min =
          worst_case_fidelity(noise, petz_recovery(noise, code4), code4)
              .f_sq_min;
      records.push_back(std::move(rec));
    }
    if (opts.with_five) {
      const QuantumChannel noise = tensor_power(channel_from_amplitude(f), 5);
      ExperimentRecord rec = base;
      rec.code = "five";
      rec.f2_min = worst_case_fidelity(noise, rec5, code5).f_sq_min;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

ExperimentRecord repeated_qec_fidelity(int total_length, int segment_length,
                                       CodeId code_id, double t_max) {
  if (segment_length < 2) {
    throw std::invalid_argument("segment length must be at least 2");
  }
  if (total_length < segment_length) {
    throw std::invalid_argument("total length must reach one segment");
  }

  const CodeSpace code =
      (code_id == CodeId::kFour) ? four_qubit_code() : five_qubit_code();
  const int chains = code.n_physical;
  const double alpha = (code_id == CodeId::kFour) ? 7.0 / 4.0 : 15.0 / 8.0;

  // Each segment hop advances segment_length - 1 sites. k is the largest
  // count with segment*k < L; a remainder equal to a full segment folds into
  // the repeat count.
  int k = 0;
  while (static_cast<std::int64_t>(segment_length) * (k + 1) < total_length) {
    ++k;
  }
  int remainder = total_length - (segment_length - 1) * k;
  if (remainder == segment_length) {
    ++k;
    remainder = 0;
  }

  const SubspaceHamiltonian h_seg(ideal_xxx_spec(segment_length, 1.0));
  const OptimalTime opt_seg =
      find_optimal_time(h_seg, 1, segment_length, t_max);
  const TransitionAmplitude f_seg =
      transition_amplitude(h_seg, 1, segment_length, opt_seg.t_star);
  const QuantumChannel noise_seg =
      tensor_power(channel_from_amplitude(f_seg), chains);
  const RecoveryMap rec_seg = recovery_for(noise_seg, code, code_id);

  std::vector<QuantumChannel> stages;
  double noqec = 1.0;
  for (int i = 0; i < k; ++i) {
    stages.push_back(noise_seg);
    stages.push_back(rec_seg);
    noqec *= f_seg.magnitude * f_seg.magnitude;
  }
  if (remainder >= 2) {
    // the leftover stretch runs at its own optimal wait time
    const SubspaceHamiltonian h_rem(ideal_xxx_spec(remainder, 1.0));
    const OptimalTime opt_rem = find_optimal_time(h_rem, 1, remainder, t_max);
    const TransitionAmplitude f_rem =
        transition_amplitude(h_rem, 1, remainder, opt_rem.t_star);
    const QuantumChannel noise =
        tensor_power(channel_from_amplitude(f_rem), chains);
    stages.push_back(noise);
    stages.push_back(recovery_for(noise, code, code_id));
    noqec *= f_rem.magnitude * f_rem.magnitude;
  }

  const FidelityReport report = worst_case_fidelity_pipeline(stages, code);
  const double p = f_seg.damping;
  const double p_new = 1.0 - std::pow(1.0 - alpha * p * p, k);

  ExperimentRecord rec;
  rec.n = total_length;
  rec.s = 1;
  rec.r = total_length;
  rec.t = opt_seg.t_star;
  rec.code = (code_id == CodeId::kFour) ? "four" : "five";
  rec.t_star = opt_seg.t_star;
  rec.f_sq = f_seg.magnitude * f_seg.magnitude;
  rec.f2_min = report.f_sq_min;
  rec.k_segments = k;
  rec.p_segment = p;
  rec.p_new_closed_form = p_new;
  rec.f2_closed_form = 1.0 - p_new;
  rec.f2_noqec_stitched = noqec;
  return rec;
}

ExperimentRecord disorder_averaged_qec(const ChainSpec& base,
                                       const DisorderModel& model, CodeId code_id,
                                       int s, int r, double t) {
  const CodeSpace code =
      (code_id == CodeId::kFour) ? four_qubit_code() : five_qubit_code();
  const int chains = code.n_physical;
  const int m = model.n_samples;

  const Complex f_avg = disorder_averaged_amplitude(base, model, s, r, t);
  const QuantumChannel noise_avg =
      tensor_power(channel_from_amplitude(f_avg), chains);
  const RecoveryMap r_avg = recovery_for(noise_avg, code, code_id);

  std::vector<double> fmin(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const TransitionAmplitude f =
        exact_disordered_amplitude(base, model, i, s, r, t);
    const QuantumChannel noise =
        tensor_power(channel_from_amplitude(f), chains);
    const std::array<QuantumChannel, 2> stages = {noise, r_avg};
    fmin[i] = worst_case_fidelity_pipeline(stages, code).f_sq_min;
  });

  double sum = 0.0, sum2 = 0.0;
  for (double v : fmin) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / m;
  const double var = std::max(sum2 / m - mean * mean, 0.0);

  ExperimentRecord rec;
  rec.n = base.n_sites;
  rec.s = s;
  rec.r = r;
  rec.t = t;
  rec.delta = model.delta;
  rec.code = (code_id == CodeId::kFour) ? "four" : "five";
  rec.m = m;
  rec.seed = model.seed;
  rec.f_sq = std::norm(f_avg);
  rec.f2_min = mean;
  rec.std_err = std::sqrt(var / m);
  return rec;
}

LocalizationProfile localization_profile(const ChainSpec& base,
                                         const DisorderModel& model,
                                         double t) {
  const int n = base.n_sites;
  const int m = model.n_samples;
  if (m < 1) throw std::invalid_argument("need at least one realization");

  std::vector<Eigen::VectorXd> probs(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const ChainSpec spec = sample_disordered_spec(base, model, i);
    const SubspaceHamiltonian h(spec);
    probs[i] = transition_row(h, 1, t).cwiseAbs2();
  });

  LocalizationProfile out;
  out.avg_prob = Eigen::VectorXd::Zero(n);
  for (const auto& p : probs) out.avg_prob += p;
  out.avg_prob /= static_cast<double>(m);

  // line fit of log <|f_{n,1}|^2> against the site index
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int site = 1; site <= n; ++site) {
    const double y = out.avg_prob[site - 1];
    if (y > 1e-6) {
      const double ly = std::log(y);
      sx += site;
      sy += ly;
      sxx += static_cast<double>(site) * site;
      sxy += site * ly;
      ++count;
    }
  }
  if (count >= 2) {
    const double denom = count * sxx - sx * sx;
    if (std::abs(denom) > 0.0) {
      out.fit_ok = true;
      out.slope = (count * sxy - sx * sy) / denom;
      out.intercept = (sy - out.slope * sx) / count;
      out.loc_length = out.slope < 0.0
                           ? -1.0 / out.slope
                           : std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace spinqec
