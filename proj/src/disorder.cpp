#include "spinqec/disorder.hpp"

#include <cmath>
#include <limits>

#include "spinqec/counter_rng.hpp"
#include "spinqec/parallel.hpp"

namespace spinqec {

namespace {

constexpr double kWeightDropTol = 1e-14;
constexpr int kMaxDensityBonds = 20;  // 2^20 signed terms

void require_ideal_xxx(const ChainSpec& base, double mean_coupling) {
  base.validate();
  const double half = mean_coupling / 2.0;
  for (int k = 0; k + 1 < base.n_sites; ++k) {
    if (std::abs(base.xx_couplings[k] - half) > 1e-12 ||
        std::abs(base.zz_couplings[k] - half) > 1e-12) {
      throw std::invalid_argument(
          "base spec must be the ideal XXX chain with the model's mean "
          "coupling");
    }
  }
  if (base.fields.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("base spec must have zero fields");
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

ChainSpec sample_disordered_spec(const ChainSpec& base,
                                 const DisorderModel& model,
                                 std::uint64_t index) {
  require_ideal_xxx(base, model.mean_coupling);
  ChainSpec spec = base;
  const double half = model.mean_coupling / 2.0;
  for (int k = 0; k + 1 < base.n_sites; ++k) {
    const double dk = counter_uniform_symmetric(model.seed, index,
                                                static_cast<std::uint64_t>(k),
                                                model.delta);
    // one coefficient per bond: XX and ZZ keep the Heisenberg form
    spec.xx_couplings[k] = half * (1.0 + dk);
    spec.zz_couplings[k] = half * (1.0 + dk);
  }
  return spec;
}

TransitionAmplitude exact_disordered_amplitude(const ChainSpec& base,
                                               const DisorderModel& model,
                                               std::uint64_t index, int s,
                                               int r, double t) {
  const ChainSpec spec = sample_disordered_spec(base, model, index);
  const SubspaceHamiltonian h(spec);
  return transition_amplitude(h, s, r, t);
}

DysonCoefficients dyson_first_order_coeffs(const ChainSpec& base, int s, int r,
                                           double t) {
  const double mean_coupling = 2.0 * base.xx_couplings[0];
  require_ideal_xxx(base, mean_coupling);
  const SubspaceHamiltonian h0(base);
  const int n = base.n_sites;
  const auto& lam = h0.eigenvalues();
  const auto& v = h0.eigenvectors();

  // Closed-form time integrals in the eigenbasis.
  Eigen::MatrixXcd g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double dl = lam[a] - lam[b];
      if (std::abs(dl) < 1e-12) {
        g(a, b) = t;
      } else {
        g(a, b) = (std::polar(1.0, dl * t) - 1.0) / Complex(0.0, dl);
      }
    }
  }

  Eigen::VectorXcd left(n);
  for (int a = 0; a < n; ++a) {
    left[a] = v(r - 1, a) * std::polar(1.0, -lam[a] * t);
  }

  DysonCoefficients coeffs;
  coeffs.c = Eigen::VectorXcd::Zero(n - 1);
  coeffs.base = base;
  coeffs.s = s;
  coeffs.r = r;
  coeffs.t = t;
  coeffs.base_amplitude = transition_amplitude(h0, s, r, t).value;

  for (int i = 0; i + 1 < n; ++i) {
    // Unit-perturbation subspace matrix (the ground shift rides along since
    // both terms carry their own gauge).
    ChainSpec bumped = base;
    bumped.xx_couplings[i] += mean_coupling / 2.0;
    bumped.zz_couplings[i] += mean_coupling / 2.0;
    const Eigen::MatrixXd w =
        SubspaceHamiltonian(bumped).matrix() - h0.matrix();
    const Eigen::MatrixXd w_eig = v.transpose() * w * v;

    Complex c = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        c += left[a] * w_eig(a, b) * g(a, b) * v(s - 1, b);
      }
    }
    coeffs.c[i] = Complex(0.0, -1.0) * c;
  }
  return coeffs;
}

Complex perturbative_amplitude(const DysonCoefficients& coeffs,
                               const Eigen::VectorXd& deltas) {
  if (deltas.size() != coeffs.c.size()) {
    throw std::invalid_argument("delta vector must have length N-1");
  }
  Complex f = coeffs.base_amplitude;
  for (int i = 0; i < coeffs.c.size(); ++i) f += coeffs.c[i] * deltas[i];
  return f;
}

AmplitudeDistribution::AmplitudeDistribution(const DysonCoefficients& coeffs,
                                             double delta,
                                             Component component)
    : component_(component) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");

  auto comp = [component](Complex z) {
    return component == Component::kRe ? z.real() : z.imag();
  };
  center_ = comp(coeffs.base_amplitude);

  double max_w = 0.0;
  for (int i = 0; i < coeffs.c.size(); ++i) {
    max_w = std::max(max_w, std::abs(comp(coeffs.c[i])));
  }
  for (int i = 0; i < coeffs.c.size(); ++i) {
    const double w = std::abs(comp(coeffs.c[i]));
    if (w > kWeightDropTol * max_w && w > 0.0) {
      widths_.push_back(w * delta);
    }
  }
  if (widths_.empty()) {
    throw std::invalid_argument(
        "all component coefficients vanish; the distribution degenerates to "
        "a point mass");
  }
  if (widths_.size() > kMaxDensityBonds) {
    throw std::invalid_argument(
        "exact density capped at 20 effective coefficients");
  }
  for (double w : widths_) width_ += w;

  // Exact constant of the signed power sum, cross-checked by quadrature.
  const int n = static_cast<int>(widths_.size());
  double prod = 1.0;
  for (double w : widths_) prod *= w;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  norm_ = sign / (std::pow(2.0, n + 1) * factorial(n - 1) * prod);

  cdf_floor_ = signed_power_sum(-width_ - 1.0, 1) / n;

  // Numerical normalization (the analytic constant should make this 1).
  const int steps = 8192;
  const double hstep = 2.0 * width_ / steps;
  double integral = density(center_ - width_) + density(center_ + width_);
  for (int i = 1; i < steps; ++i) {
    const double x = center_ - width_ + i * hstep;
    integral += density(x) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  integral *= hstep / 3.0;
  if (integral > 0.0) norm_ /= integral;
}

double AmplitudeDistribution::signed_power_sum(double u,
                                               int exponent_offset) const {
  const int n = static_cast<int>(widths_.size());
  const int exponent = n - 1 + exponent_offset;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double sgn = 1.0;
    double shift = u;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1) {
        shift -= widths_[i];
      } else {
        sgn = -sgn;
        shift += widths_[i];
      }
    }
    double term = 1.0;
    for (int e = 0; e < exponent; ++e) term *= std::abs(shift);
    if (exponent_offset == 0) {
      term *= (shift > 0.0) - (shift < 0.0);  // Sign
    }
    total += sgn * term;
  }
  return total;
}

double AmplitudeDistribution::density(double x) const {
  const double u = x - center_;
  if (u < -width_ || u > width_) return 0.0;
  return norm_ * signed_power_sum(u, 0);
}

double AmplitudeDistribution::cdf(double x) const {
  const double u = x - center_;
  if (u <= -width_) return 0.0;
  if (u >= width_) return 1.0;
  const int n = static_cast<int>(widths_.size());
  const double raw = norm_ * signed_power_sum(u, 1) / n;
  const double floor_val = norm_ * cdf_floor_;
  return std::clamp(raw - floor_val, 0.0, 1.0);
}

AmplitudeDistribution analytic_density(const DysonCoefficients& coeffs,
                                       double delta, Component component) {
  return AmplitudeDistribution(coeffs, delta, component);
}

DisorderMoments disorder_moments(const DysonCoefficients& coeffs, double delta,
                                 int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("need at least one sample");
  DisorderModel model;
  model.delta = delta;
  model.mean_coupling = 2.0 * coeffs.base.xx_couplings[0];
  model.n_samples = m;
  model.seed = seed;

  const int bonds = coeffs.base.n_sites - 1;
  std::vector<Complex> exact(m), pert(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    exact[i] = exact_disordered_amplitude(coeffs.base, model, i, coeffs.s,
                                          coeffs.r, coeffs.t)
                   .value;
    Eigen::VectorXd deltas(bonds);
    for (int k = 0; k < bonds; ++k) {
      deltas[k] = counter_uniform_symmetric(seed, i, k, delta);
    }
    pert[i] = perturbative_amplitude(coeffs, deltas);
  });

  Complex sum_exact = 0.0, sum_pert = 0.0;
  double sum_re2 = 0.0, sum_im2 = 0.0;
  for (int i = 0; i < m; ++i) {
    sum_exact += exact[i];
    sum_pert += pert[i];
    sum_re2 += exact[i].real() * exact[i].real();
    sum_im2 += exact[i].imag() * exact[i].imag();
  }

  DisorderMoments out;
  out.n_samples = m;
  out.mean_exact = sum_exact / static_cast<double>(m);
  out.mean_perturbative = sum_pert / static_cast<double>(m);
  out.var_re = sum_re2 / m - out.mean_exact.real() * out.mean_exact.real();
  out.var_im = sum_im2 / m - out.mean_exact.imag() * out.mean_exact.imag();
  for (int i = 0; i < coeffs.c.size(); ++i) {
    out.var_predicted_re += coeffs.c[i].real() * coeffs.c[i].real();
    out.var_predicted_im += coeffs.c[i].imag() * coeffs.c[i].imag();
  }
  out.var_predicted_re *= delta * delta / 3.0;
  out.var_predicted_im *= delta * delta / 3.0;
  out.std_err_re = std::sqrt(std::max(out.var_re, 0.0) / m);
  out.std_err_im = std::sqrt(std::max(out.var_im, 0.0) / m);
  return out;
}

Complex disorder_averaged_amplitude(const ChainSpec& base,
                                    const DisorderModel& model, int s, int r,
                                    double t) {
  const int m = model.n_samples;
  if (m < 1) throw std::invalid_argument("need at least one sample");
  std::vector<Complex> vals(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    vals[i] = exact_disordered_amplitude(base, model, i, s, r, t).value;
  });
  Complex sum = 0.0;
  for (const Complex& v : vals) sum += v;
  return sum / static_cast<double>(m);
}

}  // namespace spinqec
