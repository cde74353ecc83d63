#pragma once

#include <cstdint>
#include <vector>

#include "spinqec/spinchain.hpp"

namespace spinqec {

/// Static coupling disorder: J_k = Jz_k = (Jbar/2)(1 + Delta_k) with
/// Delta_k i.i.d. Uniform[-delta, delta].
struct DisorderModel {
  double delta = 0.0;
  double mean_coupling = 1.0;
  int n_samples = 1000;
  std::uint64_t seed = 0;
};

/// One disorder realization, keyed by (model.seed, index, bond); the same
/// key always yields the same spec.
ChainSpec sample_disordered_spec(const ChainSpec& base,
                                 const DisorderModel& model,
                                 std::uint64_t index);

/// Exact amplitude of realization `index` (full eigendecomposition route).
TransitionAmplitude exact_disordered_amplitude(const ChainSpec& base,
                                               const DisorderModel& model,
                                               std::uint64_t index, int s,
                                               int r, double t);

/// First-order coefficients c_i of f(t, {Delta}) = f0 + sum_i c_i Delta_i.
struct DysonCoefficients {
  Eigen::VectorXcd c;       // size N-1
  Complex base_amplitude{}; // f0 = zero-disorder amplitude
  ChainSpec base;
  int s = 0;
  int r = 0;
  double t = 0.0;
};

/// Computes c_i in the eigenbasis of the ideal subspace Hamiltonian. The
/// time integrals reduce to (e^{i dl t}-1)/(i dl), with the dl -> 0 limit t
/// taken below |dl| < 1e-12. The per-bond perturbation matrix is extracted
/// numerically as the subspace-Hamiltonian difference at unit Delta_i.
DysonCoefficients dyson_first_order_coeffs(const ChainSpec& base, int s, int r,
                                           double t);

/// f0 + sum_i c_i Delta_i (first order only).
Complex perturbative_amplitude(const DysonCoefficients& coeffs,
                               const Eigen::VectorXd& deltas);

enum class Component { kRe, kIm };

/// Exact density of comp(f0) + sum_i comp(c_i) Delta_i, the weighted sum of
/// independent Uniform[-delta, delta] variables: a piecewise polynomial
/// assembled from the 2^n signed power terms. Coefficients below
/// 1e-14 * max are dropped (they contribute a degenerate zero-width factor).
class AmplitudeDistribution {
 public:
  AmplitudeDistribution(const DysonCoefficients& coeffs, double delta,
                        Component component);

  double density(double x) const;
  double cdf(double x) const;
  double support_lo() const { return center_ - width_; }
  double support_hi() const { return center_ + width_; }
  double center() const { return center_; }
  Component component() const { return component_; }
  int effective_terms() const { return static_cast<int>(widths_.size()); }
  double normalization() const { return norm_; }

 private:
  double signed_power_sum(double x, int exponent_offset) const;

  Component component_;
  double center_ = 0.0;             // comp(f0)
  std::vector<double> widths_;      // |comp(c_i)| * delta, zeros dropped
  double width_ = 0.0;              // sum of widths
  double norm_ = 1.0;               // fixed numerically so integral = 1
  double cdf_floor_ = 0.0;
};

AmplitudeDistribution analytic_density(const DysonCoefficients& coeffs,
                                       double delta, Component component);

struct DisorderMoments {
  Complex mean_exact{};
  Complex mean_perturbative{};
  double var_re = 0.0;
  double var_im = 0.0;
  double var_predicted_re = 0.0;  // (delta^2/3) sum (Re c_i)^2
  double var_predicted_im = 0.0;
  double std_err_re = 0.0;
  double std_err_im = 0.0;
  int n_samples = 0;
};

/// Monte Carlo mean/variance of the exact disordered amplitude over M
/// realizations, with the first-order variance predictions alongside.
DisorderMoments disorder_moments(const DysonCoefficients& coeffs, double delta,
                                 int m, std::uint64_t seed);

/// Mean exact amplitude over model.n_samples realizations.
Complex disorder_averaged_amplitude(const ChainSpec& base,
                                    const DisorderModel& model, int s, int r,
                                    double t);

}  // namespace spinqec
