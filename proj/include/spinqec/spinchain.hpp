#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace spinqec {

using Complex = std::complex<double>;

/// Couplings, fields and length of one spin-chain Hamiltonian instance.
///
/// The chain Hamiltonian is
///   H = -sum_k J_k (XX + YY) - sum_k Jz_k ZZ + sum_k B_k Z,
/// with bonds k = 1..N-1 and sites 1..N (left to right).
struct ChainSpec {
  int n_sites = 0;
  Eigen::VectorXd xx_couplings;  // J_k, size N-1
  Eigen::VectorXd zz_couplings;  // Jz_k, size N-1
  Eigen::VectorXd fields;        // B_k, size N

  void validate() const;
};

/// Ideal XXX (Heisenberg) chain: J_k = Jz_k = J/2, B_k = 0.
ChainSpec ideal_xxx_spec(int n, double coupling);

/// Transition amplitude f = <r| e^{-i(H - E0)t} |s> of the single-excitation
/// propagator, with the ground-state energy gauged to zero.
struct TransitionAmplitude {
  Complex value{};
  double magnitude = 0.0;  // |f| in [0, 1]
  double phase = 0.0;      // Theta in (-pi, pi]
  double damping = 0.0;    // p = 1 - |f|^2
};

/// Wraps a complex amplitude; rejects |f| > 1 + 1e-12 and clamps the
/// remaining rounding excess so damping stays non-negative.
TransitionAmplitude make_transition_amplitude(Complex f);

/// Chain Hamiltonian restricted to the single-excitation sector, shifted so
/// the all-zero state has exactly zero energy. The eigendecomposition is
/// computed once at construction and reused by every amplitude query.
class SubspaceHamiltonian {
 public:
  explicit SubspaceHamiltonian(const ChainSpec& spec);

  int size() const { return n_; }
  double ground_shift() const { return ground_shift_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

 private:
  int n_;
  double ground_shift_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// Full 2^N x 2^N Hamiltonian of the chain (oracle route; N <= 12).
Eigen::MatrixXcd build_full_hamiltonian(const ChainSpec& spec);

SubspaceHamiltonian build_subspace_hamiltonian(const ChainSpec& spec);

/// f^N_{r,s}(t) for 1-based sites s (sender) and r (receiver).
TransitionAmplitude transition_amplitude(const SubspaceHamiltonian& h, int s,
                                         int r, double t);

/// All amplitudes f_{r,s}(t), r = 1..N, for a fixed sender s.
Eigen::VectorXcd transition_row(const SubspaceHamiltonian& h, int s, double t);

}  // namespace spinqec
