#pragma once

#include <vector>

#include "spinqec/spinchain.hpp"

namespace spinqec {

/// What the Kraus set sums to: the identity (trace preserving) or a stated
/// projector (recovery maps whose inverse is taken on a support).
enum class Completeness { kTracePreserving, kProjectorRestricted };

struct DensityMatrix {
  int dim = 0;
  Eigen::MatrixXcd matrix;
};

DensityMatrix pure_state(const Eigen::VectorXcd& psi);

class QuantumChannel {
 public:
  /// Trace-preserving channel; verifies sum K^dag K = I within 1e-10.
  QuantumChannel(int dim, std::vector<Eigen::MatrixXcd> kraus);

  /// Support-restricted channel; verifies sum K^dag K = support projector.
  QuantumChannel(int dim, std::vector<Eigen::MatrixXcd> kraus,
                 Eigen::MatrixXcd support);

  int dim() const { return dim_; }
  const std::vector<Eigen::MatrixXcd>& kraus() const { return kraus_; }
  Completeness contract() const { return contract_; }
  /// The projector the Kraus set sums to (identity for TP channels).
  const Eigen::MatrixXcd& support() const { return support_; }

 private:
  int dim_;
  std::vector<Eigen::MatrixXcd> kraus_;
  Completeness contract_;
  Eigen::MatrixXcd support_;
};

/// Transfer-induced channel of Eq.-(8) form: E0 = diag(1, f),
/// E1 = sqrt(1-|f|^2) |0><1|.
QuantumChannel channel_from_amplitude(const TransitionAmplitude& f);
QuantumChannel channel_from_amplitude(Complex f);

/// Standard amplitude damping channel with real noise parameter p.
QuantumChannel amplitude_damping(double p);

/// diag(1, e^{-i theta}).
Eigen::Matrix2cd phase_gate(double theta);

/// k-fold tensor power; Kraus operators ordered lexicographically in the
/// factor indices. Capped at total dimension 64.
QuantumChannel tensor_power(const QuantumChannel& ch, int k);

DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& rho);

/// Kraus set {R_j E_i} of second after first, in (j, i) lexicographic order.
QuantumChannel compose(const QuantumChannel& second,
                       const QuantumChannel& first);

/// Choi matrix as sum_k vec(K_k) vec(K_k)^dag with column-major vec.
/// Fixed convention; used for channel equality and CP checks.
Eigen::MatrixXcd choi_matrix(const QuantumChannel& ch);

/// Max-norm distance between Choi matrices (the official channel equality).
double choi_distance(const QuantumChannel& a, const QuantumChannel& b);

}  // namespace spinqec
