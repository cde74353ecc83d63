#pragma once

#include <span>
#include <vector>

#include "spinqec/channel.hpp"

namespace spinqec {

/// Logical basis and projector of an n-physical-qubit code.
struct CodeSpace {
  int n_physical = 0;
  Eigen::VectorXcd logical_zero;
  Eigen::VectorXcd logical_one;
  Eigen::MatrixXcd projector;
};

/// Recovery maps are channels whose completeness contract is the projector
/// onto the support they invert on.
using RecoveryMap = QuantumChannel;

/// 4-qubit approximate code: |0L> = (|0000>+|1111>)/sqrt2,
/// |1L> = (|1100>+|0011>)/sqrt2.
CodeSpace four_qubit_code();

/// Standard [[5,1,3]] stabilizer code (generators XZZXI and cyclic shifts);
/// |0L> is the projection of |00000>, |1L> = X^x5 |0L>.
CodeSpace five_qubit_code();

/// Pure state a|0L> + b|1L> as a density matrix. (a, b) must be normalized.
DensityMatrix encode(Complex a, Complex b, const CodeSpace& code);

/// Pseudo-inverse square root of a Hermitian PSD matrix. Eigenvalues at or
/// below rank_tol * lambda_max are excluded from the inversion.
Eigen::MatrixXcd psd_inverse_sqrt(const Eigen::MatrixXcd& m,
                                  double rank_tol = 1e-12);

/// Channel-adapted recovery with Kraus P E_i^dag [E(P)]^{-1/2}, the inverse
/// taken on the support of E(P).
RecoveryMap petz_recovery(const QuantumChannel& ch, const CodeSpace& code,
                          double rank_tol = 1e-12);

/// Syndrome-measurement recovery of the [[5,1,3]] code: one Kraus C_s Pi_s
/// per syndrome, C_s the single-qubit Pauli correction. Trace preserving.
RecoveryMap five_qubit_syndrome_recovery();

/// <psi_enc| (rec o noise)(|psi_enc><psi_enc|) |psi_enc> for the codespace
/// state with coefficients (a, b).
double composite_fidelity(const QuantumChannel& noise, const RecoveryMap& rec,
                          const CodeSpace& code, Complex a, Complex b);

struct FidelityReport {
  double f_sq_min = 0.0;
  double argmin_theta = 0.0;
  double argmin_phi = 0.0;
  int grid_theta = 0;     // coarse grid resolution used
  int grid_phi = 0;
  double refine_tol = 0;  // simplex tolerance of the local refinement
  int refine_iters = 0;
};

/// Worst-case fidelity over the codespace Bloch angles: 65x65 coarse grid on
/// [0,pi] x [0,2pi) followed by Nelder-Mead refinement to 1e-10 in angle.
FidelityReport worst_case_fidelity(const QuantumChannel& noise,
                                   const RecoveryMap& rec,
                                   const CodeSpace& code);

/// Same minimization for a sequence of channel stages applied in order
/// (repeated-QEC segments compose here without Kraus blowup).
FidelityReport worst_case_fidelity_pipeline(
    std::span<const QuantumChannel> stages, const CodeSpace& code);

/// Single-chain worst-case fidelity after phase compensation: |f|^2.
double worst_case_fidelity_noqec(const TransitionAmplitude& f);

enum class CodeId { kFour, kFive };

/// Small-p reference curves: 1 - (7/4)p^2 (four) and 1 - (15/8)p^2 (five).
double approx_fidelity_curves(double p, CodeId code);

}  // namespace spinqec
