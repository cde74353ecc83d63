#include "spinqec/qec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace spinqec {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd pauli_string(const char* s, int n) {
  Eigen::Matrix2cd x, y, z, id;
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  id.setIdentity();

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd* factor = &id;
    switch (s[q]) {
      case 'X': factor = &x; break;
      case 'Y': factor = &y; break;
      case 'Z': factor = &z; break;
      case 'I': break;
      default: throw std::invalid_argument("bad Pauli label");
    }
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        next.block(i * 2, j * 2, 2, 2) = m(i, j) * (*factor);
      }
    }
    m = std::move(next);
  }
  return m;
}

const std::array<const char*, 4> kFiveQubitGenerators = {"XZZXI", "IXZZX",
                                                         "XIXZZ", "ZXIXZ"};

struct PsdInverseSqrt {
  Eigen::MatrixXcd inverse_sqrt;
  Eigen::MatrixXcd support;  // projector onto the retained eigenspace
};

PsdInverseSqrt psd_inverse_sqrt_with_support(const Eigen::MatrixXcd& m,
                                             double rank_tol) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("psd_inverse_sqrt needs a Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("psd_inverse_sqrt eigendecomposition failed");
  }
  const auto& lam = solver.eigenvalues();
  const auto& u = solver.eigenvectors();
  const double lam_max = std::max(lam.maxCoeff(), 0.0);
  const double cutoff = rank_tol * lam_max;

  Eigen::VectorXd inv(lam.size()), keep(lam.size());
  for (int i = 0; i < lam.size(); ++i) {
    const bool kept = lam[i] > cutoff;
    inv[i] = kept ? 1.0 / std::sqrt(lam[i]) : 0.0;
    keep[i] = kept ? 1.0 : 0.0;
  }
  PsdInverseSqrt out;
  out.inverse_sqrt = u * inv.asDiagonal() * u.adjoint();
  out.support = u * keep.asDiagonal() * u.adjoint();
  return out;
}

// T[a][b][g][m] = <aL| stages(|bL><gL|) |mL>; the fidelity at any codespace
// state is a quartic form in its coefficients, so the grid search touches
// the channels only through these 16 numbers.
struct FidelityTensor {
  std::array<Complex, 16> t{};

  static FidelityTensor build(std::span<const QuantumChannel> stages,
                              const CodeSpace& code) {
    FidelityTensor ft;
    const std::array<const Eigen::VectorXcd*, 2> basis = {&code.logical_zero,
                                                          &code.logical_one};
    for (int b = 0; b < 2; ++b) {
      for (int g = 0; g < 2; ++g) {
        Eigen::MatrixXcd rho = (*basis[b]) * basis[g]->adjoint();
        for (const auto& stage : stages) {
          Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(rho.rows(),
                                                         rho.cols());
          for (const auto& k : stage.kraus()) {
            next.noalias() += k * rho * k.adjoint();
          }
          rho = std::move(next);
        }
        for (int a = 0; a < 2; ++a) {
          for (int mm = 0; mm < 2; ++mm) {
            ft.t[a * 8 + b * 4 + g * 2 + mm] =
                basis[a]->adjoint() * rho * (*basis[mm]);
          }
        }
      }
    }
    return ft;
  }

  double fidelity(double theta, double phi) const {
    const std::array<Complex, 2> c = {
        Complex(std::cos(theta / 2.0), 0.0),
        std::polar(std::sin(theta / 2.0), -phi)};
    Complex f = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int g = 0; g < 2; ++g) {
          for (int mm = 0; mm < 2; ++mm) {
            f += std::conj(c[a]) * c[b] * std::conj(c[g]) * c[mm] *
                 t[a * 8 + b * 4 + g * 2 + mm];
          }
        }
      }
    }
    return f.real();
  }
};

struct NelderMeadResult {
  double value = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  int iterations = 0;
};

NelderMeadResult nelder_mead_min(const FidelityTensor& ft, double theta0,
                                 double phi0, double step, double tol,
                                 int max_iter) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> xs = {Point{theta0, phi0},
                             Point{theta0 + step, phi0},
                             Point{theta0, phi0 + step}};
  std::array<double, 3> fs;
  for (int i = 0; i < 3; ++i) fs[i] = ft.fidelity(xs[i][0], xs[i][1]);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::array<int, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    const int lo = ord[0], mid = ord[1], hi = ord[2];

    const double spread = std::max(
        std::max(std::abs(xs[hi][0] - xs[lo][0]),
                 std::abs(xs[mid][0] - xs[lo][0])),
        std::max(std::abs(xs[hi][1] - xs[lo][1]),
                 std::abs(xs[mid][1] - xs[lo][1])));
    if (spread < tol) break;

    const Point centroid = {(xs[lo][0] + xs[mid][0]) / 2.0,
                            (xs[lo][1] + xs[mid][1]) / 2.0};
    auto at = [&](double coeff) {
      return Point{centroid[0] + coeff * (centroid[0] - xs[hi][0]),
                   centroid[1] + coeff * (centroid[1] - xs[hi][1])};
    };

    const Point refl = at(1.0);
    const double f_refl = ft.fidelity(refl[0], refl[1]);
    if (f_refl < fs[lo]) {
      const Point exp_pt = at(2.0);
      const double f_exp = ft.fidelity(exp_pt[0], exp_pt[1]);
      if (f_exp < f_refl) {
        xs[hi] = exp_pt;
        fs[hi] = f_exp;
      } else {
        xs[hi] = refl;
        fs[hi] = f_refl;
      }
    } else if (f_refl < fs[mid]) {
      xs[hi] = refl;
      fs[hi] = f_refl;
    } else {
      const Point contr = at(-0.5);
      const double f_contr = ft.fidelity(contr[0], contr[1]);
      if (f_contr < fs[hi]) {
        xs[hi] = contr;
        fs[hi] = f_contr;
      } else {
        for (int i : {mid, hi}) {
          xs[i] = {(xs[i][0] + xs[lo][0]) / 2.0, (xs[i][1] + xs[lo][1]) / 2.0};
          fs[i] = ft.fidelity(xs[i][0], xs[i][1]);
        }
      }
    }
  }

  const int best =
      static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  return {fs[best], xs[best][0], xs[best][1], iter};
}

FidelityReport minimize_over_codespace(const FidelityTensor& ft) {
  constexpr int kGrid = 65;
  const double dtheta = kPi / (kGrid - 1);
  const double dphi = 2.0 * kPi / kGrid;

  FidelityReport report;
  report.grid_theta = kGrid;
  report.grid_phi = kGrid;
  report.refine_tol = 1e-10;

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0, best_phi = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double theta = i * dtheta;
    for (int j = 0; j < kGrid; ++j) {
      const double phi = j * dphi;
      const double f = ft.fidelity(theta, phi);
      if (f < best) {
        best = f;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }

  const auto refined = nelder_mead_min(ft, best_theta, best_phi,
                                       0.5 * dtheta, 1e-10, 600);
  if (refined.value <= best) {
    report.f_sq_min = refined.value;
    report.argmin_theta = refined.theta;
    report.argmin_phi = refined.phi;
  } else {
    report.f_sq_min = best;
    report.argmin_theta = best_theta;
    report.argmin_phi = best_phi;
  }
  report.refine_iters = refined.iterations;
  return report;
}

}  // namespace

CodeSpace four_qubit_code() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CodeSpace code;
  code.n_physical = 4;
  code.logical_zero = Eigen::VectorXcd::Zero(16);
  code.logical_zero[0b0000] = inv_sqrt2;
  code.logical_zero[0b1111] = inv_sqrt2;
  code.logical_one = Eigen::VectorXcd::Zero(16);
  code.logical_one[0b1100] = inv_sqrt2;
  code.logical_one[0b0011] = inv_sqrt2;
  code.projector = code.logical_zero * code.logical_zero.adjoint() +
                   code.logical_one * code.logical_one.adjoint();
  return code;
}

CodeSpace five_qubit_code() {
  const int dim = 32;
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(dim, dim);
  for (const char* g : kFiveQubitGenerators) {
    proj = proj * (Eigen::MatrixXcd::Identity(dim, dim) +
                   pauli_string(g, 5)) / 2.0;
  }

  CodeSpace code;
  code.n_physical = 5;
  // |00000> is fixed by logical Z, so its projection is |0L>.
  code.logical_zero = proj.col(0);
  code.logical_zero.normalize();
  code.logical_one = pauli_string("XXXXX", 5) * code.logical_zero;
  code.projector = code.logical_zero * code.logical_zero.adjoint() +
                   code.logical_one * code.logical_one.adjoint();
  return code;
}

DensityMatrix encode(Complex a, Complex b, const CodeSpace& code) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-10) {
    throw std::invalid_argument("encode needs |a|^2 + |b|^2 = 1");
  }
  return pure_state(a * code.logical_zero + b * code.logical_one);
}

Eigen::MatrixXcd psd_inverse_sqrt(const Eigen::MatrixXcd& m, double rank_tol) {
  return psd_inverse_sqrt_with_support(m, rank_tol).inverse_sqrt;
}

RecoveryMap petz_recovery(const QuantumChannel& ch, const CodeSpace& code,
                          double rank_tol) {
  if (ch.dim() != (1 << code.n_physical)) {
    throw std::invalid_argument("channel dimension does not match code");
  }
  Eigen::MatrixXcd ep = Eigen::MatrixXcd::Zero(ch.dim(), ch.dim());
  for (const auto& k : ch.kraus()) {
    ep.noalias() += k * code.projector * k.adjoint();
  }
  ep = (ep + ep.adjoint()) / 2.0;  // strip rounding skew before eigensolve

  const auto inv = psd_inverse_sqrt_with_support(ep, rank_tol);
  std::vector<Eigen::MatrixXcd> rec;
  rec.reserve(ch.kraus().size());
  for (const auto& k : ch.kraus()) {
    rec.push_back(code.projector * k.adjoint() * inv.inverse_sqrt);
  }
  return RecoveryMap(ch.dim(), std::move(rec), inv.support);
}

RecoveryMap five_qubit_syndrome_recovery() {
  const int dim = 32;
  std::array<Eigen::MatrixXcd, 4> gens;
  for (int i = 0; i < 4; ++i) gens[i] = pauli_string(kFiveQubitGenerators[i], 5);

  auto syndrome_projector = [&](int syndrome) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < 4; ++i) {
      const double sign = ((syndrome >> i) & 1) ? -1.0 : 1.0;
      p = p * (Eigen::MatrixXcd::Identity(dim, dim) + sign * gens[i]) / 2.0;
    }
    return p;
  };

  // Map each single-qubit Pauli to the syndrome it triggers; the [[5,1,3]]
  // code hits all 15 nontrivial syndromes exactly once.
  std::array<Eigen::MatrixXcd, 16> correction;
  correction[0] = Eigen::MatrixXcd::Identity(dim, dim);
  for (int q = 0; q < 5; ++q) {
    for (char label : {'X', 'Y', 'Z'}) {
      char s[6] = "IIIII";
      s[q] = label;
      Eigen::MatrixXcd p = pauli_string(s, 5);
      int syndrome = 0;
      for (int i = 0; i < 4; ++i) {
        const bool anticommutes =
            (gens[i] * p + p * gens[i]).cwiseAbs().maxCoeff() < 1e-12;
        if (anticommutes) syndrome |= 1 << i;
      }
      correction[syndrome] = std::move(p);
    }
  }

  std::vector<Eigen::MatrixXcd> kraus;
  kraus.reserve(16);
  for (int s = 0; s < 16; ++s) {
    kraus.push_back(correction[s] * syndrome_projector(s));
  }
  return RecoveryMap(dim, std::move(kraus));
}

double composite_fidelity(const QuantumChannel& noise, const RecoveryMap& rec,
                          const CodeSpace& code, Complex a, Complex b) {
  const DensityMatrix enc = encode(a, b, code);
  const DensityMatrix out = apply(rec, apply(noise, enc));
  const Eigen::VectorXcd psi = a * code.logical_zero + b * code.logical_one;
  return (psi.adjoint() * out.matrix * psi)(0, 0).real();
}

FidelityReport worst_case_fidelity(const QuantumChannel& noise,
                                   const RecoveryMap& rec,
                                   const CodeSpace& code) {
  const std::array<QuantumChannel, 2> stages = {noise, rec};
  return worst_case_fidelity_pipeline(stages, code);
}

FidelityReport worst_case_fidelity_pipeline(
    std::span<const QuantumChannel> stages, const CodeSpace& code) {
  return minimize_over_codespace(FidelityTensor::build(stages, code));
}

double worst_case_fidelity_noqec(const TransitionAmplitude& f) {
  return f.magnitude * f.magnitude;
}

double approx_fidelity_curves(double p, CodeId code) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("noise parameter p must be in [0, 1]");
  }
  const double alpha = (code == CodeId::kFour) ? 7.0 / 4.0 : 15.0 / 8.0;
  return 1.0 - alpha * p * p;
}

}  // namespace spinqec
