#include "spinqec/spinchain.hpp"

#include <cmath>
#include <string>

namespace spinqec {

namespace {

constexpr int kMaxFullSpaceSites = 12;

void check_site(int site, int n, const char* name) {
  if (site < 1 || site > n) {
    throw std::out_of_range(std::string(name) + " site " +
                            std::to_string(site) + " outside 1.." +
                            std::to_string(n));
  }
}

}  // namespace

void ChainSpec::validate() const {
  if (n_sites < 1) throw std::invalid_argument("chain needs at least 1 site");
  if (xx_couplings.size() != n_sites - 1 ||
      zz_couplings.size() != n_sites - 1) {
    throw std::invalid_argument("coupling arrays must have length N-1");
  }
  if (fields.size() != n_sites) {
    throw std::invalid_argument("field array must have length N");
  }
}

ChainSpec ideal_xxx_spec(int n, double coupling) {
  if (n < 2) throw std::invalid_argument("ideal chain needs n >= 2");
  if (coupling <= 0.0) throw std::invalid_argument("coupling J must be > 0");
  ChainSpec spec;
  spec.n_sites = n;
  spec.xx_couplings = Eigen::VectorXd::Constant(n - 1, coupling / 2.0);
  spec.zz_couplings = Eigen::VectorXd::Constant(n - 1, coupling / 2.0);
  spec.fields = Eigen::VectorXd::Zero(n);
  return spec;
}

TransitionAmplitude make_transition_amplitude(Complex f) {
  double mag = std::abs(f);
  if (mag > 1.0 + 1e-12) {
    throw std::invalid_argument("amplitude magnitude exceeds 1");
  }
  TransitionAmplitude a;
  a.value = f;
  a.magnitude = std::min(mag, 1.0);
  a.phase = (mag == 0.0) ? 0.0 : std::arg(f);
  a.damping = std::max(0.0, 1.0 - a.magnitude * a.magnitude);
  return a;
}

SubspaceHamiltonian::SubspaceHamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  n_ = n;

  // E0 = <0...0|H|0...0>: every bond contributes -Jz_k, every site +B_k.
  ground_shift_ = -spec.zz_couplings.sum() + spec.fields.sum();

  // <j|H|j> - E0: flipping site j changes sign of the adjacent ZZ bonds and
  // of B_j. <j|H|j+1>: the XX+YY hop, -2 J_j.
  matrix_ = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = -2.0 * spec.fields[j];
    if (j > 0) d += 2.0 * spec.zz_couplings[j - 1];
    if (j < n - 1) d += 2.0 * spec.zz_couplings[j];
    matrix_(j, j) = d;
  }
  for (int k = 0; k + 1 < n; ++k) {
    matrix_(k, k + 1) = matrix_(k + 1, k) = -2.0 * spec.xx_couplings[k];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("subspace eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

SubspaceHamiltonian build_subspace_hamiltonian(const ChainSpec& spec) {
  return SubspaceHamiltonian(spec);
}

Eigen::MatrixXcd build_full_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  if (n > kMaxFullSpaceSites) {
    throw std::invalid_argument("full-space Hamiltonian capped at N <= 12");
  }
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

  // Site j occupies bit n-1-j, so site 1 is the most significant bit and
  // basis index b1 b2 ... bN matches the tensor order used elsewhere.
  auto bit_of = [n](std::size_t state, int site) {
    return (state >> (n - 1 - site)) & 1u;
  };

  for (std::size_t b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double zz = (bit_of(b, k) == bit_of(b, k + 1)) ? 1.0 : -1.0;
      diag -= spec.zz_couplings[k] * zz;
    }
    for (int j = 0; j < n; ++j) {
      diag += spec.fields[j] * (bit_of(b, j) ? -1.0 : 1.0);
    }
    h(b, b) = diag;

    // -J_k (XX + YY) hops 01 <-> 10 on bond k with matrix element -2 J_k.
    for (int k = 0; k + 1 < n; ++k) {
      if (bit_of(b, k) != bit_of(b, k + 1)) {
        const std::size_t mask = (std::size_t{1} << (n - 1 - k)) |
                                 (std::size_t{1} << (n - 2 - k));
        const std::size_t b2 = b ^ mask;
        if (b2 > b) {
          h(b, b2) = h(b2, b) = -2.0 * spec.xx_couplings[k];
        }
      }
    }
  }
  return h;
}

TransitionAmplitude transition_amplitude(const SubspaceHamiltonian& h, int s,
                                         int r, double t) {
  check_site(s, h.size(), "sender");
  check_site(r, h.size(), "receiver");
  if (t < 0.0) throw std::invalid_argument("time must be non-negative");

  const auto& lam = h.eigenvalues();
  const auto& v = h.eigenvectors();
  Complex f = 0.0;
  for (int m = 0; m < h.size(); ++m) {
    f += v(r - 1, m) * v(s - 1, m) * std::polar(1.0, -lam[m] * t);
  }
  return make_transition_amplitude(f);
}

Eigen::VectorXcd transition_row(const SubspaceHamiltonian& h, int s,
                                double t) {
  check_site(s, h.size(), "sender");
  if (t < 0.0) throw std::invalid_argument("time must be non-negative");

  const auto& lam = h.eigenvalues();
  const auto& v = h.eigenvectors();
  Eigen::VectorXcd weights(h.size());
  for (int m = 0; m < h.size(); ++m) {
    weights[m] = v(s - 1, m) * std::polar(1.0, -lam[m] * t);
  }
  return v.cast<Complex>() * weights;
}

}  // namespace spinqec
