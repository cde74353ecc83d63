#include "spinqec/channel.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace spinqec {

namespace {

constexpr double kCompletenessTol = 1e-10;
constexpr int kMaxDim = 64;

void check_completeness(int dim, const std::vector<Eigen::MatrixXcd>& kraus,
                        const Eigen::MatrixXcd& target) {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& k : kraus) {
    if (k.rows() != dim || k.cols() != dim) {
      throw std::invalid_argument("Kraus operator dimension mismatch");
    }
    sum += k.adjoint() * k;
  }
  const double err = (sum - target).cwiseAbs().maxCoeff();
  if (err > kCompletenessTol) {
    throw std::invalid_argument("Kraus completeness violated (max err " +
                                std::to_string(err) + ")");
  }
}

}  // namespace

DensityMatrix pure_state(const Eigen::VectorXcd& psi) {
  DensityMatrix rho;
  rho.dim = static_cast<int>(psi.size());
  rho.matrix = psi * psi.adjoint();
  return rho;
}

QuantumChannel::QuantumChannel(int dim, std::vector<Eigen::MatrixXcd> kraus)
    : dim_(dim),
      kraus_(std::move(kraus)),
      contract_(Completeness::kTracePreserving),
      support_(Eigen::MatrixXcd::Identity(dim, dim)) {
  if (kraus_.empty()) throw std::invalid_argument("empty Kraus set");
  check_completeness(dim_, kraus_, support_);
}

QuantumChannel::QuantumChannel(int dim, std::vector<Eigen::MatrixXcd> kraus,
                               Eigen::MatrixXcd support)
    : dim_(dim),
      kraus_(std::move(kraus)),
      contract_(Completeness::kProjectorRestricted),
      support_(std::move(support)) {
  if (kraus_.empty()) throw std::invalid_argument("empty Kraus set");
  check_completeness(dim_, kraus_, support_);
}

QuantumChannel channel_from_amplitude(const TransitionAmplitude& f) {
  Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = f.value;
  Eigen::MatrixXcd e1 = Eigen::MatrixXcd::Zero(2, 2);
  e1(0, 1) = std::sqrt(f.damping);
  return QuantumChannel(2, {std::move(e0), std::move(e1)});
}

QuantumChannel channel_from_amplitude(Complex f) {
  return channel_from_amplitude(make_transition_amplitude(f));
}

QuantumChannel amplitude_damping(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("damping parameter p must be in [0, 1]");
  }
  return channel_from_amplitude(Complex(std::sqrt(1.0 - p), 0.0));
}

Eigen::Matrix2cd phase_gate(double theta) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  u(1, 1) = std::polar(1.0, -theta);
  return u;
}

QuantumChannel tensor_power(const QuantumChannel& ch, int k) {
  if (k < 1) throw std::invalid_argument("tensor power needs k >= 1");
  double dims = std::pow(static_cast<double>(ch.dim()), k);
  if (dims > kMaxDim + 0.5) {
    throw std::invalid_argument("tensor power exceeds dimension cap 64");
  }

  std::vector<Eigen::MatrixXcd> ops = ch.kraus();
  int dim = ch.dim();
  for (int step = 1; step < k; ++step) {
    std::vector<Eigen::MatrixXcd> next;
    next.reserve(ops.size() * ch.kraus().size());
    for (const auto& a : ops) {
      for (const auto& b : ch.kraus()) {
        Eigen::MatrixXcd prod(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i) {
          for (int j = 0; j < a.cols(); ++j) {
            prod.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
          }
        }
        next.push_back(std::move(prod));
      }
    }
    ops = std::move(next);
    dim *= ch.dim();
  }

  if (ch.contract() == Completeness::kTracePreserving) {
    return QuantumChannel(dim, std::move(ops));
  }
  Eigen::MatrixXcd support = ch.support();
  for (int step = 1; step < k; ++step) {
    Eigen::MatrixXcd prod(support.rows() * ch.support().rows(),
                          support.cols() * ch.support().cols());
    for (int i = 0; i < support.rows(); ++i) {
      for (int j = 0; j < support.cols(); ++j) {
        prod.block(i * ch.support().rows(), j * ch.support().cols(),
                   ch.support().rows(), ch.support().cols()) =
            support(i, j) * ch.support();
      }
    }
    support = std::move(prod);
  }
  return QuantumChannel(dim, std::move(ops), std::move(support));
}

DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& rho) {
  if (rho.dim != ch.dim()) {
    throw std::invalid_argument("channel/state dimension mismatch");
  }
  DensityMatrix out;
  out.dim = rho.dim;
  out.matrix = Eigen::MatrixXcd::Zero(rho.dim, rho.dim);
  for (const auto& k : ch.kraus()) {
    out.matrix += k * rho.matrix * k.adjoint();
  }
  return out;
}

QuantumChannel compose(const QuantumChannel& second,
                       const QuantumChannel& first) {
  if (second.dim() != first.dim()) {
    throw std::invalid_argument("composed channels must share a dimension");
  }
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(second.kraus().size() * first.kraus().size());
  for (const auto& r : second.kraus()) {
    for (const auto& e : first.kraus()) {
      ops.push_back(r * e);
    }
  }

  if (second.contract() == Completeness::kTracePreserving &&
      first.contract() == Completeness::kTracePreserving) {
    return QuantumChannel(first.dim(), std::move(ops));
  }
  // sum (RE)^dag RE = sum E^dag Pi_second E; states supported inside the
  // second channel's support keep their trace.
  Eigen::MatrixXcd support = Eigen::MatrixXcd::Zero(first.dim(), first.dim());
  for (const auto& e : first.kraus()) {
    support += e.adjoint() * second.support() * e;
  }
  return QuantumChannel(first.dim(), std::move(ops), std::move(support));
}

Eigen::MatrixXcd choi_matrix(const QuantumChannel& ch) {
  const int d = ch.dim();
  Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& k : ch.kraus()) {
    Eigen::Map<const Eigen::VectorXcd> v(k.data(), d * d);
    choi.noalias() += v * v.adjoint();
  }
  return choi;
}

double choi_distance(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("channel dimension mismatch");
  }
  return (choi_matrix(a) - choi_matrix(b)).cwiseAbs().maxCoeff();
}

}  // namespace spinqec
