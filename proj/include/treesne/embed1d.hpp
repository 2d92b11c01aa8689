#pragma once

// One-dimensional t-SNE under the scaled heavy-tailed kernel
//
//   k(d) = (1 + d^2 / alpha)^(-alpha),
//
// which has 2*alpha - 1 degrees of freedom and reduces to the Cauchy kernel
// at alpha = 1. Everything here is templated on the scalar type; the tree
// pipeline instantiates it with double.
//
// Notation used below, for a pair (i, j):
//   u_ij = 1 + (y_i - y_j)^2 / alpha,   w_ij = u_ij^(-alpha),   Z = sum_{i != j} w_ij.
// Then d w_ij / d(d^2) = -w_ij / u_ij, and the KL gradient is
//   dC/dy_i = 4 sum_j (ex * p_ij - w_ij / Z) (y_i - y_j) / u_ij.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "treesne/affinity.hpp"
#include "treesne/error.hpp"

namespace treesne {

template <typename Scalar>
using Embedding1D = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Kernel tail parameter alpha in (0, 1].
///
/// Values below 0.5 give negative degrees of freedom; the kernel is then not
/// a normalizable density but the optimization is still well defined.
template <typename Scalar>
class KernelParam {
 public:
  explicit KernelParam(Scalar alpha) : alpha_(alpha) {
    if (!(alpha > Scalar(0)) || alpha > Scalar(1)) {
      throw ParameterError("kernel alpha must be in (0, 1], got " + std::to_string(static_cast<double>(alpha)));
    }
  }

  Scalar alpha() const { return alpha_; }
  Scalar degrees_of_freedom() const { return Scalar(2) * alpha_ - Scalar(1); }

 private:
  Scalar alpha_;
};

namespace detail {

template <typename Scalar>
Scalar kernel_from_u(Scalar u, Scalar alpha) {
  if (alpha == Scalar(1)) return Scalar(1) / u;
  return std::exp(-alpha * std::log(u));
}

}  // namespace detail

template <typename Scalar>
Scalar kernel(Scalar distance, KernelParam<Scalar> param) {
  const Scalar a = param.alpha();
  return detail::kernel_from_u<Scalar>(Scalar(1) + distance * distance / a, a);
}

/// Exact KL(P || Q) with Q built from all ordered pairs of the embedding.
template <typename Scalar>
Scalar kl_objective(const BasicAffinityMatrix<Scalar>& P, const Embedding1D<Scalar>& y, KernelParam<Scalar> param) {
  const Eigen::Index n = y.size();
  if (n < 2) throw ParameterError("kl_objective needs at least 2 points");
  if (P.size() != n) throw ParameterError("affinity size does not match embedding size");
  const Scalar a = param.alpha();

  Scalar z = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = y(i) - y(j);
      z += Scalar(2) * detail::kernel_from_u<Scalar>(Scalar(1) + d * d / a, a);
    }
  }
  Scalar kl = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (typename BasicAffinityMatrix<Scalar>::Sparse::InnerIterator it(P.p, i); it; ++it) {
      const Scalar p = it.value();
      if (p <= Scalar(0) || it.col() == i) continue;
      const Scalar d = y(i) - y(it.col());
      const Scalar q = detail::kernel_from_u<Scalar>(Scalar(1) + d * d / a, a) / z;
      kl += p * std::log(p / q);
    }
  }
  return std::max(kl, Scalar(0));
}

/// Repulsive sums over all other points.
///
/// `forces(i)` is sum_{j != i} w_ij (y_i - y_j) / u_ij and `z` is
/// sum_{i != j} w_ij.
template <typename Scalar>
struct Repulsion {
  Embedding1D<Scalar> forces;
  Scalar z = 0;
};

template <typename Scalar>
Repulsion<Scalar> repulsion_exact(const Embedding1D<Scalar>& y, KernelParam<Scalar> param) {
  const Eigen::Index n = y.size();
  const Scalar a = param.alpha();
  Repulsion<Scalar> out;
  out.forces = Embedding1D<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = y(i) - y(j);
      const Scalar u = Scalar(1) + d * d / a;
      const Scalar w = detail::kernel_from_u<Scalar>(u, a);
      const Scalar f = w / u * d;
      out.forces(i) += f;
      out.forces(j) -= f;
      out.z += Scalar(2) * w;
    }
  }
  return out;
}

namespace detail {

// Lagrange weights on nodes {0, ..., P-1} evaluated at local coordinate t.
template <typename Scalar, std::size_t P>
std::array<Scalar, P> lagrange_weights(Scalar t) {
  std::array<Scalar, P> w;
  for (std::size_t q = 0; q < P; ++q) {
    Scalar num = 1;
    Scalar den = 1;
    for (std::size_t r = 0; r < P; ++r) {
      if (r == q) continue;
      num *= t - static_cast<Scalar>(r);
      den *= static_cast<Scalar>(q) - static_cast<Scalar>(r);
    }
    w[q] = num / den;
  }
  return w;
}

// Toeplitz product out = K c with K(m, n) = kernel[m - n], computed as a
// circular convolution of length 2M. The kernel is given for offsets >= 0
// and extended as even or odd.
template <typename Scalar>
class ToeplitzConvolver {
 public:
  explicit ToeplitzConvolver(const std::vector<Scalar>& kernel, bool odd = false) : m_(kernel.size()) {
    std::vector<Scalar> circ(2 * m_, Scalar(0));
    for (std::size_t k = 0; k < m_; ++k) circ[k] = kernel[k];
    for (std::size_t k = 1; k < m_; ++k) circ[2 * m_ - k] = odd ? -kernel[k] : kernel[k];
    fft_.fwd(kernel_hat_, circ);
  }

  std::vector<Scalar> apply(const std::vector<Scalar>& charges) {
    std::vector<Scalar> padded(2 * m_, Scalar(0));
    std::copy(charges.begin(), charges.end(), padded.begin());
    std::vector<std::complex<Scalar>> hat;
    fft_.fwd(hat, padded);
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= kernel_hat_[k];
    std::vector<Scalar> full;
    fft_.inv(full, hat);
    full.resize(m_);
    return full;
  }

 private:
  std::size_t m_;
  Eigen::FFT<Scalar> fft_;
  std::vector<std::complex<Scalar>> kernel_hat_;
};

}  // namespace detail

/// Grid-accelerated repulsion.
///
/// Sources are spread onto an equispaced grid with Lagrange weights on the
/// `kInterpolationNodes` nearest nodes,
/// the kernel sums between grid nodes are a Toeplitz product evaluated by
/// FFT, and the grid potentials are interpolated back to the points. The
/// force kernel d w / u is convolved directly, being odd. Falls
/// back to the exact sums when all coordinates coincide.
inline constexpr std::size_t kInterpolationNodes = 8;

template <typename Scalar>
Repulsion<Scalar> repulsion_interpolated(const Embedding1D<Scalar>& y, KernelParam<Scalar> param,
                                         Eigen::Index grid_size) {
  if (grid_size < 32) throw ParameterError("interpolation grid_size must be >= 32");
  const Eigen::Index n = y.size();
  const Scalar lo = y.minCoeff();
  const Scalar hi = y.maxCoeff();
  if (!(hi > lo)) return repulsion_exact(y, param);

  const Scalar span = hi - lo;
  const auto m = static_cast<std::size_t>(grid_size);
  const Scalar h = span / static_cast<Scalar>(m - 1);
  const Scalar a = param.alpha();

  std::vector<Scalar> k1(m);
  std::vector<Scalar> k2(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Scalar d = static_cast<Scalar>(k) * h;
    const Scalar u = Scalar(1) + d * d / a;
    k1[k] = detail::kernel_from_u<Scalar>(u, a);
    k2[k] = k1[k] * d / u;
  }

  std::vector<std::size_t> base(static_cast<std::size_t>(n));
  constexpr std::size_t P = kInterpolationNodes;
  std::vector<std::array<Scalar, P>> weights(static_cast<std::size_t>(n));
  std::vector<Scalar> charge(m, Scalar(0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar t = (y(i) - lo) / h;
    const auto cell = static_cast<std::ptrdiff_t>(std::floor(t)) - static_cast<std::ptrdiff_t>(P / 2 - 1);
    const auto b = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(cell, 0, static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(P)));
    base[i] = b;
    weights[i] = detail::lagrange_weights<Scalar, P>(t - static_cast<Scalar>(b));
    for (std::size_t q = 0; q < P; ++q) charge[b + q] += weights[i][q];
  }

  detail::ToeplitzConvolver<Scalar> conv1(k1);
  detail::ToeplitzConvolver<Scalar> conv2(k2, true);
  const auto pot_w = conv1.apply(charge);
  const auto pot_f = conv2.apply(charge);

  Repulsion<Scalar> out;
  out.forces.resize(n);
  Scalar z = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar phi_w = 0;
    Scalar phi_f = 0;
    for (std::size_t q = 0; q < P; ++q) {
      phi_w += weights[i][q] * pot_w[base[i] + q];
      phi_f += weights[i][q] * pot_f[base[i] + q];
    }
    // Self interaction contributes w_ii = 1 to phi_w and nothing to the force.
    z += phi_w - Scalar(1);
    out.forces(i) = phi_f;
  }
  out.z = z;
  return out;
}

/// Attractive sums: `out(i) = sum_j p_ij (y_i - y_j) / u_ij`.
template <typename Scalar>
Embedding1D<Scalar> attraction(const BasicAffinityMatrix<Scalar>& P, const Embedding1D<Scalar>& y,
                               KernelParam<Scalar> param) {
  const Eigen::Index n = y.size();
  const Scalar a = param.alpha();
  Embedding1D<Scalar> out = Embedding1D<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = 0;
    for (typename BasicAffinityMatrix<Scalar>::Sparse::InnerIterator it(P.p, i); it; ++it) {
      const Scalar d = y(i) - y(it.col());
      acc += it.value() * d / (Scalar(1) + d * d / a);
    }
    out(i) = acc;
  }
  return out;
}

template <typename Scalar>
Embedding1D<Scalar> combine_gradient(const Embedding1D<Scalar>& attractive, const Repulsion<Scalar>& repulsive,
                                     Scalar exaggeration) {
  return Scalar(4) * (exaggeration * attractive - repulsive.forces / repulsive.z);
}

/// Exact gradient of the KL objective; the attractive term is scaled by
/// `exaggeration`.
template <typename Scalar>
Embedding1D<Scalar> gradient(const BasicAffinityMatrix<Scalar>& P, const Embedding1D<Scalar>& y,
                             KernelParam<Scalar> param, Scalar exaggeration = Scalar(1)) {
  if (y.size() < 2) throw ParameterError("gradient needs at least 2 points");
  if (P.size() != y.size()) throw ParameterError("affinity size does not match embedding size");
  return combine_gradient<Scalar>(attraction(P, y, param), repulsion_exact(y, param), exaggeration);
}

enum class RepulsionMethod { kExact, kInterpolated };

struct OptimizerConfig {
  int iterations = 1000;
  double learning_rate = 200.0;
  double momentum_start = 0.5;
  double momentum_late = 0.8;
  double exaggeration = 12.0;
  double early_exaggeration = 12.0;
  int early_iterations = 250;
  std::uint64_t seed = 0;
  // Per-point step gains: +0.2 while the gradient opposes the current
  // velocity, x0.8 otherwise, floored at min_gain.
  bool adaptive_gains = true;
  double min_gain = 0.01;

  RepulsionMethod repulsion = RepulsionMethod::kExact;
  // Minimum interpolation grid; the grid is refined further so that its
  // spacing stays below `grid_spacing_factor * sqrt(alpha)`.
  Eigen::Index grid_size = 64;
  double grid_spacing_factor = 0.1;
  Eigen::Index max_grid_size = Eigen::Index(1) << 16;

  double divergence_bound = 1e8;

  void validate() const {
    if (iterations < 0) throw ParameterError("iterations must be >= 0");
    if (!(learning_rate >= 0)) throw ParameterError("learning_rate must be >= 0");
    if (momentum_start < 0 || momentum_start >= 1 || momentum_late < 0 || momentum_late >= 1) {
      throw ParameterError("momentum must be in [0, 1)");
    }
    if (exaggeration < 1 || early_exaggeration < 1) throw ParameterError("exaggeration must be >= 1");
    if (early_iterations < 0 || early_iterations > iterations) {
      throw ParameterError("early_iterations must be in [0, iterations]");
    }
    if (grid_size < 32) throw ParameterError("grid_size must be >= 32");
    if (!(min_gain > 0)) throw ParameterError("min_gain must be > 0");
  }
};

/// Grid size used by the interpolated path for a given coordinate span.
/// Rounded up to a power of two so the FFT length has no large prime factor.
inline Eigen::Index adaptive_grid_size(double span, double alpha, const OptimizerConfig& cfg) {
  const double spacing = cfg.grid_spacing_factor * std::sqrt(alpha);
  const double needed = std::ceil(span / spacing) + 1.0;
  const auto wanted = static_cast<Eigen::Index>(std::min(needed, static_cast<double>(cfg.max_grid_size)));
  Eigen::Index size = 32;
  while (size < std::max(cfg.grid_size, wanted)) size *= 2;
  return size;
}

/// Gradient descent with momentum from `init`.
///
/// The first `early_iterations` steps use `early_exaggeration` and
/// `momentum_start`; the rest use `exaggeration` and `momentum_late`.
/// Steps are scaled per point by adaptive gains unless disabled.
/// Learning rates are on the customary t-SNE scale, i.e. they multiply the
/// gradient with its constant factor 4 removed. Evaluation order is fixed,
/// so results do not depend on the host.
template <typename Scalar>
Embedding1D<Scalar> optimize(const BasicAffinityMatrix<Scalar>& P, const Embedding1D<Scalar>& init,
                             KernelParam<Scalar> param, const OptimizerConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = init.size();
  if (n < 2) throw ParameterError("optimize needs at least 2 points");
  if (P.size() != n) throw ParameterError("affinity size does not match embedding size");

  Embedding1D<Scalar> y = init;
  if (n > 1 && (y.array() == y(0)).all()) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-1e-10, 1e-10);
    for (Eigen::Index i = 0; i < n; ++i) y(i) += static_cast<Scalar>(jitter(rng));
  }
  Embedding1D<Scalar> velocity = Embedding1D<Scalar>::Zero(n);
  Embedding1D<Scalar> gains = Embedding1D<Scalar>::Ones(n);
  const auto min_gain = static_cast<Scalar>(cfg.min_gain);
  const auto lr = static_cast<Scalar>(cfg.learning_rate);

  for (int it = 0; it < cfg.iterations; ++it) {
    const bool early = it < cfg.early_iterations;
    const auto ex = static_cast<Scalar>(early ? cfg.early_exaggeration : cfg.exaggeration);
    const auto mu = static_cast<Scalar>(early ? cfg.momentum_start : cfg.momentum_late);

    Repulsion<Scalar> rep;
    if (cfg.repulsion == RepulsionMethod::kInterpolated) {
      const double span = static_cast<double>(y.maxCoeff() - y.minCoeff());
      rep = repulsion_interpolated(y, param, adaptive_grid_size(span, static_cast<double>(param.alpha()), cfg));
    } else {
      rep = repulsion_exact(y, param);
    }
    const Embedding1D<Scalar> grad = combine_gradient<Scalar>(attraction(P, y, param), rep, ex);
    if (cfg.adaptive_gains) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool opposed = (grad(i) > 0) != (velocity(i) > 0);
        gains(i) = std::max(opposed ? gains(i) + Scalar(0.2) : gains(i) * Scalar(0.8), min_gain);
      }
      velocity = mu * velocity - (lr / Scalar(4)) * gains.cwiseProduct(grad);
    } else {
      velocity = mu * velocity - (lr / Scalar(4)) * grad;
    }
    y += velocity;

    const Scalar extent = y.cwiseAbs().maxCoeff();
    if (!std::isfinite(static_cast<double>(extent)) || extent > static_cast<Scalar>(cfg.divergence_bound)) {
      throw ComputationError("optimization diverged at iteration " + std::to_string(it));
    }
  }
  return y;
}

}  // namespace treesne
