#pragma once

// Reduced density matrices, Schmidt decomposition across a bipartition,
// entropy/participation measures and the qubit x rest closed form.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "entangle/errors.hpp"
#include "entangle/linalg.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

inline constexpr double kRankCutoff = 1e-12;
inline constexpr double kNegativeCoefficientTol = 1e-12;

enum class Side { A, B };

struct SchmidtResult {
  std::vector<double> coefficients;  // p_k, descending, min(u, v) of them
  std::vector<CVector> left_basis;   // |alpha_k>, dimension u
  std::vector<CVector> right_basis;  // |beta_k>, dimension v
  double entropy_bits = 0.0;
  double entropy_nats = 0.0;
  double participation = 1.0;
  std::size_t rank = 0;
  bool degenerate_leading = false;
};

struct QubitSplitResult {
  double concurrence_sq = 0.0;  // C, sum of squared 2x2 minors
  double mu_plus = 1.0;
  double mu_minus = 0.0;
  double theta_max = 0.0;       // cos(theta_max) = mu_plus
  double theta_max_amplitude = 0.0;  // alternative reading: cos = sqrt(mu_plus)
};

namespace detail {

inline void require_bipartite(const SubsystemSplit& split) {
  if (!split.is_bipartite())
    throw SplitError("operation needs a bipartite split, got " +
                     std::to_string(split.factor_count()) + " factors");
}

// Amplitudes of psi as a u x v matrix chi(k, q) in the split's factor layout.
struct AmplitudeMatrix {
  std::size_t rows = 0, cols = 0;
  CVector data;
  const cplx& operator()(std::size_t k, std::size_t q) const {
    return data[k * cols + q];
  }
};

inline AmplitudeMatrix amplitude_matrix(const StateVector& psi,
                                        const SubsystemSplit& split) {
  require_bipartite(split);
  auto t = to_factor_layout(psi, split);
  return {split.factor_dims()[0], split.factor_dims()[1], t.amps()};
}

inline DensityMatrix marginal_of(const AmplitudeMatrix& chi, Side keep) {
  if (keep == Side::A) {
    DensityMatrix rho(chi.rows);
    for (std::size_t k = 0; k < chi.rows; ++k)
      for (std::size_t l = k; l < chi.rows; ++l) {
        cplx s{};
        for (std::size_t t = 0; t < chi.cols; ++t)
          s += chi(k, t) * std::conj(chi(l, t));
        rho(k, l) = s;
        rho(l, k) = std::conj(s);
      }
    return rho;
  }
  DensityMatrix rho(chi.cols);
  for (std::size_t q = 0; q < chi.cols; ++q)
    for (std::size_t r = q; r < chi.cols; ++r) {
      cplx s{};
      for (std::size_t t = 0; t < chi.rows; ++t)
        s += chi(t, q) * std::conj(chi(t, r));
      rho(q, r) = s;
      rho(r, q) = std::conj(s);
    }
  return rho;
}

// Extends `basis` with standard basis vectors, Gram-Schmidt orthonormalized,
// until it has `count` members.
inline void complete_basis(std::vector<CVector>& basis, std::size_t dim,
                           std::size_t count) {
  for (std::size_t e = 0; e < dim && basis.size() < count; ++e) {
    CVector v(dim);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const cplx proj = dot(b, v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * b[i];
      }
    const double n = std::sqrt(norm_squared(v));
    if (n < 1e-6) continue;
    for (auto& x : v) x /= n;
    basis.push_back(std::move(v));
  }
}

}  // namespace detail

inline DensityMatrix reduced_density_matrix(const StateVector& psi,
                                            const SubsystemSplit& split,
                                            Side keep) {
  detail::require_bipartite(split);
  require_normalized(psi);
  return detail::marginal_of(detail::amplitude_matrix(psi, split), keep);
}

inline double entropy_bits(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x < -kNegativeCoefficientTol)
      throw DomainError("negative coefficient " + std::to_string(x));
    if (x > 0.0) s -= x * std::log2(x);
  }
  return std::max(0.0, s);
}

inline double entropy_nats(const std::vector<double>& p) {
  return entropy_bits(p) * std::numbers::ln2;
}

inline double participation(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x < -kNegativeCoefficientTol)
      throw DomainError("negative coefficient " + std::to_string(x));
    s += x * x;
  }
  if (!(s > 0.0)) throw DomainError("participation of an all-zero spectrum");
  return 1.0 / s;
}

// p_k from the eigenvalues of rho_A; alpha_k its eigenvectors; beta_k from
// contracting psi against alpha_k so that sum_k sqrt(p_k) alpha_k (x) beta_k
// rebuilds psi including relative phases.
inline SchmidtResult schmidt_decompose(const StateVector& psi,
                                       const SubsystemSplit& split) {
  detail::require_bipartite(split);
  require_normalized(psi);
  const auto chi = detail::amplitude_matrix(psi, split);
  const std::size_t u = chi.rows, v = chi.cols;
  const std::size_t r = std::min(u, v);

  auto eig = hermitian_eig(detail::marginal_of(chi, Side::A));

  SchmidtResult out;
  for (std::size_t k = 0; k < r; ++k) {
    const double p = std::max(0.0, eig.values[k]);
    out.coefficients.push_back(p);
    out.left_basis.push_back(eig.vectors[k]);
  }

  for (std::size_t k = 0; k < r; ++k) {
    const double p = out.coefficients[k];
    if (p < kRankCutoff) break;
    ++out.rank;
    CVector beta(v);
    const auto& alpha = out.left_basis[k];
    for (std::size_t q = 0; q < v; ++q) {
      cplx s{};
      for (std::size_t i = 0; i < u; ++i) s += std::conj(alpha[i]) * chi(i, q);
      beta[q] = s / std::sqrt(p);
    }
    // Contraction error grows like eps / sqrt(p); one Gram-Schmidt pass
    // restores orthonormality for small p without moving the large ones.
    for (const auto& prev : out.right_basis) {
      const cplx proj = dot(prev, beta);
      for (std::size_t q = 0; q < v; ++q) beta[q] -= proj * prev[q];
    }
    const double bn = std::sqrt(norm_squared(beta));
    for (auto& x : beta) x /= bn;
    out.right_basis.push_back(std::move(beta));
  }
  detail::complete_basis(out.right_basis, v, r);

  out.entropy_bits = entropy_bits(out.coefficients);
  out.entropy_nats = out.entropy_bits * std::numbers::ln2;
  out.participation = participation(out.coefficients);
  out.degenerate_leading = leading_gap(eig.values) < kDegeneracyGap;
  return out;
}

// sum_k sqrt(p_k) |alpha_k> (x) |beta_k>, in the declared layout of split.
inline StateVector schmidt_rebuild(const SchmidtResult& s,
                                   const SubsystemSplit& split) {
  detail::require_bipartite(split);
  const std::size_t u = split.factor_dims()[0], v = split.factor_dims()[1];
  CVector t(u * v);
  for (std::size_t k = 0; k < s.coefficients.size(); ++k) {
    const double w = std::sqrt(s.coefficients[k]);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < u; ++i)
      for (std::size_t j = 0; j < v; ++j)
        t[i * v + j] += w * s.left_basis[k][i] * s.right_basis[k][j];
  }
  return from_factor_layout(StateVector(split.factor_dims(), std::move(t)), split);
}

// Closed form for a (2, u) split. C is the double sum of squared 2x2 minors
// and mu = (1 +- sqrt(1 - 4C)) / 2. The discriminant 1 - 4C is evaluated as
// (n0 - n1)^2 + 4|<r0|r1>|^2 (rows r0, r1 of chi), which equals 1 - 4C for
// a normalized state and keeps full precision near C = 1/4.
inline QubitSplitResult qubit_split_closed_form(const StateVector& psi,
                                                const SubsystemSplit& split) {
  detail::require_bipartite(split);
  if (split.factor_dims()[0] != 2)
    throw SplitError("first factor must be a qubit, has dimension " +
                     std::to_string(split.factor_dims()[0]));
  require_normalized(psi);
  const auto chi = detail::amplitude_matrix(psi, split);
  const std::size_t u = chi.cols;

  QubitSplitResult out;
  double c = 0.0;
  for (std::size_t j = 1; j < u; ++j)
    for (std::size_t k = 0; k < j; ++k)
      c += std::norm(chi(0, j) * chi(1, k) - chi(1, j) * chi(0, k));
  out.concurrence_sq = c;

  double n0 = 0.0, n1 = 0.0;
  cplx overlap{};
  for (std::size_t q = 0; q < u; ++q) {
    n0 += std::norm(chi(0, q));
    n1 += std::norm(chi(1, q));
    overlap += std::conj(chi(0, q)) * chi(1, q);
  }
  const double total = n0 + n1;
  const double disc = ((n0 - n1) * (n0 - n1) + 4.0 * std::norm(overlap)) /
                      (total * total);
  const double root = std::sqrt(std::max(0.0, disc));
  out.mu_plus = 0.5 * (1.0 + root);
  out.mu_minus = 0.5 * (1.0 - root);
  out.theta_max = std::acos(std::clamp(out.mu_plus, -1.0, 1.0));
  out.theta_max_amplitude = std::acos(std::clamp(std::sqrt(out.mu_plus), -1.0, 1.0));
  return out;
}

}  // namespace entangle
