#pragma once

// Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian ones.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "entangle/errors.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDegeneracyGap = 1e-10;

// Row-major square matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, CVector data) : dim_(dim), data_(std::move(data)) {
    if (data_.size() != dim_ * dim_)
      throw ShapeError("matrix of dimension " + std::to_string(dim_) +
                       " needs " + std::to_string(dim_ * dim_) + " entries");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  const CVector& data() const { return data_; }

  cplx trace() const {
    cplx t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = r; c < dim_; ++c)
        worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return worst;
  }

  CVector column(std::size_t c) const {
    CVector v(dim_);
    for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  CVector apply(const CVector& x) const {
    if (x.size() != dim_) throw ShapeError("matrix-vector size mismatch");
    CVector y(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      cplx s{};
      for (std::size_t c = 0; c < dim_; ++c) s += (*this)(r, c) * x[c];
      y[r] = s;
    }
    return y;
  }

 private:
  std::size_t dim_ = 0;
  CVector data_;
};

// Reduced density matrix of a pure state. Hermitian with unit trace.
using DensityMatrix = ComplexMatrix;

struct EigenResult {
  std::vector<double> values;   // descending
  std::vector<CVector> vectors; // vectors[k] pairs with values[k]
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

// Largest-magnitude component made real and positive; the first such
// component wins ties.
inline void fix_phase(CVector& v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > mag * (1.0 + 1e-12) ) {
      mag = m;
      best = i;
    }
  }
  if (mag <= 0.0) return;
  const cplx phase = std::conj(v[best]) / mag;
  for (auto& x : v) x *= phase;
  v[best] = cplx(std::abs(v[best]), 0.0);
}

}  // namespace detail

// Cyclic Jacobi sweeps over all (p, q) pairs. Each rotation is a complex
// Givens unitary U = diag(1, e^{-i phi}) R(c, s) that zeroes A(p, q); sweeps
// continue until the off-diagonal Frobenius norm drops to 1e-13 * dim
// (scaled by the matrix norm when that exceeds one).
inline EigenResult hermitian_eig(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw MatrixError("empty matrix");
  const double scale = std::max(1.0, m.frobenius_norm());
  if (m.hermiticity_defect() > kHermitianTol * scale)
    throw MatrixError("matrix is not Hermitian (defect " +
                      std::to_string(m.hermiticity_defect()) + ")");

  ComplexMatrix a(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      a(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double target = 1e-13 * static_cast<double>(n) * scale;
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (detail::off_diagonal_norm(a) > target) {
    if (++sweep > kMaxSweeps)
      throw MatrixError("Jacobi iteration did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx eiphi = apq / mag;  // A(p,q) = |A(p,q)| e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const cplx upp = c, upq = s;
        const cplx uqp = -s * std::conj(eiphi), uqq = c * std::conj(eiphi);
        // A <- A U (columns p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        // A <- U^H A (rows p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });
  EigenResult out;
  for (auto k : order) {
    out.values.push_back(a(k, k).real());
    CVector col = v.column(k);
    detail::fix_phase(col);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// Smallest gap between the leading eigenvalue and the next one; +inf when
// there is only one.
inline double leading_gap(const std::vector<double>& descending) {
  if (descending.size() < 2) return INFINITY;
  return descending[0] - descending[1];
}

inline cplx dot(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw ShapeError("vector size mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm_squared(const CVector& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

inline double max_orthonormality_defect(const std::vector<CVector>& basis) {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const cplx d = dot(basis[i], basis[j]) - (i == j ? cplx(1.0) : cplx(0.0));
      worst = std::max(worst, std::abs(d));
    }
  return worst;
}

}  // namespace entangle
