#pragma once

// Test-only oracles. Everything here goes through Eigen or plain enumeration
// so that it never shares a code path with the library under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "entangle/tensor_state.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline entangle::CVector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  entangle::CVector v(n);
  for (auto& x : v) {
    const double re = g(rng);
    const double im = g(rng);
    x = {re, im};
  }
  return v;
}

inline entangle::StateVector random_state(std::vector<std::size_t> dims,
                                          std::mt19937_64& rng) {
  const std::size_t n = entangle::dims_product(dims);
  auto v = random_vector(n, rng);
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  for (auto& x : v) x /= std::sqrt(s);
  return {std::move(dims), std::move(v)};
}

// u x v matrix chi(k, q) of a state already laid out as (u, v) row-major.
inline MatrixXcd as_matrix(const entangle::CVector& amps, std::size_t u, std::size_t v) {
  MatrixXcd m(u, v);
  for (std::size_t k = 0; k < u; ++k)
    for (std::size_t q = 0; q < v; ++q) m(k, q) = amps[k * v + q];
  return m;
}

// Squared singular values, descending: the Schmidt coefficients.
inline std::vector<double> schmidt_spectrum(const entangle::CVector& amps, std::size_t u,
                                            std::size_t v) {
  Eigen::JacobiSVD<MatrixXcd> svd(as_matrix(amps, u, v));
  std::vector<double> p;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    p.push_back(svd.singularValues()(i) * svd.singularValues()(i));
  std::sort(p.rbegin(), p.rend());
  return p;
}

inline std::vector<double> hermitian_spectrum(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

inline MatrixXcd random_unitary(std::size_t d, std::mt19937_64& rng) {
  MatrixXcd g(d, d);
  auto v = random_vector(d * d, rng);
  for (std::size_t i = 0; i < d * d; ++i) g(i / d, i % d) = v[i];
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  return qr.householderQ();
}

// Applies U to factor f of a state laid out row-major over `dims`.
inline entangle::CVector apply_local(const entangle::CVector& amps,
                                     const std::vector<std::size_t>& dims, std::size_t f,
                                     const MatrixXcd& u) {
  std::size_t inner = 1;
  for (std::size_t g = f + 1; g < dims.size(); ++g) inner *= dims[g];
  const std::size_t d = dims[f];
  const std::size_t outer = amps.size() / (inner * d);
  entangle::CVector out(amps.size());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i)
      for (std::size_t r = 0; r < d; ++r) {
        cplx s{};
        for (std::size_t c = 0; c < d; ++c)
          s += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
               amps[(o * d + c) * inner + i];
        out[(o * d + r) * inner + i] = s;
      }
  return out;
}

// Brute-force partial trace by summing |psi><psi| over the traced index.
inline MatrixXcd partial_trace_keep_first(const entangle::CVector& amps, std::size_t u,
                                          std::size_t v) {
  MatrixXcd rho = MatrixXcd::Zero(u, v == 0 ? 0 : u);
  for (std::size_t k = 0; k < u; ++k)
    for (std::size_t l = 0; l < u; ++l)
      for (std::size_t t = 0; t < v; ++t)
        rho(k, l) += amps[k * v + t] * std::conj(amps[l * v + t]);
  return rho;
}

// Sequential chain by SVD along the all-top path: returns 1 - prod(top p).
inline double chain_sin2(const entangle::CVector& amps, std::vector<std::size_t> dims,
                         const std::vector<std::size_t>& ordering) {
  std::vector<std::size_t> labels(dims.size());
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  entangle::CVector cur = amps;
  double c2 = 1.0;
  for (std::size_t step = 0; step + 1 < ordering.size(); ++step) {
    const auto pos = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), ordering[step]) - labels.begin());
    // Move the peeled axis to the front.
    std::size_t inner = 1;
    for (std::size_t g = pos + 1; g < dims.size(); ++g) inner *= dims[g];
    const std::size_t d = dims[pos];
    const std::size_t outer = cur.size() / (inner * d);
    entangle::CVector moved(cur.size());
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < inner; ++i)
          moved[k * (outer * inner) + o * inner + i] = cur[(o * d + k) * inner + i];
    const std::size_t rest = cur.size() / d;
    Eigen::JacobiSVD<MatrixXcd> svd(as_matrix(moved, d, rest), Eigen::ComputeThinV);
    const double s0 = svd.singularValues()(0);
    c2 *= s0 * s0;
    entangle::CVector next(rest);
    for (std::size_t q = 0; q < rest; ++q)
      next[q] = std::conj(svd.matrixV()(static_cast<Eigen::Index>(q), 0));
    cur = std::move(next);
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(pos));
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return 1.0 - c2;
}

// |<phi|psi>|^2 for qubit product states phi_q = cos(t/2)|0> + e^{i f} sin(t/2)|1>.
// params = (t_0, f_0, t_1, f_1, ...); the first phase is pinned to 0 by the caller.
inline double qubit_product_overlap_sq(const entangle::CVector& psi, std::size_t qubits,
                                       const std::vector<double>& params) {
  std::vector<std::array<cplx, 2>> q(qubits);
  for (std::size_t k = 0; k < qubits; ++k) {
    const double t = params[2 * k], f = params[2 * k + 1];
    q[k] = {cplx(std::cos(t / 2), 0.0), std::polar(std::sin(t / 2), f)};
  }
  cplx s{};
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    if (psi[idx] == cplx{}) continue;
    cplx w = psi[idx];
    for (std::size_t k = 0; k < qubits; ++k) {
      const std::size_t bit = (idx >> (qubits - 1 - k)) & 1u;
      w *= std::conj(q[k][bit]);
    }
    s += w;
  }
  return std::norm(s);
}

struct GridOptimum {
  double coarse = 0.0;   // best overlap^2 on the coarse grid
  double refined = 0.0;  // after zooming the grid around the coarse best
  double final_step = 0.0;
};

// Exhaustive grid over (theta, phi) per qubit with the first phase pinned,
// then repeated local 3^k grids with halving step around the incumbent.
inline GridOptimum grid_search_max_overlap(const entangle::CVector& psi, std::size_t qubits,
                                           std::size_t theta_points, std::size_t phi_points) {
  const double pi = std::acos(-1.0);
  const std::size_t nparams = 2 * qubits;
  std::vector<double> best(nparams, 0.0), cur(nparams, 0.0);
  double best_val = -1.0;
  // Free parameters: every theta, every phi except phi_0.
  std::vector<std::size_t> free;
  for (std::size_t p = 0; p < nparams; ++p)
    if (p != 1) free.push_back(p);
  std::vector<std::size_t> counter(free.size(), 0);
  const double dt = pi / static_cast<double>(theta_points - 1);
  const double dp = 2 * pi / static_cast<double>(phi_points);
  while (true) {
    for (std::size_t i = 0; i < free.size(); ++i) {
      const std::size_t p = free[i];
      cur[p] = (p % 2 == 0) ? counter[i] * dt : counter[i] * dp;
    }
    const double val = qubit_product_overlap_sq(psi, qubits, cur);
    if (val > best_val) {
      best_val = val;
      best = cur;
    }
    std::size_t i = 0;
    for (; i < free.size(); ++i) {
      const std::size_t limit = (free[i] % 2 == 0) ? theta_points : phi_points;
      if (++counter[i] < limit) break;
      counter[i] = 0;
    }
    if (i == free.size()) break;
  }
  GridOptimum out;
  out.coarse = best_val;

  double step = std::max(dt, dp);
  std::vector<int> offs(free.size());
  while (step > 1e-10) {
    bool improved = false;
    std::fill(offs.begin(), offs.end(), -1);
    const std::vector<double> center = best;
    while (true) {
      for (std::size_t i = 0; i < free.size(); ++i)
        cur[free[i]] = center[free[i]] + offs[i] * step;
      const double val = qubit_product_overlap_sq(psi, qubits, cur);
      if (val > best_val + 1e-16) {
        best_val = val;
        best = cur;
        improved = true;
      }
      std::size_t i = 0;
      for (; i < free.size(); ++i) {
        if (++offs[i] <= 1) break;
        offs[i] = -1;
      }
      if (i == free.size()) break;
    }
    if (!improved) step *= 0.5;
  }
  out.refined = best_val;
  out.final_step = step;
  return out;
}

}  // namespace oracle
