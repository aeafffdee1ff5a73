#pragma once

// Pure states as complex amplitude vectors over a tensor product of
// subsystems, plus the grouping of subsystems into factors.
//
// Index convention: row-major (the last subsystem varies fastest), both for
// the declared subsystems of a StateVector and for the factors of a
// SubsystemSplit taken in the order they are declared.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entangle/errors.hpp"

namespace entangle {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double kNormalizationTol = 1e-8;

inline std::size_t dims_product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

inline std::string dims_to_string(std::span<const std::size_t> dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

class StateVector {
 public:
  StateVector() = default;

  StateVector(std::vector<std::size_t> dims, CVector amps)
      : dims_(std::move(dims)), amps_(std::move(amps)) {
    if (dims_.empty()) throw ShapeError("state needs at least one subsystem");
    for (auto d : dims_)
      if (d == 0) throw ShapeError("subsystem dimension must be positive");
    if (dims_product(dims_) != amps_.size())
      throw ShapeError("dims " + dims_to_string(dims_) + " need " +
                       std::to_string(dims_product(dims_)) +
                       " amplitudes, got " + std::to_string(amps_.size()));
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  const CVector& amps() const { return amps_; }
  std::size_t size() const { return amps_.size(); }
  std::size_t subsystem_count() const { return dims_.size(); }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  bool is_normalized(double tol = kNormalizationTol) const {
    return std::abs(norm_squared() - 1.0) <= tol;
  }

  // Unit-norm copy. Callers opt in; nothing in the library renormalizes
  // silently.
  StateVector normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw NormalizationError("zero state");
    const double s = 1.0 / std::sqrt(n2);
    CVector out(amps_);
    for (auto& a : out) a *= s;
    return {dims_, std::move(out)};
  }

 private:
  std::vector<std::size_t> dims_;
  CVector amps_;
};

inline void require_normalized(const StateVector& psi) {
  if (!psi.is_normalized())
    throw NormalizationError("state is not normalized: <psi|psi> = " +
                             std::to_string(psi.norm_squared()));
}

struct MultiIndex {
  std::vector<std::size_t> indices;
};

// Row-major flat index of `mi` within a box of extents `dims`.
inline std::size_t flat_index(const MultiIndex& mi,
                              std::span<const std::size_t> dims) {
  if (mi.indices.size() != dims.size())
    throw IndexError("multi-index has " + std::to_string(mi.indices.size()) +
                     " components, expected " + std::to_string(dims.size()));
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (mi.indices[k] >= dims[k])
      throw IndexError("component " + std::to_string(k) + " = " +
                       std::to_string(mi.indices[k]) + " out of range [0, " +
                       std::to_string(dims[k]) + ")");
    flat = flat * dims[k] + mi.indices[k];
  }
  return flat;
}

inline MultiIndex multi_index(std::size_t flat,
                              std::span<const std::size_t> dims) {
  if (flat >= dims_product(dims))
    throw IndexError("flat index " + std::to_string(flat) + " out of range");
  MultiIndex mi{std::vector<std::size_t>(dims.size())};
  for (std::size_t k = dims.size(); k-- > 0;) {
    mi.indices[k] = flat % dims[k];
    flat /= dims[k];
  }
  return mi;
}

// Grouping of the declared subsystems of a state into factors A, B, C, ...
// Factor dimension = product of the subsystem dimensions in its group, taken
// row-major in the order the group lists them.
class SubsystemSplit {
 public:
  SubsystemSplit(std::vector<std::size_t> subsystem_dims,
                 std::vector<std::vector<std::size_t>> groups)
      : subsystem_dims_(std::move(subsystem_dims)), groups_(std::move(groups)) {
    if (groups_.size() < 2)
      throw SplitError("a split needs at least two factors, got " +
                       std::to_string(groups_.size()));
    std::vector<int> seen(subsystem_dims_.size(), 0);
    for (const auto& g : groups_) {
      if (g.empty()) throw SplitError("empty factor group");
      std::size_t d = 1;
      for (auto s : g) {
        if (s >= subsystem_dims_.size())
          throw SplitError("subsystem " + std::to_string(s) +
                           " does not exist (state has " +
                           std::to_string(subsystem_dims_.size()) + ")");
        if (seen[s]++) throw SplitError("subsystem " + std::to_string(s) +
                                        " appears in more than one group");
        d *= subsystem_dims_[s];
      }
      if (d < 2)
        throw SplitError("factor of dimension 1 makes the problem degenerate");
      factor_dims_.push_back(d);
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
      if (!seen[s])
        throw SplitError("subsystem " + std::to_string(s) +
                         " is not assigned to any factor");
  }

  // Each declared subsystem becomes its own factor.
  static SubsystemSplit each_subsystem(std::vector<std::size_t> dims) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < dims.size(); ++s) groups.push_back({s});
    return {std::move(dims), std::move(groups)};
  }

  // Plain contiguous split over factor dimensions, one subsystem per factor.
  static SubsystemSplit of_factor_dims(std::vector<std::size_t> factor_dims) {
    return each_subsystem(std::move(factor_dims));
  }

  const std::vector<std::size_t>& subsystem_dims() const {
    return subsystem_dims_;
  }
  const std::vector<std::vector<std::size_t>>& groups() const {
    return groups_;
  }
  const std::vector<std::size_t>& factor_dims() const { return factor_dims_; }
  std::size_t factor_count() const { return groups_.size(); }
  std::size_t total_dim() const { return dims_product(factor_dims_); }
  bool is_bipartite() const { return groups_.size() == 2; }

  // Entry F holds the declared-layout flat index of factor-layout flat index F.
  std::vector<std::size_t> factor_to_declared() const {
    const std::size_t n = total_dim();
    std::vector<std::size_t> map(n);
    std::vector<std::size_t> sub(subsystem_dims_.size());
    for (std::size_t orig = 0; orig < n; ++orig) {
      std::size_t rem = orig;
      for (std::size_t k = subsystem_dims_.size(); k-- > 0;) {
        sub[k] = rem % subsystem_dims_[k];
        rem /= subsystem_dims_[k];
      }
      std::size_t f = 0;
      for (const auto& g : groups_)
        for (auto s : g) f = f * subsystem_dims_[s] + sub[s];
      map[f] = orig;
    }
    return map;
  }

  void check_state(const StateVector& psi) const {
    if (psi.dims() != subsystem_dims_)
      throw ShapeError("state dims " + dims_to_string(psi.dims()) +
                       " do not match split dims " +
                       dims_to_string(subsystem_dims_));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t f = 0; f < groups_.size(); ++f) {
      if (f) s += "|";
      for (std::size_t k = 0; k < groups_[f].size(); ++k) {
        if (k) s += ",";
        s += std::to_string(groups_[f][k]);
      }
    }
    return s;
  }

 private:
  std::vector<std::size_t> subsystem_dims_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<std::size_t> factor_dims_;
};

inline std::size_t flat_index(const MultiIndex& mi,
                              const SubsystemSplit& split) {
  return flat_index(mi, std::span<const std::size_t>(split.factor_dims()));
}

inline MultiIndex multi_index(std::size_t flat, const SubsystemSplit& split) {
  return multi_index(flat, std::span<const std::size_t>(split.factor_dims()));
}

// Amplitudes of psi rearranged so that dims = factor_dims and the layout is
// row-major over factors. Every algorithm below works in this layout.
inline StateVector to_factor_layout(const StateVector& psi,
                                    const SubsystemSplit& split) {
  split.check_state(psi);
  const auto map = split.factor_to_declared();
  CVector out(map.size());
  for (std::size_t f = 0; f < map.size(); ++f) out[f] = psi[map[f]];
  return {split.factor_dims(), std::move(out)};
}

inline StateVector from_factor_layout(const StateVector& tensor,
                                      const SubsystemSplit& split) {
  if (tensor.dims() != split.factor_dims())
    throw ShapeError("tensor dims " + dims_to_string(tensor.dims()) +
                     " do not match factor dims " +
                     dims_to_string(split.factor_dims()));
  const auto map = split.factor_to_declared();
  CVector out(map.size());
  for (std::size_t f = 0; f < map.size(); ++f) out[map[f]] = tensor[f];
  return {split.subsystem_dims(), std::move(out)};
}

inline void check_same_dims(const StateVector& a, const StateVector& b) {
  if (a.dims() != b.dims())
    throw ShapeError("dimension mismatch: " + dims_to_string(a.dims()) +
                     " vs " + dims_to_string(b.dims()));
}

// <a|b>, conjugate-linear in the first argument.
inline cplx inner_product(const StateVector& a, const StateVector& b) {
  check_same_dims(a, b);
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double distance_squared(const StateVector& phi, const StateVector& psi) {
  check_same_dims(phi, psi);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += std::norm(phi[i] - psi[i]);
  return s;
}

// Outer product of row-major factors; no layout change.
inline CVector outer_product(std::span<const CVector> factors) {
  CVector out{cplx{1.0, 0.0}};
  for (const auto& f : factors) {
    CVector next;
    next.reserve(out.size() * f.size());
    for (const auto& x : out)
      for (const auto& y : f) next.push_back(x * y);
    out = std::move(next);
  }
  return out;
}

// |A> (x) |B> (x) ... returned in the declared subsystem layout of `split`,
// so the result is directly comparable with the state the split came from.
inline StateVector assemble_product(std::span<const CVector> factors,
                                    const SubsystemSplit& split) {
  if (factors.size() != split.factor_count())
    throw ShapeError("expected " + std::to_string(split.factor_count()) +
                     " factors, got " + std::to_string(factors.size()));
  for (std::size_t f = 0; f < factors.size(); ++f)
    if (factors[f].size() != split.factor_dims()[f])
      throw ShapeError("factor " + std::to_string(f) + " has length " +
                       std::to_string(factors[f].size()) + ", expected " +
                       std::to_string(split.factor_dims()[f]));
  return from_factor_layout(StateVector(split.factor_dims(), outer_product(factors)),
                            split);
}

inline StateVector assemble_product(const std::vector<CVector>& factors,
                                    const SubsystemSplit& split) {
  return assemble_product(std::span<const CVector>(factors), split);
}

}  // namespace entangle
