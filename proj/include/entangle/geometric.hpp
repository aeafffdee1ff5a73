#pragma once

// Nearest product state to a pure state over an arbitrary multipartite split.
//
// The product state |phi> = |a> (x) |b> (x) ... is NOT normalized. Setting
// dD^2/da = 0 with the other factors fixed gives
//
//   a_i * prod_{g != A} N_g = sum_{j,k,...} chi_{ijk...} conj(b_j c_k ...)
//
// (the conjugate of the stationarity row), so each factor update is an exact
// least-squares solve and D^2 never increases. At a critical point
// <phi|psi> = <phi|phi> = prod N_g, cos(theta_C) = sqrt(prod N_g) and
// D^2 = 1 - prod N_g = sin^2(theta_C).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "entangle/errors.hpp"
#include "entangle/linalg.hpp"
#include "entangle/schmidt.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

struct ProductState {
  std::vector<CVector> factors;
  std::vector<double> factor_norms;  // N_A, N_B, ... (squared norms)
  double norm_product = 0.0;

  static ProductState from_factors(std::vector<CVector> factors) {
    ProductState ps{std::move(factors), {}, 1.0};
    for (const auto& f : ps.factors) {
      ps.factor_norms.push_back(norm_squared(f));
      ps.norm_product *= ps.factor_norms.back();
    }
    return ps;
  }
};

struct GeometricConfig {
  std::size_t starts = 16;
  std::size_t max_sweeps = 10000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  bool record_history = false;  // keep D^2 after every sweep, per start
};

enum class GeometricVariant { Unnormalized, Normalized, ClosedForm };

inline const char* to_string(GeometricVariant v) {
  switch (v) {
    case GeometricVariant::Unnormalized: return "unnormalized";
    case GeometricVariant::Normalized: return "normalized";
    case GeometricVariant::ClosedForm: return "closed_form";
  }
  return "?";
}

struct StartReport {
  std::size_t index = 0;
  bool deterministic = false;
  bool restarted = false;  // replaced once after a vanishing contraction
  bool abandoned = false;
  bool converged = false;
  std::size_t sweeps = 0;
  double norm_product = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  std::vector<double> d2_history;  // initial D^2 first, then one per sweep
};

struct GeometricResult {
  GeometricVariant variant = GeometricVariant::Unnormalized;
  ProductState product_state;
  double lambda = 0.0;  // sqrt(prod N)
  double cos_theta_c = 0.0;
  double sin2_theta_c = 0.0;
  double d2_unnormalized = 0.0;  // |phi - psi|^2, evaluated directly
  double d2_normalized = 0.0;    // |phi/|phi| - psi|^2, evaluated directly
  cplx overlap{};                // <phi|psi>
  double residual = 0.0;
  std::size_t sweeps = 0;
  std::size_t starts_used = 0;
  bool converged = false;
  bool degenerate_leading = false;
  std::vector<double> critical_values;  // distinct prod N found, descending
  std::vector<StartReport> starts;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, GeometricResult best)
      : Error(what), best_(std::move(best)) {}
  const GeometricResult& best_partial() const { return best_; }

 private:
  GeometricResult best_;
};

namespace detail {

inline constexpr double kZeroContractionRel = 1e-14;
inline constexpr double kRelativeChangeTol = 1e-12;
inline constexpr double kTieTol = 1e-12;
inline constexpr double kDistinctCriticalTol = 1e-9;

inline void check_product_shape(const std::vector<CVector>& factors,
                                const std::vector<std::size_t>& dims) {
  if (factors.size() != dims.size())
    throw ShapeError("product state has " + std::to_string(factors.size()) +
                     " factors, split has " + std::to_string(dims.size()));
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (factors[f].size() != dims[f])
      throw ShapeError("factor " + std::to_string(f) + " has length " +
                       std::to_string(factors[f].size()) + ", expected " +
                       std::to_string(dims[f]));
}

// out[i] = sum over all other indices of T[.., i, ..] * prod_{g != f} conj(x_g)
inline CVector contract_except(const StateVector& tensor,
                               const std::vector<CVector>& factors,
                               std::size_t f) {
  const auto& dims = tensor.dims();
  const std::size_t m = dims.size();
  CVector out(dims[f]);
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
    cplx w = tensor[flat];
    if (w != cplx{}) {
      for (std::size_t g = 0; g < m; ++g)
        if (g != f) w *= std::conj(factors[g][idx[g]]);
      out[idx[f]] += w;
    }
    for (std::size_t g = m; g-- > 0;) {
      if (++idx[g] < dims[g]) break;
      idx[g] = 0;
    }
  }
  return out;
}

inline double product_except(const std::vector<double>& norms, std::size_t f) {
  double p = 1.0;
  for (std::size_t g = 0; g < norms.size(); ++g)
    if (g != f) p *= norms[g];
  return p;
}

// Equal squared norms for every factor, product unchanged.
inline void rebalance(std::vector<CVector>& factors) {
  std::vector<double> norms;
  double log_p = 0.0;
  for (const auto& f : factors) {
    norms.push_back(norm_squared(f));
    log_p += std::log(norms.back());
  }
  const double target = std::exp(log_p / static_cast<double>(factors.size()));
  for (std::size_t g = 0; g < factors.size(); ++g) {
    const double s = std::sqrt(target / norms[g]);
    for (auto& x : factors[g]) x *= s;
  }
}

inline void normalize_each(std::vector<CVector>& factors) {
  for (auto& f : factors) {
    const double n = std::sqrt(norm_squared(f));
    for (auto& x : f) x /= n;
  }
}

inline double unnormalized_residual(const StateVector& tensor,
                                    const std::vector<CVector>& factors) {
  std::vector<double> norms;
  for (const auto& f : factors) norms.push_back(norm_squared(f));
  double worst = 0.0;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const CVector c = contract_except(tensor, factors, f);
    const double others = product_except(norms, f);
    for (std::size_t i = 0; i < c.size(); ++i)
      worst = std::max(worst, std::abs(factors[f][i] * others - c[i]));
  }
  return worst;
}

// Violation of sum chi^* (prod of others) = Lambda conj(x_f) for unit factors,
// with Lambda = Re <phi_N|psi>.
inline double normalized_residual(const StateVector& tensor,
                                  const std::vector<CVector>& factors,
                                  double lambda) {
  double worst = 0.0;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const CVector c = contract_except(tensor, factors, f);
    for (std::size_t i = 0; i < c.size(); ++i)
      worst = std::max(worst, std::abs(c[i] - lambda * factors[f][i]));
  }
  return worst;
}

inline cplx product_overlap(const StateVector& tensor,
                            const std::vector<CVector>& factors) {
  // <phi|psi> = sum_i conj(x_0[i]) * contraction_0[i]
  const CVector c = contract_except(tensor, factors, 0);
  return dot(factors[0], c);
}

inline double product_distance_sq(const StateVector& tensor,
                                  const std::vector<CVector>& factors) {
  const CVector phi = outer_product(factors);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += std::norm(phi[i] - tensor[i]);
  return s;
}

// One cyclic pass in declared factor order. Unnormalized: x_f = c / prod_{g!=f}
// N_g, then rebalance. Normalized: x_f = c / |c|.
inline void sweep_in_place(const StateVector& tensor, std::vector<CVector>& factors,
                           bool normalized) {
  for (std::size_t f = 0; f < factors.size(); ++f) {
    std::vector<double> norms;
    for (const auto& x : factors) norms.push_back(norm_squared(x));
    const double others = product_except(norms, f);
    CVector c = contract_except(tensor, factors, f);
    const double cn = std::sqrt(norm_squared(c));
    if (!(cn > kZeroContractionRel * std::sqrt(others)))
      throw ZeroContraction("contraction for factor " + std::to_string(f) +
                            " vanished");
    const double s = normalized ? 1.0 / cn : 1.0 / others;
    for (auto& x : c) x *= s;
    factors[f] = std::move(c);
    if (!normalized) rebalance(factors);
  }
}

inline std::vector<CVector> deterministic_start(const StateVector& tensor) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < tensor.size(); ++i)
    if (std::abs(tensor[i]) > std::abs(tensor[best])) best = i;
  const auto mi = multi_index(best, std::span<const std::size_t>(tensor.dims()));
  std::vector<CVector> factors;
  for (std::size_t f = 0; f < tensor.dims().size(); ++f) {
    CVector e(tensor.dims()[f]);
    e[mi.indices[f]] = 1.0;
    factors.push_back(std::move(e));
  }
  return factors;
}

inline std::vector<CVector> random_start(const std::vector<std::size_t>& dims,
                                         std::uint64_t seed, std::size_t start,
                                         std::size_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start),
                    static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<CVector> factors;
  for (auto d : dims) {
    CVector v(d);
    for (auto& x : v) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      x = cplx(re, im);
    }
    factors.push_back(std::move(v));
  }
  return factors;
}

struct StartOutcome {
  StartReport report;
  std::vector<CVector> factors;
  double lambda = 0.0;  // normalized variant only
};

inline StartOutcome run_start(const StateVector& tensor,
                              std::vector<CVector> factors,
                              const GeometricConfig& cfg, bool normalized,
                              StartReport report) {
  if (normalized)
    normalize_each(factors);
  else
    rebalance(factors);

  auto score = [&](const std::vector<CVector>& fs) {
    return normalized ? product_overlap(tensor, fs).real()
                      : ProductState::from_factors(fs).norm_product;
  };
  double prev = score(factors);
  if (cfg.record_history) report.d2_history.push_back(product_distance_sq(tensor, factors));

  for (std::size_t sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    sweep_in_place(tensor, factors, normalized);
    const double cur = score(factors);
    report.sweeps = sweep;
    report.norm_product = normalized ? cur * cur : cur;
    if (cfg.record_history)
      report.d2_history.push_back(product_distance_sq(tensor, factors));
    if (std::abs(cur - prev) <= kRelativeChangeTol * std::abs(cur)) {
      report.residual = normalized ? normalized_residual(tensor, factors, cur)
                                   : unnormalized_residual(tensor, factors);
      if (report.residual < cfg.tol) {
        report.converged = true;
        break;
      }
    }
    prev = cur;
  }
  if (!report.converged)
    report.residual = normalized ? normalized_residual(tensor, factors, prev)
                                 : unnormalized_residual(tensor, factors);
  StartOutcome out{std::move(report), std::move(factors), 0.0};
  if (normalized) out.lambda = product_overlap(tensor, out.factors).real();
  return out;
}

inline bool better(const StartReport& a, const StartReport& b) {
  if (a.norm_product > b.norm_product + kTieTol) return true;
  if (b.norm_product > a.norm_product + kTieTol) return false;
  return a.residual < b.residual;
}

inline GeometricResult finish(const StateVector& psi, const SubsystemSplit& split,
                              std::vector<CVector> factors, GeometricVariant variant) {
  GeometricResult r;
  r.variant = variant;
  r.product_state = ProductState::from_factors(std::move(factors));
  const auto phi = assemble_product(r.product_state.factors, split);
  const double p = r.product_state.norm_product;
  r.overlap = inner_product(phi, psi);
  r.lambda = std::sqrt(p);
  r.cos_theta_c = r.lambda;
  r.sin2_theta_c = 1.0 - p;
  r.d2_unnormalized = distance_squared(phi, psi);
  CVector unit(phi.amps());
  for (auto& x : unit) x /= r.lambda;
  r.d2_normalized = distance_squared(StateVector(phi.dims(), std::move(unit)), psi);
  return r;
}

inline GeometricResult multistart(const StateVector& psi, const SubsystemSplit& split,
                                  const GeometricConfig& cfg, bool normalized) {
  require_normalized(psi);
  if (cfg.starts == 0) throw DomainError("at least one start is required");
  const StateVector tensor = to_factor_layout(psi, split);

  std::vector<StartOutcome> outcomes;
  for (std::size_t s = 0; s < cfg.starts; ++s) {
    StartReport rep;
    rep.index = s;
    rep.deterministic = (s == 0);
    std::optional<StartOutcome> done;
    for (std::size_t attempt = 0; attempt < 2 && !done; ++attempt) {
      rep.restarted = attempt > 0;
      auto init = (s == 0 && attempt == 0)
                      ? deterministic_start(tensor)
                      : random_start(tensor.dims(), cfg.seed, s, attempt);
      try {
        done = run_start(tensor, std::move(init), cfg, normalized, rep);
      } catch (const ZeroContraction&) {
        rep.d2_history.clear();
      }
    }
    if (!done) {
      rep.abandoned = true;
      outcomes.push_back({rep, {}, 0.0});
      continue;
    }
    outcomes.push_back(std::move(*done));
  }

  const StartOutcome* best = nullptr;
  const StartOutcome* best_partial = nullptr;
  std::vector<double> criticals;
  for (const auto& o : outcomes) {
    if (o.report.abandoned) continue;
    if (!best_partial || better(o.report, best_partial->report)) best_partial = &o;
    if (!o.report.converged) continue;
    criticals.push_back(o.report.norm_product);
    if (!best || better(o.report, best->report)) best = &o;
  }
  std::sort(criticals.rbegin(), criticals.rend());
  std::vector<double> distinct;
  for (double c : criticals)
    if (distinct.empty() || distinct.back() - c > kDistinctCriticalTol)
      distinct.push_back(c);

  const StartOutcome* chosen = best ? best : best_partial;
  if (!chosen)
    throw ConvergenceError("every start hit a vanishing contraction", GeometricResult{});

  std::vector<CVector> factors = chosen->factors;
  if (normalized) {
    // Unnormalized equivalent: scale the unit factors so prod N = Lambda^2.
    const double per = std::pow(std::max(chosen->lambda, 0.0),
                                1.0 / static_cast<double>(factors.size()));
    for (auto& f : factors)
      for (auto& x : f) x *= per;
  }
  auto r = finish(psi, split, std::move(factors),
                  normalized ? GeometricVariant::Normalized
                             : GeometricVariant::Unnormalized);
  if (normalized) {
    r.lambda = chosen->lambda;
    r.cos_theta_c = chosen->lambda;
  }
  r.residual = chosen->report.residual;
  r.sweeps = chosen->report.sweeps;
  r.converged = chosen->report.converged;
  r.critical_values = std::move(distinct);
  if (split.is_bipartite())
    r.degenerate_leading =
        leading_gap(hermitian_eig(reduced_density_matrix(psi, split, Side::A)).values) <
        kDegeneracyGap;
  for (auto& o : outcomes) {
    if (!o.report.abandoned) ++r.starts_used;
    r.starts.push_back(std::move(o.report));
  }
  if (!best)
    throw ConvergenceError("no start converged within " +
                               std::to_string(cfg.max_sweeps) + " sweeps",
                           std::move(r));
  return r;
}

}  // namespace detail

// Max-norm violation of the stationarity equations over all factors and
// components; zero at an exact critical point.
inline double fixed_point_residual(const StateVector& psi, const SubsystemSplit& split,
                                   const ProductState& ps) {
  detail::check_product_shape(ps.factors, split.factor_dims());
  return detail::unnormalized_residual(to_factor_layout(psi, split), ps.factors);
}

// One cyclic pass of exact per-factor updates followed by norm rebalancing.
// Throws ZeroContraction when an update annihilates a factor.
inline ProductState sweep_update(const StateVector& psi, const SubsystemSplit& split,
                                 const ProductState& ps) {
  detail::check_product_shape(ps.factors, split.factor_dims());
  for (const auto& f : ps.factors)
    if (norm_squared(f) == 0.0) throw DomainError("zero factor in product state");
  auto factors = ps.factors;
  detail::sweep_in_place(to_factor_layout(psi, split), factors, false);
  return ProductState::from_factors(std::move(factors));
}

// Multistart alternating optimization of the unnormalized problem; returns
// the converged run with the largest prod N (ties: smaller residual).
inline GeometricResult nearest_product_state(const StateVector& psi,
                                             const SubsystemSplit& split,
                                             const GeometricConfig& cfg = {}) {
  return detail::multistart(psi, split, cfg, false);
}

// Same iteration on unit-norm factors (the Lagrange-multiplier form); Lambda
// is read off as <phi_N|psi>. The reported product state is the unnormalized
// equivalent with prod N = Lambda^2.
inline GeometricResult normalized_variant(const StateVector& psi,
                                          const SubsystemSplit& split,
                                          const GeometricConfig& cfg = {}) {
  return detail::multistart(psi, split, cfg, true);
}

// Bipartite case: prod N is an eigenvalue of rho_A; the largest one gives the
// nearest product state, with a its eigenvector and b = <a|psi> contracted.
inline GeometricResult bipartite_closed_form(const StateVector& psi,
                                             const SubsystemSplit& split) {
  detail::require_bipartite(split);
  require_normalized(psi);
  const auto chi = detail::amplitude_matrix(psi, split);
  const auto eig = hermitian_eig(detail::marginal_of(chi, Side::A));

  const CVector& a = eig.vectors[0];
  CVector b(chi.cols);
  for (std::size_t q = 0; q < chi.cols; ++q)
    for (std::size_t i = 0; i < chi.rows; ++i) b[q] += std::conj(a[i]) * chi(i, q);
  std::vector<CVector> factors{a, b};
  detail::rebalance(factors);

  auto r = detail::finish(psi, split, std::move(factors), GeometricVariant::ClosedForm);
  r.residual = fixed_point_residual(psi, split, r.product_state);
  r.converged = true;
  r.degenerate_leading = leading_gap(eig.values) < kDegeneracyGap;
  r.critical_values = eig.values;
  return r;
}

}  // namespace entangle
