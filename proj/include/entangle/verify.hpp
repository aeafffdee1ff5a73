#pragma once

// Cross-module identity suite run on a single state: every identity that ties
// the Schmidt spectrum, the nearest product state and the sequential chain
// together, each at the tolerance its owning module guarantees.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "entangle/geometric.hpp"
#include "entangle/partovi.hpp"
#include "entangle/schmidt.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

struct Check {
  std::string name;
  double value = 0.0;      // measured violation (or the quantity for bounds)
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<Check> checks;
  GeometricResult geometric;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.passed; });
  }
};

namespace detail {

inline Check within(std::string name, double violation, double tol) {
  return {std::move(name), violation, tol, violation <= tol};
}

// Largest |a_k - b_k| over the two descending spectra, the shorter one padded
// with zeros.
inline double spectrum_mismatch(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

inline SubsystemSplit one_vs_rest(const SubsystemSplit& split, std::size_t f) {
  std::vector<std::size_t> rest;
  for (std::size_t g = 0; g < split.factor_count(); ++g)
    if (g != f)
      for (auto s : split.groups()[g]) rest.push_back(s);
  return {split.subsystem_dims(), {split.groups()[f], rest}};
}

inline void bipartite_checks(const StateVector& psi, const SubsystemSplit& bi,
                             const std::string& tag, std::vector<Check>& out) {
  const auto ea = hermitian_eig(reduced_density_matrix(psi, bi, Side::A));
  const auto eb = hermitian_eig(reduced_density_matrix(psi, bi, Side::B));
  out.push_back(within("spectrum_equality[" + tag + "]",
                       spectrum_mismatch(ea.values, eb.values), 1e-10));

  const auto s = schmidt_decompose(psi, bi);
  const double fid = std::norm(inner_product(psi, schmidt_rebuild(s, bi)));
  out.push_back(within("schmidt_reconstruction[" + tag + "]", 1.0 - fid, 1e-9));

  for (std::size_t side = 0; side < 2; ++side) {
    if (bi.factor_dims()[side] != 2) continue;
    const SubsystemSplit q = side == 0 ? bi
                                       : SubsystemSplit(bi.subsystem_dims(),
                                                        {bi.groups()[1], bi.groups()[0]});
    const auto cf = qubit_split_closed_form(psi, q);
    const double mu_err = std::max(std::abs(cf.mu_plus - ea.values[0]),
                                   std::abs(cf.mu_minus - (ea.values.size() > 1
                                                               ? ea.values[1]
                                                               : 0.0)));
    // rho_A may be the larger marginal; its top two eigenvalues are still
    // the nonzero spectrum.
    out.push_back(within("qubit_mu_vs_spectrum[" + tag + "]", mu_err, 1e-10));
    out.push_back(within("qubit_mu_sum[" + tag + "]",
                         std::abs(cf.mu_plus + cf.mu_minus - 1.0), 1e-12));
    break;
  }
}

}  // namespace detail

inline VerifyReport verify_state(const StateVector& psi, const SubsystemSplit& split,
                                 const GeometricConfig& cfg = {}) {
  require_normalized(psi);
  split.check_state(psi);
  VerifyReport rep;
  auto& out = rep.checks;

  if (split.is_bipartite()) {
    detail::bipartite_checks(psi, split, split.to_string(), out);
  } else {
    for (std::size_t f = 0; f < split.factor_count(); ++f) {
      const auto bi = detail::one_vs_rest(split, f);
      detail::bipartite_checks(psi, bi, bi.to_string(), out);
    }
  }

  const auto g = nearest_product_state(psi, split, cfg);
  const double p = g.product_state.norm_product;
  out.push_back(detail::within("overlap_equals_norm_product",
                               std::abs(g.overlap - cplx(p, 0.0)), 1e-9));
  out.push_back(detail::within("d2_equals_one_minus_lambda_sq",
                               std::abs(g.d2_unnormalized - (1.0 - p)), 1e-9));
  out.push_back(detail::within("dn2_equals_two_one_minus_lambda",
                               std::abs(g.d2_normalized - 2.0 * (1.0 - g.lambda)), 1e-9));
  out.push_back(detail::within("norm_product_bound", std::max(0.0, p - 1.0), 1e-10));
  out.push_back(detail::within("fixed_point_residual", g.residual, cfg.tol));

  const auto gn = normalized_variant(psi, split, cfg);
  out.push_back(detail::within("normalized_lambda_agreement",
                               std::abs(gn.lambda - g.lambda), 1e-8));
  out.push_back(detail::within(
      "dn2_minus_d2_identity",
      std::abs((g.d2_normalized - g.d2_unnormalized) -
               (1.0 - g.lambda) * (1.0 - g.lambda)),
      1e-9));

  if (split.is_bipartite()) {
    const auto cf = bipartite_closed_form(psi, split);
    out.push_back(detail::within("lambda_sq_vs_marginal_max",
                                 std::abs(p - cf.critical_values[0]), 1e-8));
  }

  if (split.factor_count() <= kMaxExhaustiveFactors) {
    const auto search = minimize_over_orderings(psi, split);
    double worst = 0.0;
    for (const auto& row : search.all)
      worst = std::max(worst, 1.0 - row.reconstruction_fidelity);
    out.push_back(detail::within("chain_reconstruction_all_orderings", worst, 1e-8));
    if (split.is_bipartite()) {
      double gap = 0.0;
      for (const auto& row : search.all)
        gap = std::max(gap, std::abs(row.chain_sin2_theta - g.sin2_theta_c));
      out.push_back(detail::within("chain_matches_geometric_bipartite", gap, 1e-9));
    }
  }
  rep.geometric = g;
  return rep;
}

}  // namespace entangle
