#pragma once

// JSON views of the analysis results, shared by the CLI report envelope.

#include <string>
#include <vector>

#include "entangle/geometric.hpp"
#include "entangle/io.hpp"
#include "entangle/partovi.hpp"
#include "entangle/schmidt.hpp"
#include "entangle/verify.hpp"

namespace entangle {

inline Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json cvector_to_json(const CVector& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(complex_to_json(z));
  return a;
}

inline Json basis_to_json(const std::vector<CVector>& basis) {
  Json a = Json::array();
  for (const auto& v : basis) a.push_back(cvector_to_json(v));
  return a;
}

inline Json to_json(const SchmidtResult& s) {
  Json j;
  j["coefficients"] = s.coefficients;
  j["rank"] = s.rank;
  j["entropy_bits"] = s.entropy_bits;
  j["entropy_nats"] = s.entropy_nats;
  j["participation"] = s.participation;
  j["left_basis"] = basis_to_json(s.left_basis);
  j["right_basis"] = basis_to_json(s.right_basis);
  return j;
}

inline Json to_json(const QubitSplitResult& q) {
  Json j;
  j["concurrence_sq"] = q.concurrence_sq;
  j["mu_plus"] = q.mu_plus;
  j["mu_minus"] = q.mu_minus;
  j["theta_max"] = q.theta_max;
  j["theta_max_amplitude"] = q.theta_max_amplitude;
  j["theta_max_convention"] =
      "theta_max: cos(theta_max) = mu_plus; theta_max_amplitude: cos = sqrt(mu_plus)";
  return j;
}

inline Json to_json(const GeometricResult& g) {
  Json j;
  j["variant"] = to_string(g.variant);
  j["lambda"] = g.lambda;
  j["norm_product"] = g.product_state.norm_product;
  j["cos_theta_c"] = g.cos_theta_c;
  j["sin2_theta_c"] = g.sin2_theta_c;
  j["d2_unnormalized"] = g.d2_unnormalized;
  j["d2_normalized"] = g.d2_normalized;
  j["overlap"] = complex_to_json(g.overlap);
  j["factor_norms"] = g.product_state.factor_norms;
  j["factors"] = basis_to_json(g.product_state.factors);
  j["critical_values"] = g.critical_values;
  return j;
}

inline Json diagnostics_json(const GeometricResult& g) {
  Json j;
  j["residual"] = g.residual;
  j["sweeps"] = g.sweeps;
  j["starts_used"] = g.starts_used;
  j["converged"] = g.converged;
  j["degenerate_leading"] = g.degenerate_leading;
  return j;
}

inline Json to_json(const PartoviChainResult& c) {
  Json j;
  j["ordering"] = ordering_label(c.ordering);
  j["chain_cos_theta"] = c.chain_cos_theta;
  j["chain_sin2_theta"] = c.chain_sin2_theta;
  j["reconstruction_fidelity"] = c.reconstruction_fidelity;
  j["assembly_rule"] = c.assembly_rule;
  Json joint = Json::array();
  for (const auto& [branch, p] : c.joint_coefficients)
    joint.push_back({{"branch", branch}, {"p", p}});
  j["joint_coefficients"] = std::move(joint);
  Json stages = Json::array();
  for (const auto& st : c.stages)
    stages.push_back({{"peeled", factor_label(st.peeled_factor)},
                      {"branch", st.branch},
                      {"coefficients", st.coefficients}});
  j["stages"] = std::move(stages);
  j["chain_factors"] = basis_to_json(c.chain_factors);
  return j;
}

inline Json to_json(const OrderingSearch& s) {
  Json j;
  j["best"] = to_json(s.best);
  Json table = Json::array();
  for (const auto& row : s.all)
    table.push_back({{"ordering", ordering_label(row.ordering)},
                     {"chain_sin2_theta", row.chain_sin2_theta},
                     {"reconstruction_fidelity", row.reconstruction_fidelity}});
  j["orderings"] = std::move(table);
  return j;
}

inline Json to_json(const VerifyReport& v) {
  Json j;
  j["all_passed"] = v.all_passed();
  Json checks = Json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"name", c.name},
                      {"violation", c.value},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace entangle
