#pragma once

// Sequential Schmidt chain: peel one factor off the state, Schmidt-decompose
// it against the rest, and recurse on every surviving remainder branch until
// two factors are left. The result depends on the peel order, so the order
// can be minimized over exhaustively for small factor counts.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "entangle/errors.hpp"
#include "entangle/schmidt.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

inline constexpr double kBranchCutoff = 1e-12;
inline constexpr std::size_t kMaxExhaustiveFactors = 8;

inline std::string factor_label(std::size_t f) {
  if (f < 26) return std::string(1, static_cast<char>('A' + f));
  return "F" + std::to_string(f);
}

inline std::string ordering_label(const std::vector<std::size_t>& ordering) {
  std::string s;
  for (auto f : ordering) s += factor_label(f);
  return s;
}

struct ChainStage {
  std::size_t peeled_factor = 0;             // label within the original split
  std::vector<std::size_t> branch;           // (i_a, i_b, ...) leading here
  std::vector<std::size_t> remaining_factors;  // labels of the remainder, in order
  std::vector<double> coefficients;
  std::vector<CVector> peeled_basis;
  std::vector<StateVector> remainder_states;  // one per kept branch index
};

using BranchIndex = std::vector<std::size_t>;

struct PartoviChainResult {
  std::vector<std::size_t> ordering;
  std::vector<ChainStage> stages;  // depth-first, root first
  std::map<BranchIndex, double> joint_coefficients;
  std::vector<CVector> chain_factors;  // phi^A, phi^B, ... in split factor order
  double chain_cos_theta = 0.0;
  double chain_sin2_theta = 0.0;
  double reconstruction_fidelity = 0.0;
  std::string assembly_rule = "largest-coefficient branch at every stage";
};

struct OrderingScore {
  std::vector<std::size_t> ordering;
  double chain_sin2_theta = 0.0;
  double reconstruction_fidelity = 0.0;
};

struct OrderingSearch {
  PartoviChainResult best;
  std::vector<OrderingScore> all;
};

// Schmidt decomposition of `state` across (peel | all other factors, in
// declared order). Remainder states live on the other factors, one subsystem
// per factor, and are kept only for coefficients >= kBranchCutoff.
inline ChainStage peel_stage(const StateVector& state, const SubsystemSplit& split,
                             std::size_t peel) {
  if (peel >= split.factor_count())
    throw LabelError("factor " + std::to_string(peel) + " is not in a " +
                     std::to_string(split.factor_count()) + "-factor split");
  split.check_state(state);
  require_normalized(state);

  std::vector<std::size_t> rest_group;
  std::vector<std::size_t> rest_dims;
  ChainStage stage;
  stage.peeled_factor = peel;
  for (std::size_t f = 0; f < split.factor_count(); ++f) {
    if (f == peel) continue;
    stage.remaining_factors.push_back(f);
    rest_dims.push_back(split.factor_dims()[f]);
    for (auto s : split.groups()[f]) rest_group.push_back(s);
  }
  const SubsystemSplit bi(split.subsystem_dims(), {split.groups()[peel], rest_group});
  auto s = schmidt_decompose(state, bi);

  stage.coefficients = std::move(s.coefficients);
  stage.peeled_basis = std::move(s.left_basis);
  for (std::size_t k = 0; k < stage.coefficients.size(); ++k) {
    if (stage.coefficients[k] < kBranchCutoff) break;
    stage.remainder_states.emplace_back(rest_dims, s.right_basis[k]);
  }
  return stage;
}

namespace detail {

struct ChainBuilder {
  const std::vector<std::size_t>& ordering;
  std::size_t factor_count;
  PartoviChainResult& out;
  CVector rebuilt;  // factor layout of the original split

  void descend(const StateVector& state, const std::vector<std::size_t>& labels,
               std::size_t depth, BranchIndex path, double weight,
               std::vector<CVector>& vecs) {
    const std::size_t peel_label = ordering[depth];
    const auto pos = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), peel_label) - labels.begin());
    auto stage = peel_stage(state, SubsystemSplit::each_subsystem(state.dims()), pos);
    // Relabel from positions within this node to labels of the original split.
    stage.peeled_factor = peel_label;
    std::vector<std::size_t> rest_labels;
    for (auto p : stage.remaining_factors) rest_labels.push_back(labels[p]);
    stage.remaining_factors = rest_labels;
    stage.branch = path;

    const std::size_t stage_index = out.stages.size();
    out.stages.push_back(stage);

    for (std::size_t k = 0; k < stage.remainder_states.size(); ++k) {
      const ChainStage& st = out.stages[stage_index];
      vecs[peel_label] = st.peeled_basis[k];
      BranchIndex child = path;
      child.push_back(k);
      const double w = weight * st.coefficients[k];
      if (rest_labels.size() == 1) {
        vecs[rest_labels[0]] = st.remainder_states[k].amps();
        out.joint_coefficients[child] = w;
        const CVector term = outer_product(vecs);
        const double amp = std::sqrt(w);
        for (std::size_t i = 0; i < term.size(); ++i) rebuilt[i] += amp * term[i];
      } else {
        const StateVector next = st.remainder_states[k];
        descend(next, rest_labels, depth + 1, std::move(child), w, vecs);
      }
    }
  }
};

inline void check_ordering(const std::vector<std::size_t>& ordering, std::size_t m) {
  if (ordering.size() != m)
    throw LabelError("ordering has " + std::to_string(ordering.size()) +
                     " entries, split has " + std::to_string(m) + " factors");
  std::vector<std::size_t> sorted(ordering);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < m; ++i)
    if (sorted[i] != i) throw LabelError("ordering is not a permutation of the factors");
}

}  // namespace detail

inline PartoviChainResult build_chain(const StateVector& psi, const SubsystemSplit& split,
                                      const std::vector<std::size_t>& ordering) {
  const std::size_t m = split.factor_count();
  if (m < 2) throw SplitError("a chain needs at least two factors");
  detail::check_ordering(ordering, m);
  require_normalized(psi);
  const StateVector tensor = to_factor_layout(psi, split);

  PartoviChainResult out;
  out.ordering = ordering;
  detail::ChainBuilder builder{ordering, m, out, CVector(tensor.size())};
  std::vector<std::size_t> labels(m);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  std::vector<CVector> vecs(m);
  builder.descend(tensor, labels, 0, {}, 1.0, vecs);

  const cplx fid = dot(tensor.amps(), builder.rebuilt);
  out.reconstruction_fidelity = std::norm(fid);

  // phi from the top branch of every stage along the all-zero path.
  out.chain_factors.assign(m, {});
  BranchIndex path;
  for (const auto& st : out.stages) {
    if (st.branch != path) continue;
    out.chain_factors[st.peeled_factor] = st.peeled_basis[0];
    if (st.remaining_factors.size() == 1)
      out.chain_factors[st.remaining_factors[0]] = st.remainder_states[0].amps();
    path.push_back(0);
  }
  const CVector phi = outer_product(out.chain_factors);
  const double phi_norm = std::sqrt(norm_squared(phi));
  const double cos = std::abs(dot(tensor.amps(), phi)) / phi_norm;
  out.chain_cos_theta = std::min(1.0, cos);
  out.chain_sin2_theta = std::max(0.0, 1.0 - out.chain_cos_theta * out.chain_cos_theta);
  return out;
}

// Evaluates every peel order (lexicographic over factor labels) and keeps the
// smallest chain_sin2_theta; an ordering must win by more than 1e-12 to
// displace an earlier one.
inline OrderingSearch minimize_over_orderings(const StateVector& psi,
                                              const SubsystemSplit& split) {
  const std::size_t m = split.factor_count();
  if (m > kMaxExhaustiveFactors)
    throw SizeError(std::to_string(m) + " factors exceed the exhaustive bound of " +
                    std::to_string(kMaxExhaustiveFactors) +
                    "; pass explicit orderings to build_chain instead");
  std::vector<std::size_t> ordering(m);
  std::iota(ordering.begin(), ordering.end(), std::size_t{0});

  OrderingSearch search;
  bool have = false;
  do {
    auto chain = build_chain(psi, split, ordering);
    search.all.push_back({ordering, chain.chain_sin2_theta, chain.reconstruction_fidelity});
    if (!have || chain.chain_sin2_theta < search.best.chain_sin2_theta - 1e-12) {
      search.best = std::move(chain);
      have = true;
    }
  } while (std::next_permutation(ordering.begin(), ordering.end()));
  return search;
}

}  // namespace entangle
