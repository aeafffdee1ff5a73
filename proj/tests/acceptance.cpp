// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "entangle/entangle.hpp"
#include "oracles.hpp"

using namespace entangle;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) detail = what;
    passed = passed && ok;
  }
};

std::vector<fs::path> corpus() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(ENTANGLE_DATA_DIR) / "states"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Random subsystem dims with total dimension <= 64, grouped into 2-4 factors.
SubsystemSplit random_split(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(2, 4);
  std::vector<std::size_t> dims;
  std::size_t total = 1;
  const std::size_t want = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
  while (dims.size() < want) {
    const std::size_t d = dim(rng);
    if (total * d > 64) break;
    dims.push_back(d);
    total *= d;
  }
  if (dims.size() < 2) dims = {2, 2};
  const std::size_t k = dims.size();
  const std::size_t m = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, k))(rng);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> groups(m);
  for (std::size_t i = 0; i < k; ++i)
    groups[i < m ? i : std::uniform_int_distribution<std::size_t>(0, m - 1)(rng)].push_back(perm[i]);
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return {dims, groups};
}

StateVector random_state_for(const SubsystemSplit& split, std::mt19937_64& rng) {
  return oracle::random_state(split.subsystem_dims(), rng);
}

Verdict identity_suite() {
  Verdict v;
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 200; ++trial) {
    const auto split = random_split(rng);
    const auto psi = random_state_for(split, rng);
    const auto g = nearest_product_state(psi, split);
    const double p = g.product_state.norm_product;
    const std::string tag = "state " + std::to_string(trial) + " split " + split.to_string();
    v.require(g.converged, tag + ": not converged");
    v.require(std::abs(g.overlap - cplx(p, 0.0)) <= 1e-9, tag + ": overlap != prod N");
    v.require(std::abs(g.d2_unnormalized - (1.0 - p)) <= 1e-9, tag + ": D^2 identity");
    v.require(std::abs(g.d2_normalized - 2.0 * (1.0 - std::sqrt(p))) <= 1e-9,
              tag + ": D_N^2 identity");
    v.require(p <= 1.0 + 1e-10, tag + ": prod N > 1");
  }
  return v;
}

Verdict schmidt_correspondence() {
  Verdict v;
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t u = dim(rng), w = dim(rng);
    const auto psi = oracle::random_state({u, w}, rng);
    const auto split = SubsystemSplit::of_factor_dims({u, w});
    GeometricConfig cfg;
    cfg.starts = 16;
    const auto g = nearest_product_state(psi, split, cfg);
    const auto ref = oracle::hermitian_spectrum(oracle::partial_trace_keep_first(psi.amps(), u, w));
    const std::string tag = "state " + std::to_string(trial);
    v.require(std::abs(g.product_state.norm_product - ref[0]) <= 1e-8, tag + ": prod N vs lambda_max");
    const auto ea = hermitian_eig(reduced_density_matrix(psi, split, Side::A)).values;
    const auto eb = hermitian_eig(reduced_density_matrix(psi, split, Side::B)).values;
    for (std::size_t k = 0; k < std::max(u, w); ++k) {
      const double a = k < ea.size() ? ea[k] : 0.0, b = k < eb.size() ? eb[k] : 0.0;
      v.require(std::abs(a - b) <= 1e-10, tag + ": rho_A / rho_B spectra differ");
    }
  }
  return v;
}

Verdict qubit_closed_form() {
  Verdict v;
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<std::size_t> dim(2, 16);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t u = dim(rng);
    const auto psi = oracle::random_state({2, u}, rng);
    const auto q = qubit_split_closed_form(psi, SubsystemSplit::of_factor_dims({2, u}));
    const auto ref = oracle::hermitian_spectrum(oracle::partial_trace_keep_first(psi.amps(), 2, u));
    const std::string tag = "state " + std::to_string(trial);
    v.require(std::abs(q.mu_plus - ref[0]) <= 1e-10 && std::abs(q.mu_minus - ref[1]) <= 1e-10,
              tag + ": mu vs spectrum");
    v.require(std::abs(q.mu_plus + q.mu_minus - 1.0) <= 1e-12, tag + ": mu sum");
  }
  return v;
}

Verdict canonical_values() {
  Verdict v;
  const double r = 1.0 / std::sqrt(2.0), t = 1.0 / std::sqrt(3.0);
  struct Case {
    std::string name;
    StateVector psi;
    double sin2;
  };
  const std::vector<Case> cases{
      {"Bell", StateVector({2, 2}, {r, 0, 0, r}), 0.5},
      {"GHZ", StateVector({2, 2, 2}, {r, 0, 0, 0, 0, 0, 0, r}), 0.5},
      {"W", StateVector({2, 2, 2}, {0, t, t, 0, t, 0, 0, 0}), 5.0 / 9.0},
  };
  for (const auto& c : cases) {
    const std::size_t n = c.psi.dims().size();
    const auto grid = oracle::grid_search_max_overlap(c.psi.amps(), n, 21, 24);
    v.require(std::abs((1.0 - grid.coarse) - c.sin2) <= 1e-3, c.name + ": coarse grid off");
    v.require(std::abs((1.0 - grid.refined) - c.sin2) <= 1e-9, c.name + ": refined grid off");
    const auto g = nearest_product_state(c.psi, SubsystemSplit::each_subsystem(c.psi.dims()));
    v.require(std::abs(g.sin2_theta_c - (1.0 - grid.refined)) <= 1e-6,
              c.name + ": solver vs grid, " + fmt(g.sin2_theta_c) + " vs " + fmt(1.0 - grid.refined));
  }
  return v;
}

Verdict schmidt_reconstruction() {
  Verdict v;
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t u = dim(rng), w = dim(rng);
    const auto psi = oracle::random_state({u, w}, rng);
    const auto split = SubsystemSplit::of_factor_dims({u, w});
    const auto s = schmidt_decompose(psi, split);
    const auto back = schmidt_rebuild(s, split);
    const std::string tag = "state " + std::to_string(trial);
    v.require(std::norm(inner_product(psi, back)) >= 1.0 - 1e-9, tag + ": fidelity");
    double h = 0.0, q = 0.0;
    for (double p : s.coefficients) {
      if (p > 0.0) h -= p * std::log2(p);
      q += p * p;
    }
    v.require(std::abs(s.entropy_bits - h) <= 1e-10, tag + ": entropy");
    v.require(std::abs(s.participation - 1.0 / q) <= 1e-10, tag + ": participation");
  }
  return v;
}

Verdict partovi_chain() {
  Verdict v;
  bool order_dependent = false;
  for (const auto& path : corpus()) {
    const auto psi = parse_state_file(path.string()).state;
    const bool qubits = std::all_of(psi.dims().begin(), psi.dims().end(),
                                    [](std::size_t d) { return d == 2; });
    if (!qubits || psi.dims().size() > 5) continue;
    const auto split = SubsystemSplit::each_subsystem(psi.dims());
    const auto search = minimize_over_orderings(psi, split);
    const std::string tag = path.stem().string();
    std::size_t count = 1;
    for (std::size_t k = 2; k <= split.factor_count(); ++k) count *= k;
    v.require(search.all.size() == count, tag + ": not every ordering evaluated");
    double lo = 1.0, hi = 0.0;
    for (const auto& row : search.all) {
      v.require(row.reconstruction_fidelity >= 1.0 - 1e-8,
                tag + " " + ordering_label(row.ordering) + ": fidelity");
      v.require(std::abs(row.chain_sin2_theta -
                         oracle::chain_sin2(psi.amps(), psi.dims(), row.ordering)) <= 1e-10,
                tag + " " + ordering_label(row.ordering) + ": chain vs oracle");
      lo = std::min(lo, row.chain_sin2_theta);
      hi = std::max(hi, row.chain_sin2_theta);
    }
    v.require(std::abs(search.best.chain_sin2_theta - lo) <= 1e-12, tag + ": minimum not reported");
    if (hi - lo > 1e-3) order_dependent = true;
  }
  v.require(order_dependent, "no corpus state shows ordering dependence");
  return v;
}

Verdict als_monotonicity() {
  Verdict v;
  std::mt19937_64 rng(1007);
  std::size_t starts = 0, converged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto split = random_split(rng);
    const auto psi = random_state_for(split, rng);
    GeometricConfig cfg;
    cfg.record_history = true;
    cfg.seed = static_cast<std::uint64_t>(trial);
    GeometricResult g;
    try {
      g = nearest_product_state(psi, split, cfg);
    } catch (const ConvergenceError& e) {
      g = e.best_partial();
    }
    for (const auto& s : g.starts) {
      if (s.abandoned) continue;
      ++starts;
      if (s.converged) ++converged;
      for (std::size_t i = 1; i < s.d2_history.size(); ++i)
        v.require(s.d2_history[i] <= s.d2_history[i - 1] + 1e-12,
                  "instance " + std::to_string(trial) + " start " + std::to_string(s.index) +
                      ": D^2 increased at sweep " + std::to_string(i));
    }
  }
  const double rate = starts ? static_cast<double>(converged) / static_cast<double>(starts) : 0.0;
  v.require(rate >= 0.95, "only " + fmt(100 * rate) + "% of starts converged");
  if (v.passed) v.detail = fmt(100 * rate) + "% of " + std::to_string(starts) + " starts converged";
  return v;
}

Verdict cli_round_trip() {
  Verdict v;
  for (const auto& path : corpus()) {
    std::ostringstream out, err;
    const int code = cli::run_command({"verify", path.string()}, out, err);
    v.require(code == 0, path.stem().string() + ": verify exit " + std::to_string(code));
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      std::ostringstream o, e;
      cli::run_command({"summary", "--json", "--seed", "42", path.string()}, o, e);
      if (rep == 0)
        first = o.str();
      else
        v.require(o.str() == first && !first.empty(), path.stem().string() + ": JSON differs");
    }
  }
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<Verdict()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {1, "identity suite, 200 random multipartite states", identity_suite, 60.0},
      {2, "Schmidt correspondence, 100 bipartite states", schmidt_correspondence, 30.0},
      {3, "qubit closed form, 100 (2, u) states", qubit_closed_form, 0.0},
      {4, "canonical values vs grid oracle", canonical_values, 0.0},
      {5, "Schmidt reconstruction, 100 bipartite states", schmidt_reconstruction, 0.0},
      {6, "chain over all orderings on the corpus", partovi_chain, 0.0},
      {7, "sweep monotonicity, 50 instances", als_monotonicity, 0.0},
      {8, "CLI verify and deterministic JSON", cli_round_trip, 0.0},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.passed = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      v.passed = false;
      v.detail = "took " + fmt(secs) + " s, budget " + fmt(c.budget_s) + " s";
    }
    all = all && v.passed;
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", v.passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, v.detail.empty() ? "" : " - ", v.detail.c_str());
  }
  return all ? 0 : 1;
}
