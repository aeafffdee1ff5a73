#pragma once

// Command dispatch for the `entangle` executable, kept in a header so the
// test suite can drive it without spawning processes.
//
//   entangle <schmidt|geometric|partovi|summary|verify> [--split SPEC]
//            [--tol X] [--starts N] [--max-sweeps N] [--seed N] [--normalize]
//            [--normalized-variant] [--closed-form] [--json] <file|->
//
// Exit codes: 0 success, 1 violated invariant (verify), 2 usage or parse
// error, 3 convergence failure.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entangle/entangle.hpp"

namespace entangle::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kNoConvergence = 3 };

struct Options {
  std::string command;
  std::string split_spec;
  double tol = 1e-10;
  std::size_t starts = 16;
  std::size_t max_sweeps = 10000;
  std::uint64_t seed = 0;
  bool normalize = false;
  bool normalized_variant = false;
  bool closed_form = false;
  bool json = false;
  std::string input;
};

inline std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += fmt12(xs[i]);
  }
  return s + ")";
}

struct Outcome {
  ReportEnvelope envelope;
  std::string text;
  int code = kOk;
};

namespace detail {

inline GeometricConfig config_of(const Options& o) {
  GeometricConfig cfg;
  cfg.starts = o.starts;
  cfg.max_sweeps = o.max_sweeps;
  cfg.tol = o.tol;
  cfg.seed = o.seed;
  return cfg;
}

inline void line(std::string& text, const std::string& key, const std::string& value) {
  text += "  " + key;
  if (key.size() < 28) text.append(28 - key.size(), ' ');
  text += value + "\n";
}

inline void add_schmidt(const StateVector& psi, const SubsystemSplit& bi,
                        const std::string& tag, Json& results, std::string& text) {
  const auto s = schmidt_decompose(psi, bi);
  Json j = to_json(s);
  text += "schmidt [" + tag + "]\n";
  line(text, "coefficients", fmt_list(s.coefficients));
  line(text, "rank", std::to_string(s.rank));
  line(text, "entropy (bits)", fmt12(s.entropy_bits));
  line(text, "entropy (nats)", fmt12(s.entropy_nats));
  line(text, "participation K", fmt12(s.participation));
  for (std::size_t side = 0; side < 2; ++side) {
    if (bi.factor_dims()[side] != 2) continue;
    const SubsystemSplit q =
        side == 0 ? bi : SubsystemSplit(bi.subsystem_dims(), {bi.groups()[1], bi.groups()[0]});
    const auto cf = qubit_split_closed_form(psi, q);
    j["qubit_closed_form"] = to_json(cf);
    j["qubit_closed_form"]["qubit_factor"] = factor_label(side);
    line(text, "concurrence C", fmt12(cf.concurrence_sq));
    line(text, "mu+ / mu-", fmt12(cf.mu_plus) + " / " + fmt12(cf.mu_minus));
    line(text, "theta_max (cos = mu+)", fmt12(cf.theta_max));
    line(text, "theta_max (cos = sqrt mu+)", fmt12(cf.theta_max_amplitude));
    break;
  }
  results[tag] = std::move(j);
}

inline void schmidt_section(const StateVector& psi, const SubsystemSplit& split,
                            Json& results, std::string& text) {
  Json block = Json::object();
  if (split.is_bipartite()) {
    add_schmidt(psi, split, split.to_string(), block, text);
  } else {
    for (std::size_t f = 0; f < split.factor_count(); ++f) {
      const auto bi = entangle::detail::one_vs_rest(split, f);
      add_schmidt(psi, bi, bi.to_string(), block, text);
    }
  }
  results["schmidt"] = std::move(block);
}

inline GeometricResult geometric_section(const StateVector& psi, const SubsystemSplit& split,
                                         const Options& o, Json& results, Json& diagnostics,
                                         std::string& text) {
  GeometricResult g;
  if (o.closed_form)
    g = bipartite_closed_form(psi, split);
  else if (o.normalized_variant)
    g = normalized_variant(psi, split, config_of(o));
  else
    g = nearest_product_state(psi, split, config_of(o));
  results["geometric"] = to_json(g);
  diagnostics["geometric"] = diagnostics_json(g);
  if (g.degenerate_leading)
    diagnostics["warnings"].push_back("degenerate leading eigenvalue; nearest product state not unique");
  text += "geometric [" + std::string(to_string(g.variant)) + ", split " + split.to_string() + "]\n";
  line(text, "Lambda", fmt12(g.lambda));
  line(text, "N_A N_B ...", fmt12(g.product_state.norm_product));
  line(text, "cos theta_C", fmt12(g.cos_theta_c));
  line(text, "sin^2 theta_C", fmt12(g.sin2_theta_c));
  line(text, "D^2", fmt12(g.d2_unnormalized));
  line(text, "D_N^2", fmt12(g.d2_normalized));
  line(text, "critical values", fmt_list(g.critical_values));
  line(text, "residual", fmt12(g.residual));
  line(text, "sweeps / starts", std::to_string(g.sweeps) + " / " + std::to_string(g.starts_used));
  return g;
}

inline void partovi_section(const StateVector& psi, const SubsystemSplit& split,
                            Json& results, std::string& text) {
  const auto search = minimize_over_orderings(psi, split);
  results["partovi"] = to_json(search);
  text += "partovi chain [split " + split.to_string() + "]\n";
  for (const auto& row : search.all)
    line(text, "ordering " + ordering_label(row.ordering),
         "sin^2 = " + fmt12(row.chain_sin2_theta) +
             "  fidelity = " + fmt12(row.reconstruction_fidelity));
  line(text, "best ordering", ordering_label(search.best.ordering));
  line(text, "best sin^2 theta", fmt12(search.best.chain_sin2_theta));
}

inline Outcome dispatch(const Options& o) {
  Outcome out;
  auto file = parse_state_file(o.input, o.normalize);
  const auto& psi = file.state;
  const auto split = parse_split_spec(o.split_spec, psi.dims());

  auto& env = out.envelope;
  env.tool_version = ENTANGLE_VERSION;
  env.input_label = file.label.empty() ? o.input : file.label;
  env.command = o.command;
  env.parameters = {{"split", split.to_string()},
                    {"tol", o.tol},
                    {"starts", o.starts},
                    {"max_sweeps", o.max_sweeps},
                    {"seed", o.seed},
                    {"normalize", o.normalize},
                    {"normalized_variant", o.normalized_variant},
                    {"closed_form", o.closed_form},
                    {"ordering_policy", "exhaustive"}};
  env.diagnostics["warnings"] = Json::array();
  auto& text = out.text;
  text += "input: " + env.input_label + "  dims " + dims_to_string(psi.dims()) + "\n";

  try {
    if (o.command == "schmidt") {
      if (!split.is_bipartite())
        throw SplitError("schmidt needs a bipartite split (e.g. --split 0|1)");
      schmidt_section(psi, split, env.results, text);
    } else if (o.command == "geometric") {
      geometric_section(psi, split, o, env.results, env.diagnostics, text);
    } else if (o.command == "partovi") {
      partovi_section(psi, split, env.results, text);
    } else if (o.command == "summary") {
      schmidt_section(psi, split, env.results, text);
      geometric_section(psi, split, o, env.results, env.diagnostics, text);
      if (split.factor_count() <= kMaxExhaustiveFactors)
        partovi_section(psi, split, env.results, text);
      else
        env.diagnostics["warnings"].push_back("partovi skipped: too many factors");
    } else if (o.command == "verify") {
      const auto rep = verify_state(psi, split, config_of(o));
      env.results["verify"] = to_json(rep);
      env.diagnostics["geometric"] = diagnostics_json(rep.geometric);
      text += "verify [split " + split.to_string() + "]\n";
      for (const auto& c : rep.checks)
        line(text, c.name, std::string(c.passed ? "ok  " : "FAIL") + "  " + fmt12(c.value) +
                               " <= " + fmt12(c.tolerance));
      text += rep.all_passed() ? "all identities hold\n" : "identity violated\n";
      if (!rep.all_passed()) out.code = kViolation;
    }
  } catch (const ConvergenceError& e) {
    env.results["geometric"] = to_json(e.best_partial());
    env.diagnostics["geometric"] = diagnostics_json(e.best_partial());
    env.diagnostics["error"] = e.what();
    text += std::string("convergence failure: ") + e.what() + "\n";
    out.code = kNoConvergence;
  }
  return out;
}

}  // namespace detail

// Runs one invocation; the report goes to `out`, diagnostics to `err`.
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Entanglement measures of pure states", "entangle"};
  app.require_subcommand(1, 1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"schmidt", "Schmidt decomposition across a bipartition"},
      {"geometric", "nearest (unnormalized) product state"},
      {"partovi", "sequential Schmidt chain over all peel orders"},
      {"summary", "all of the above"},
      {"verify", "check every cross-module identity; exit 1 on violation"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--split", o.split_spec, "factor groups, e.g. 0,1|2");
    sub->add_option("--tol", o.tol, "fixed-point residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--starts", o.starts, "multistart count")->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", o.max_sweeps, "sweep limit per start")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_flag("--normalize", o.normalize, "rescale the input to unit norm");
    sub->add_flag("--normalized-variant", o.normalized_variant,
                  "iterate on unit-norm factors");
    sub->add_flag("--closed-form", o.closed_form, "bipartite eigenvector route");
    sub->add_flag("--json", o.json, "emit the JSON report envelope");
    sub->add_option("input", o.input, "state file, or - for standard input")->required();
    sub->final_callback([&o, name = name] { o.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  if (o.closed_form && o.normalized_variant) {
    err << "usage error: --closed-form and --normalized-variant are exclusive\n";
    return kUsage;
  }

  try {
    auto result = detail::dispatch(o);
    if (o.json)
      out << to_json(result.envelope).dump(2) << "\n";
    else
      out << result.text;
    if (result.code == kNoConvergence) err << result.envelope.diagnostics["error"] << "\n";
    return result.code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const SplitError& e) {
    err << "split error: " << e.what() << "\n";
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace entangle::cli
