#pragma once

// State files and the machine-readable report envelope.
//
// State file (UTF-8 JSON):
//   {"dims": [2, 2], "amplitudes": [[re, im], ...], "label": "optional"}
// Amplitudes are row-major over dims.

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "entangle/errors.hpp"
#include "entangle/tensor_state.hpp"

namespace entangle {

using Json = nlohmann::ordered_json;

struct StateFile {
  StateVector state;
  std::string label;
};

inline StateFile parse_state_document(std::string_view text, bool normalize = false,
                                      const std::string& source = "<input>") {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");

  if (!doc.contains("dims")) throw ParseError(source + ": missing required key \"dims\"");
  const auto& jd = doc["dims"];
  if (!jd.is_array() || jd.empty())
    throw ParseError(source + ": \"dims\" must be a non-empty array");
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    if (!jd[i].is_number_integer() || jd[i].get<long long>() < 2)
      throw ParseError(source + ": dims[" + std::to_string(i) +
                       "] must be an integer >= 2");
    dims.push_back(jd[i].get<std::size_t>());
  }

  if (!doc.contains("amplitudes"))
    throw ParseError(source + ": missing required key \"amplitudes\"");
  const auto& ja = doc["amplitudes"];
  if (!ja.is_array()) throw ParseError(source + ": \"amplitudes\" must be an array");
  const std::size_t expected = dims_product(dims);
  if (ja.size() != expected)
    throw ParseError(source + ": dims " + dims_to_string(dims) + " need " +
                     std::to_string(expected) + " amplitudes, found " +
                     std::to_string(ja.size()));
  CVector amps;
  amps.reserve(expected);
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const auto& pair = ja[i];
    const std::string where = source + ": amplitudes[" + std::to_string(i) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number())
      throw ParseError(where + " must be a [re, im] pair of numbers");
    const double re = pair[0].get<double>(), im = pair[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ParseError(where + " is not finite");
    amps.emplace_back(re, im);
  }

  StateFile out;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw ParseError(source + ": \"label\" must be a string");
    out.label = doc["label"].get<std::string>();
  }
  StateVector psi(std::move(dims), std::move(amps));
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw ParseError(source + ": zero state");
  if (normalize) {
    psi = psi.normalized();
  } else if (!psi.is_normalized()) {
    throw ParseError(source + ": state norm^2 = " + std::to_string(n2) +
                     " is not within 1e-8 of 1 (use --normalize to rescale)");
  }
  out.state = std::move(psi);
  return out;
}

// `path` == "-" reads standard input.
inline StateFile parse_state_file(const std::string& path, bool normalize = false) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
    return parse_state_document(text, normalize, "<stdin>");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  text.assign(std::istreambuf_iterator<char>(in), {});
  return parse_state_document(text, normalize, path);
}

// "0,1|2": subsystems grouped by index, '|' between factors. An empty spec
// makes every declared subsystem its own factor.
inline SubsystemSplit parse_split_spec(const std::string& spec,
                                       const std::vector<std::size_t>& dims) {
  if (spec.empty()) return SubsystemSplit::each_subsystem(dims);
  std::vector<std::vector<std::size_t>> groups;
  std::stringstream factors(spec);
  std::string factor;
  while (std::getline(factors, factor, '|')) {
    std::vector<std::size_t> group;
    std::stringstream items(factor);
    std::string item;
    while (std::getline(items, item, ',')) {
      if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
        throw SplitError("bad subsystem index '" + item + "' in split '" + spec + "'");
      group.push_back(std::stoul(item));
    }
    groups.push_back(std::move(group));
  }
  if (!spec.empty() && spec.back() == '|') groups.emplace_back();
  return {dims, std::move(groups)};
}

inline Json state_to_json(const StateVector& psi, const std::string& label = {}) {
  Json j;
  j["dims"] = psi.dims();
  Json amps = Json::array();
  for (const auto& a : psi.amps()) amps.push_back({a.real(), a.imag()});
  j["amplitudes"] = std::move(amps);
  if (!label.empty()) j["label"] = label;
  return j;
}

struct ReportEnvelope {
  std::string tool_version;
  std::string input_label;
  std::string command;
  Json parameters = Json::object();
  Json results = Json::object();
  Json diagnostics = Json::object();

  bool operator==(const ReportEnvelope&) const = default;
};

inline Json to_json(const ReportEnvelope& r) {
  Json j;
  j["tool_version"] = r.tool_version;
  j["input_label"] = r.input_label;
  j["command"] = r.command;
  j["parameters"] = r.parameters;
  j["results"] = r.results;
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline ReportEnvelope envelope_from_json(const Json& j) {
  try {
    return {j.at("tool_version").get<std::string>(), j.at("input_label").get<std::string>(),
            j.at("command").get<std::string>(),      j.at("parameters"),
            j.at("results"),                         j.at("diagnostics")};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report envelope: ") + e.what());
  }
}

}  // namespace entangle
