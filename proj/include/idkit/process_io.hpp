#pragma once
// JSON form of process specs.
//
//   [0.25, 0.75]                                  i.i.d.
//   {"alphabet": 2, "L": 1,
//    "delta": [[0.9, 0.1], [0.2, 0.8]],           one row per context code
//    "init": "stationary"                         or {"context": [1]}
//                                                 or {"distribution": [0.5, 0.5]}}

#include <string>
#include <vector>

#include <json.hpp>

#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"

namespace idkit {

namespace detail {
inline ProbVector prob_vector_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw DomainError(where + ": expected an array of probabilities");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw DomainError(where + ": probabilities must be numbers");
    v.push_back(x.get<double>());
  }
  return ProbVector(std::move(v));
}
}  // namespace detail

inline MarkovSpec process_from_json(const nlohmann::json& j) {
  if (j.is_array()) return MarkovSpec(IidSpec(detail::prob_vector_from_json(j, "process")));
  if (!j.is_object()) throw DomainError("process: expected an array or an object");
  if (!j.contains("delta")) throw DomainError("process: missing \"delta\"");
  const auto& delta_json = j.at("delta");
  if (!delta_json.is_array() || delta_json.empty()) throw DomainError("process.delta: expected a nonempty array");
  const std::size_t memory = j.value("L", std::size_t{0});
  std::vector<IidSpec> delta;
  for (std::size_t c = 0; c < delta_json.size(); ++c)
    delta.emplace_back(detail::prob_vector_from_json(delta_json[c], "process.delta[" + std::to_string(c) + "]"));
  const std::size_t alphabet = j.value("alphabet", delta.front().alphabet_size());
  InitialContext init = StationaryInit{};
  if (j.contains("init")) {
    const auto& i = j.at("init");
    if (i.is_string()) {
      if (i.get<std::string>() != "stationary") throw DomainError("process.init: unknown keyword " + i.get<std::string>());
    } else if (i.is_object() && i.contains("context")) {
      init = ExplicitContext{i.at("context").get<Sequence>()};
    } else if (i.is_object() && i.contains("distribution")) {
      init = detail::prob_vector_from_json(i.at("distribution"), "process.init.distribution");
    } else {
      throw DomainError("process.init: expected \"stationary\", {\"context\": ...} or {\"distribution\": ...}");
    }
  }
  return MarkovSpec(alphabet, memory, std::move(delta), std::move(init));
}

inline nlohmann::json process_to_json(const MarkovSpec& m) {
  auto row = [](const IidSpec& s) { return nlohmann::json(std::vector<double>(s.distribution().begin(), s.distribution().end())); };
  if (m.is_iid()) return row(m.step(0));
  nlohmann::json delta = nlohmann::json::array();
  for (const auto& s : m.delta()) delta.push_back(row(s));
  nlohmann::json j{{"alphabet", m.alphabet_size()}, {"L", m.memory()}, {"delta", delta}};
  const auto& init = m.initial_context();
  if (std::holds_alternative<StationaryInit>(init)) j["init"] = "stationary";
  else if (const auto* c = std::get_if<ExplicitContext>(&init)) j["init"] = {{"context", c->context}};
  else {
    const auto& d = std::get<ProbVector>(init);
    j["init"] = {{"distribution", std::vector<double>(d.begin(), d.end())}};
  }
  return j;
}

}  // namespace idkit
