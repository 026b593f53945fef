#pragma once

// A lattice model: graph, decay profile, interaction and an optional site
// observable. Loads from the JSON model config and builds the in-repo
// fixtures.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trotterforge/dense.hpp"
#include "trotterforge/error.hpp"
#include "trotterforge/interaction.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/pauli.hpp"

namespace trotterforge {

struct Observable {
  PauliString string;
  double coeff = 1.0;

  VertexSet support() const { return string.support(); }
};

struct Model {
  LatticeGraph graph = LatticeGraph::chain(1);
  DecayFunction decay{};
  Interaction interaction;
  std::optional<Observable> observable;

  /// Observable embedded on the full lattice.
  DenseOperator observable_operator() const {
    if (!observable) throw ValidationError("model defines no observable");
    return to_dense(observable->string, graph.vertices(), observable->coeff);
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* name : allowed) ok = ok || key == name;
    if (!ok) throw ValidationError("unknown field '" + key + "' in " + where);
  }
}

template <class T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError("missing field '" + std::string(key) + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

inline PauliString parse_pauli(const nlohmann::json& obj, const std::string& where) {
  const auto sites = required<std::vector<int>>(obj, "sites", where);
  const auto symbols = required<std::string>(obj, "pauli", where);
  return PauliString(sites, symbols);
}

}  // namespace detail

/// Parses a model config:
///   {"lattice": {"type": "chain", "length": L, "boundary": "open"|"periodic"},
///    "decay": {"b": b, "p": p},
///    "terms": [{"sites": [...], "pauli": "ZZ", "coeff": c}, ...],
///    "observable": {"sites": [...], "pauli": "Z", "coeff": c}}
/// "decay" and "observable" are optional; unknown fields are rejected.
inline Model parse_model(const nlohmann::json& config) {
  detail::reject_unknown(config, {"lattice", "decay", "terms", "observable"}, "model");
  if (!config.contains("lattice")) throw ValidationError("missing field 'lattice' in model");
  const auto& lattice = config.at("lattice");
  detail::reject_unknown(lattice, {"type", "length", "boundary"}, "lattice");
  const auto type = detail::required<std::string>(lattice, "type", "lattice");
  if (type != "chain") throw ValidationError("unsupported lattice type '" + type + "'");
  const int length = detail::required<int>(lattice, "length", "lattice");
  const std::string boundary = lattice.contains("boundary") ? detail::required<std::string>(lattice, "boundary", "lattice") : "open";
  Boundary bc;
  if (boundary == "open") bc = Boundary::open;
  else if (boundary == "periodic") bc = Boundary::periodic;
  else throw ValidationError("unknown boundary '" + boundary + "'");

  Model model{LatticeGraph::chain(length, bc), {}, {}, std::nullopt};
  if (config.contains("decay")) {
    const auto& decay = config.at("decay");
    detail::reject_unknown(decay, {"b", "p"}, "decay");
    if (decay.contains("b")) model.decay.b = detail::required<double>(decay, "b", "decay");
    if (decay.contains("p")) model.decay.p = detail::required<double>(decay, "p", "decay");
  }
  model.decay.validate();

  if (!config.contains("terms") || !config.at("terms").is_array())
    throw ValidationError("model needs a 'terms' array");
  std::size_t index = 0;
  for (const auto& term : config.at("terms")) {
    const std::string where = "terms[" + std::to_string(index++) + "]";
    detail::reject_unknown(term, {"sites", "pauli", "coeff"}, where);
    const PauliString s = detail::parse_pauli(term, where);
    const double coeff = detail::required<double>(term, "coeff", where);
    if (!std::isfinite(coeff)) throw ValidationError(where + ": coefficient must be finite");
    model.interaction.add(s, coeff);
  }
  model.interaction.check_in_graph(model.graph);

  if (config.contains("observable")) {
    const auto& obs = config.at("observable");
    detail::reject_unknown(obs, {"sites", "pauli", "coeff"}, "observable");
    Observable o{detail::parse_pauli(obs, "observable"), 1.0};
    if (obs.contains("coeff")) o.coeff = detail::required<double>(obs, "coeff", "observable");
    if (o.string.is_identity()) throw ValidationError("observable must act on at least one site");
    for (Vertex v : o.support())
      if (!model.graph.contains(v)) throw ValidationError("observable site outside the lattice");
    model.observable = o;
  }
  return model;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_model(config);
}

/// H = -J sum Z_x Z_{x+1} - g sum X_x on a chain.
inline Interaction tfim_interaction(const LatticeGraph& graph, double coupling, double field) {
  Interaction phi;
  for (const auto& [a, b] : graph.edges()) phi.add(PauliString({a, b}, "ZZ"), -coupling);
  for (Vertex x = 0; x < graph.size(); ++x) phi.add(PauliString::single(x, Pauli::X), -field);
  return phi;
}

/// Standard fixture: open transverse-field Ising chain with J = 1, g = 1.05,
/// observing Z at site L/2.
inline Model tfim_fixture(int length = 8, double coupling = 1.0, double field = 1.05) {
  Model model{LatticeGraph::chain(length), {}, {}, std::nullopt};
  model.interaction = tfim_interaction(model.graph, coupling, field);
  model.observable = Observable{PauliString::single(length / 2, Pauli::Z), 1.0};
  return model;
}

/// Long-range fixture: Z_x Z_y couplings exp(-a d(x,y)^p) between every pair
/// plus a transverse field g X_x on every site.
inline Model long_range_fixture(int length = 10, double a = 2.0, double field = 1.0,
                                DecayFunction decay = {1.0, 0.5}) {
  Model model{LatticeGraph::chain(length), decay, {}, std::nullopt};
  for (Vertex x = 0; x < length; ++x) {
    for (Vertex y = x + 1; y < length; ++y) {
      const double d = model.graph.distance(x, y);
      model.interaction.add(PauliString({x, y}, "ZZ"), std::exp(-a * std::pow(d, decay.p)));
    }
    model.interaction.add(PauliString::single(x, Pauli::X), field);
  }
  model.observable = Observable{PauliString::single(length / 2, Pauli::Z), 1.0};
  return model;
}

}  // namespace trotterforge
