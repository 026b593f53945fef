#pragma once

// Interactions: finite assignments X -> Phi(X) of Hermitian operators to
// vertex subsets, stored as Pauli expansions. Norms, truncation, the
// derivation delta^Phi(Psi) and commuting-layer decompositions.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trotterforge/dense.hpp"
#include "trotterforge/error.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/pauli.hpp"

namespace trotterforge {

struct InteractionTerm {
  VertexSet support;
  PauliSum op;
};

/// Every term's support is the union of the supports of its Pauli strings.
/// Terms sharing a support are summed.
class Interaction {
 public:
  Interaction() = default;

  /// Adds coeff * s as (part of) the term on supp(s).
  void add(const PauliString& s, double coeff) {
    if (s.is_identity()) throw ValidationError("identity terms carry no support");
    if (coeff == 0.0) return;
    terms_[s.support()].add(s, coeff);
  }

  /// Adds `op` to the term on `support`; `support` must equal the union of
  /// the supports of the strings in `op`.
  void add(const VertexSet& support, const PauliSum& op) {
    if (op.empty()) return;
    if (op.support() != support)
      throw ValidationError("term support does not match its Pauli strings");
    for (const auto& [s, c] : op.terms())
      if (s.is_identity()) throw ValidationError("identity terms carry no support");
    auto& slot = terms_[support];
    slot.add(op);
    if (slot.empty()) terms_.erase(support);
  }

  void add(const InteractionTerm& term) { add(term.support, term.op); }

  const std::map<VertexSet, PauliSum>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Flattened (string, coefficient) multiset, independent of term grouping.
  std::map<PauliString, double> pauli_coefficients() const {
    std::map<PauliString, double> out;
    for (const auto& [support, op] : terms_)
      for (const auto& [s, c] : op.terms()) out[s] += c;
    return out;
  }

  VertexSet support() const {
    VertexSet out;
    for (const auto& [support, op] : terms_) out = set_union(out, support);
    return out;
  }

  int max_diameter(const LatticeGraph& graph) const {
    int best = 0;
    for (const auto& [support, op] : terms_) best = std::max(best, graph.diameter(support));
    return best;
  }

  void check_in_graph(const LatticeGraph& graph) const {
    for (const auto& [support, op] : terms_)
      for (Vertex v : support)
        if (!graph.contains(v))
          throw ValidationError("term on vertex " + std::to_string(v) + " outside the lattice");
  }

  friend bool operator==(const Interaction&, const Interaction&) = default;

 private:
  std::map<VertexSet, PauliSum> terms_;
};

/// ||Phi(X)||: |c| for a single Pauli string, a dense eigensolve otherwise.
inline double term_norm(const PauliSum& op) {
  if (op.empty()) return 0.0;
  if (op.size() == 1) return std::abs(op.terms().begin()->second);
  const VertexSet support = op.support();
  return spectral_norm_hermitian(to_dense(op, support).matrix());
}

namespace detail {

template <class Weight>
double weighted_norm(const Interaction& phi, const LatticeGraph& graph, Weight weight) {
  phi.check_in_graph(graph);
  std::vector<double> per_vertex(static_cast<std::size_t>(graph.size()), 0.0);
  for (const auto& [support, op] : phi.terms()) {
    const double value = term_norm(op) / weight(support);
    for (Vertex x : support) per_vertex[static_cast<std::size_t>(x)] += value;
  }
  return per_vertex.empty() ? 0.0 : *std::max_element(per_vertex.begin(), per_vertex.end());
}

}  // namespace detail

/// sup_x sum_{X containing x} ||Phi(X)|| / xi_b(D(X)).
inline double interaction_norm(const Interaction& phi, const LatticeGraph& graph, const DecayFunction& decay) {
  decay.validate();
  return detail::weighted_norm(phi, graph, [&](const VertexSet& X) { return decay(graph.diameter(X)); });
}

/// As interaction_norm with xi_b(D_Z(X)) = xi_b(D(X) + d(X, Z)) as weight.
inline double anchored_norm(const Interaction& phi, const LatticeGraph& graph, const DecayFunction& decay,
                            const VertexSet& Z) {
  decay.validate();
  if (Z.empty()) throw ValidationError("anchored_norm: empty anchor set");
  return detail::weighted_norm(phi, graph,
                               [&](const VertexSet& X) { return decay(graph.anchored_diameter(X, Z)); });
}

/// C = kappa * sum_n (1 + n)^{d-1} xi_b(n) for the chain (kappa = 2, d = 1),
/// the constant bounding sum_x xi_b(d(x, z)) by C for any vertex z.
inline double chain_summability_constant(const DecayFunction& decay) {
  decay.validate();
  double sum = 0.0;
  for (long n = 0; n < 100'000'000L; ++n) {
    const double term = decay(static_cast<double>(n));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return 2.0 * sum;
}

/// H_Lambda = sum of Phi(X) over X inside Lambda, embedded on Lambda. Terms
/// reaching outside Lambda are dropped; their count lands in `dropped`.
inline DenseOperator assemble(const Interaction& phi, const VertexSet& lambda, std::size_t* dropped = nullptr) {
  check_dense_cap(lambda.size());
  DenseOperator out = DenseOperator::zero(lambda);
  std::size_t skipped = 0;
  for (const auto& [support, op] : phi.terms()) {
    if (!is_subset(support, lambda)) {
      ++skipped;
      continue;
    }
    for (const auto& [s, c] : op.terms()) add_pauli_string(out.matrix(), lambda, s, c);
  }
  if (dropped != nullptr) {
    *dropped = skipped;
  } else if (skipped > 0) {
    std::clog << "trotterforge: assemble dropped " << skipped << " term(s) outside the region\n";
  }
  return out;
}

/// Phi_R: the terms with D(X) <= R.
inline Interaction truncate(const Interaction& phi, const LatticeGraph& graph, int range) {
  Interaction out;
  for (const auto& [support, op] : phi.terms())
    if (graph.diameter(support) <= range) out.add(support, op);
  return out;
}

/// Phi - Phi_R: the terms with D(X) > R.
inline Interaction truncation_remainder(const Interaction& phi, const LatticeGraph& graph, int range) {
  Interaction out;
  for (const auto& [support, op] : phi.terms())
    if (graph.diameter(support) > range) out.add(support, op);
  return out;
}

struct TruncationCheck {
  int range = 0;
  double lhs = 0.0;  ///< ||Phi_R - Phi||_{b'}
  double rhs = 0.0;  ///< xi_{b-b'}(R+1) ||Phi||_b
  bool holds() const { return lhs <= rhs; }
};

/// Both sides of ||Phi_R - Phi||_{b'} <= xi_{b-b'}(R+1) ||Phi||_b.
inline TruncationCheck truncation_bound_check(const Interaction& phi, const LatticeGraph& graph, int range,
                                              const DecayFunction& decay, double b_prime) {
  decay.validate();
  if (!(b_prime > 0.0 && b_prime < decay.b))
    throw ValidationError("truncation check needs 0 < b' < b");
  TruncationCheck check;
  check.range = range;
  check.lhs = interaction_norm(truncation_remainder(phi, graph, range), graph, decay.with_rate(b_prime));
  check.rhs = decay.with_rate(decay.b - b_prime)(range + 1.0) * interaction_norm(phi, graph, decay);
  return check;
}

/// Pauli coefficients below this are dropped from derivation outputs.
inline constexpr double kDerivationCleanup = 1e-14;

/// delta^Phi(Psi): X -> sum over overlapping Y, Y' with Y u Y' = X of
/// i[Phi(Y), Psi(Y')]. Each commutator is expanded in the Pauli basis;
/// strings on which both factors agree drop out, so a term may land on a
/// proper subset of Y u Y'.
inline Interaction derivation(const Interaction& phi, const Interaction& psi) {
  std::map<VertexSet, PauliSum> grouped;
  for (const auto& [y, phi_y] : phi.terms()) {
    for (const auto& [y2, psi_y2] : psi.terms()) {
      if (!intersects(y, y2)) continue;
      grouped[set_union(y, y2)].add(i_commutator(phi_y, psi_y2));
    }
  }
  Interaction out;
  for (auto& [x, op] : grouped) {
    op.prune(kDerivationCleanup);
    if (op.empty()) continue;
    // Regroup by actual support so every stored term stays minimal.
    std::map<VertexSet, PauliSum> by_support;
    for (const auto& [s, c] : op.terms()) by_support[s.support()].add(s, c);
    for (const auto& [support, part] : by_support) out.add(support, part);
  }
  return out;
}

/// k layers whose Pauli strings partition the parent interaction.
struct Decomposition {
  std::vector<Interaction> layers;
  bool commuting = false;  ///< same-layer terms have disjoint supports

  int k() const { return static_cast<int>(layers.size()); }

  /// True when same-layer terms are pairwise disjoint.
  bool supports_disjoint() const {
    for (const auto& layer : layers) {
      std::vector<VertexSet> supports;
      for (const auto& [support, op] : layer.terms()) supports.push_back(support);
      for (std::size_t a = 0; a < supports.size(); ++a)
        for (std::size_t b = a + 1; b < supports.size(); ++b)
          if (intersects(supports[a], supports[b])) return false;
    }
    return true;
  }

  /// Exact coefficient-level reconstruction of `parent`.
  bool reproduces(const Interaction& parent) const {
    std::map<PauliString, double> sum;
    for (const auto& layer : layers)
      for (const auto& [s, c] : layer.pauli_coefficients()) sum[s] += c;
    return sum == parent.pauli_coefficients();
  }
};

/// Two layers on the edges {2x, 2x+1} and {2x+1, 2x+2} of a chain. Single-site
/// terms are merged into the term of the even-layer edge covering their site
/// (the odd-layer edge when no even edge does), which keeps each layer
/// disjoint. Terms on two non-adjacent sites or on three or more sites are
/// rejected.
inline Decomposition decompose_even_odd(const Interaction& phi, const LatticeGraph& graph) {
  phi.check_in_graph(graph);
  const int n = graph.size();
  if (graph.boundary() == Boundary::periodic && n % 2 == 1)
    throw ValidationError("even/odd split needs an even periodic chain");
  auto is_edge = [&](Vertex a, Vertex b) { return graph.distance(a, b) == 1; };
  // Parity of an edge: its lower endpoint, except the periodic wrap edge.
  auto edge_key = [&](Vertex a, Vertex b) -> std::pair<int, VertexSet> {
    const Vertex lo = std::min(a, b);
    const Vertex hi = std::max(a, b);
    const Vertex start = (hi - lo == 1) ? lo : hi;  // wrap edge {n-1, 0} starts at n-1
    return {start % 2, VertexSet{lo, hi}};
  };

  std::map<VertexSet, PauliSum> layer_terms[2];
  std::vector<std::pair<Vertex, PauliSum>> singles;
  for (const auto& [support, op] : phi.terms()) {
    if (support.size() == 1) {
      singles.emplace_back(support.front(), op);
    } else if (support.size() == 2 && is_edge(support[0], support[1])) {
      auto [parity, key] = edge_key(support[0], support[1]);
      layer_terms[parity][key].add(op);
    } else {
      throw ValidationError("even/odd split accepts only nearest-neighbour and single-site terms");
    }
  }
  for (const auto& [v, op] : singles) {
    // Prefer the even edge starting at or ending on v, then the odd one.
    bool placed = false;
    for (int parity = 0; parity < 2 && !placed; ++parity) {
      for (Vertex w : {v - 1, v + 1, (v + 1) % n, (v - 1 + n) % n}) {
        if (w < 0 || w >= n || w == v || !is_edge(v, w)) continue;
        auto [p, key] = edge_key(v, w);
        if (p != parity) continue;
        layer_terms[parity][key].add(op);
        placed = true;
        break;
      }
    }
    if (!placed) {
      // Isolated vertex (chain of length 1): a layer of its own is still disjoint.
      layer_terms[0][VertexSet{v}].add(op);
    }
  }

  Decomposition out;
  out.commuting = true;
  for (auto& terms : layer_terms) {
    Interaction layer;
    for (auto& [support, op] : terms) {
      if (op.empty()) continue;
      layer.add(op.support(), op);
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

/// Greedy colouring of the term-overlap graph, terms visited in their stored
/// order; each colour becomes one layer of pairwise disjoint terms.
inline Decomposition decompose_greedy_coloring(const Interaction& phi, const LatticeGraph& graph) {
  phi.check_in_graph(graph);
  std::vector<const std::pair<const VertexSet, PauliSum>*> terms;
  for (const auto& kv : phi.terms()) terms.push_back(&kv);
  std::vector<int> colour(terms.size(), -1);
  int num_colours = 0;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    std::vector<bool> used(terms.size() + 1, false);
    for (std::size_t b = 0; b < a; ++b)
      if (intersects(terms[a]->first, terms[b]->first)) used[static_cast<std::size_t>(colour[b])] = true;
    int c = 0;
    while (used[static_cast<std::size_t>(c)]) ++c;
    colour[a] = c;
    num_colours = std::max(num_colours, c + 1);
  }
  Decomposition out;
  out.commuting = true;
  out.layers.resize(static_cast<std::size_t>(num_colours));
  for (std::size_t a = 0; a < terms.size(); ++a)
    out.layers[static_cast<std::size_t>(colour[a])].add(terms[a]->first, terms[a]->second);
  return out;
}

}  // namespace trotterforge
