#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "trotterforge/error.hpp"
#include "trotterforge/pauli.hpp"

namespace trotterforge {

/// Sorted, duplicate-free set of vertices.
using VertexSet = std::vector<Vertex>;

inline VertexSet make_vertex_set(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool intersects(const VertexSet& a, const VertexSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else return true;
  }
  return false;
}

inline bool is_subset(const VertexSet& inner, const VertexSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

enum class Boundary { open, periodic };

/// Finite graph with its all-pairs graph distance.
class LatticeGraph {
 public:
  LatticeGraph(int num_vertices, std::vector<std::pair<Vertex, Vertex>> edges)
      : n_(num_vertices), edges_(std::move(edges)) {
    if (n_ < 1) throw ValidationError("graph needs at least one vertex");
    std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n_));
    for (const auto& [a, b] : edges_) {
      if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b)
        throw ValidationError("invalid edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
    dist_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), kUnreachable);
    for (Vertex s = 0; s < n_; ++s) {
      std::queue<Vertex> q;
      at(s, s) = 0;
      q.push(s);
      while (!q.empty()) {
        const Vertex u = q.front();
        q.pop();
        for (Vertex w : adj[static_cast<std::size_t>(u)]) {
          if (at(s, w) == kUnreachable) {
            at(s, w) = at(s, u) + 1;
            q.push(w);
          }
        }
      }
    }
  }

  static LatticeGraph chain(int length, Boundary boundary = Boundary::open) {
    if (length < 1) throw ValidationError("chain length must be >= 1");
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex x = 0; x + 1 < length; ++x) edges.emplace_back(x, x + 1);
    if (boundary == Boundary::periodic && length > 2) edges.emplace_back(length - 1, 0);
    LatticeGraph g(length, std::move(edges));
    g.boundary_ = boundary;
    return g;
  }

  int size() const { return n_; }
  Boundary boundary() const { return boundary_; }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

  VertexSet vertices() const {
    VertexSet v(static_cast<std::size_t>(n_));
    for (Vertex x = 0; x < n_; ++x) v[static_cast<std::size_t>(x)] = x;
    return v;
  }

  bool contains(Vertex x) const { return x >= 0 && x < n_; }

  int distance(Vertex x, Vertex y) const {
    check_vertex(x);
    check_vertex(y);
    return dist_[index(x, y)];
  }

  /// d(X, Z) = min over pairs.
  int distance(const VertexSet& X, const VertexSet& Z) const {
    require_nonempty(X, "distance");
    require_nonempty(Z, "distance");
    int best = kUnreachable;
    for (Vertex x : X)
      for (Vertex z : Z) best = std::min(best, distance(x, z));
    return best;
  }

  /// D(X): largest pairwise distance.
  int diameter(const VertexSet& X) const {
    require_nonempty(X, "diameter");
    int best = 0;
    for (Vertex x : X)
      for (Vertex y : X) best = std::max(best, distance(x, y));
    return best;
  }

  /// D_Z(X) = D(X) + d(X, Z).
  int anchored_diameter(const VertexSet& X, const VertexSet& Z) const {
    return diameter(X) + distance(X, Z);
  }

  /// X^(r) = {x : d(x, X) <= r}.
  VertexSet fatten(const VertexSet& X, int r) const {
    require_nonempty(X, "fatten");
    VertexSet out;
    for (Vertex y = 0; y < n_; ++y) {
      for (Vertex x : X) {
        if (distance(x, y) <= r) {
          out.push_back(y);
          break;
        }
      }
    }
    return out;
  }

 private:
  static constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

  std::size_t index(Vertex x, Vertex y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(y);
  }
  int& at(Vertex x, Vertex y) { return dist_[index(x, y)]; }

  void check_vertex(Vertex x) const {
    if (!contains(x)) throw ValidationError("vertex " + std::to_string(x) + " not in graph");
  }
  static void require_nonempty(const VertexSet& X, const char* what) {
    if (X.empty()) throw ValidationError(std::string(what) + ": empty vertex set");
  }

  int n_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<int> dist_;
  Boundary boundary_ = Boundary::open;
};

/// Stretched exponential xi_b(x) = exp(-b x^p) with b > 0 and 0 < p < 1.
struct DecayFunction {
  double b = 1.0;
  double p = 0.5;

  void validate() const {
    if (!(b > 0.0)) throw ValidationError("decay rate b must be positive");
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("decay exponent p must lie in (0, 1)");
  }

  double operator()(double x) const { return std::exp(-b * std::pow(x, p)); }

  DecayFunction with_rate(double rate) const { return {rate, p}; }
};

}  // namespace trotterforge
