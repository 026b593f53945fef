#pragma once

// Sparse Pauli strings over lattice vertices and real linear combinations of
// them. Real coefficients keep every PauliSum Hermitian.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trotterforge/error.hpp"

namespace trotterforge {

using Vertex = int;
using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw ValidationError(std::string("unknown Pauli symbol '") + c + "'");
  }
}

inline char pauli_to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

/// Single-site product a*b = phase * result.
inline std::pair<Complex, Pauli> multiply(Pauli a, Pauli b) {
  if (a == Pauli::I) return {1.0, b};
  if (b == Pauli::I) return {1.0, a};
  if (a == b) return {1.0, Pauli::I};
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  const auto c = static_cast<Pauli>(6 - ia - ib);  // the remaining Pauli
  // XY = iZ, YZ = iX, ZX = iY; reversed order flips the sign.
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {cyclic ? Complex(0.0, 1.0) : Complex(0.0, -1.0), c};
}

/// Tensor product of non-identity Paulis, kept sorted by vertex.
class PauliString {
 public:
  PauliString() = default;

  /// e.g. PauliString({0, 1}, "ZZ"); identity letters are skipped.
  PauliString(const std::vector<Vertex>& sites, const std::string& symbols) {
    if (sites.size() != symbols.size())
      throw ValidationError("Pauli string '" + symbols + "' does not match " +
                            std::to_string(sites.size()) + " sites");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const Pauli p = pauli_from_char(symbols[i]);
      if (p != Pauli::I) ops_.emplace_back(sites[i], p);
    }
    std::sort(ops_.begin(), ops_.end());
    for (std::size_t i = 1; i < ops_.size(); ++i) {
      if (ops_[i].first == ops_[i - 1].first)
        throw ValidationError("Pauli string repeats site " + std::to_string(ops_[i].first));
    }
  }

  static PauliString single(Vertex v, Pauli p) {
    PauliString s;
    if (p != Pauli::I) s.ops_.emplace_back(v, p);
    return s;
  }

  const std::vector<std::pair<Vertex, Pauli>>& ops() const { return ops_; }
  bool is_identity() const { return ops_.empty(); }
  std::size_t weight() const { return ops_.size(); }

  std::vector<Vertex> support() const {
    std::vector<Vertex> s;
    s.reserve(ops_.size());
    for (const auto& [v, p] : ops_) s.push_back(v);
    return s;
  }

  Pauli at(Vertex v) const {
    auto it = std::lower_bound(ops_.begin(), ops_.end(), std::make_pair(v, Pauli::I));
    return (it != ops_.end() && it->first == v) ? it->second : Pauli::I;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [v, p] : ops_) {
      if (!out.empty()) out += ' ';
      out += pauli_to_char(p);
      out += std::to_string(v);
    }
    return out.empty() ? "I" : out;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

  /// a*b = phase * result.
  friend std::pair<Complex, PauliString> operator*(const PauliString& a, const PauliString& b) {
    PauliString out;
    Complex phase = 1.0;
    auto ia = a.ops_.begin();
    auto ib = b.ops_.begin();
    while (ia != a.ops_.end() || ib != b.ops_.end()) {
      if (ib == b.ops_.end() || (ia != a.ops_.end() && ia->first < ib->first)) {
        out.ops_.push_back(*ia++);
      } else if (ia == a.ops_.end() || ib->first < ia->first) {
        out.ops_.push_back(*ib++);
      } else {
        auto [ph, p] = multiply(ia->second, ib->second);
        phase *= ph;
        if (p != Pauli::I) out.ops_.emplace_back(ia->first, p);
        ++ia;
        ++ib;
      }
    }
    return {phase, out};
  }

 private:
  std::vector<std::pair<Vertex, Pauli>> ops_;
};

/// Two Pauli strings commute iff they differ (both non-identity) on an even
/// number of sites.
inline bool commutes(const PauliString& a, const PauliString& b) {
  int clashes = 0;
  auto ia = a.ops().begin();
  auto ib = b.ops().begin();
  while (ia != a.ops().end() && ib != b.ops().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      if (ia->second != ib->second) ++clashes;
      ++ia;
      ++ib;
    }
  }
  return clashes % 2 == 0;
}

/// Real linear combination of Pauli strings.
class PauliSum {
 public:
  PauliSum() = default;
  PauliSum(const PauliString& s, double coeff) { add(s, coeff); }

  void add(const PauliString& s, double coeff) {
    if (coeff == 0.0) return;
    terms_[s] += coeff;
  }

  void add(const PauliSum& other, double scale = 1.0) {
    for (const auto& [s, c] : other.terms_) add(s, scale * c);
  }

  /// Drops strings whose coefficient magnitude is below `threshold`.
  void prune(double threshold) {
    std::erase_if(terms_, [threshold](const auto& kv) { return std::abs(kv.second) < threshold; });
  }

  const std::map<PauliString, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Union of the supports of all strings, sorted.
  std::vector<Vertex> support() const {
    std::vector<Vertex> s;
    for (const auto& [str, c] : terms_) {
      for (const auto& [v, p] : str.ops()) s.push_back(v);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

 private:
  std::map<PauliString, double> terms_;
};

/// i[A, B] expanded in the Pauli basis. Anticommuting strings P, Q give
/// i[P, Q] = 2i PQ, which is real because PQ carries a phase of +-i.
inline PauliSum i_commutator(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  for (const auto& [p, cp] : a.terms()) {
    for (const auto& [q, cq] : b.terms()) {
      if (commutes(p, q)) continue;
      const auto [phase, pq] = p * q;
      const Complex value = Complex(0.0, 2.0) * phase * (cp * cq);
      out.add(pq, value.real());
    }
  }
  return out;
}

}  // namespace trotterforge
