#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "trotterforge/dense.hpp"
#include "trotterforge/pauli.hpp"

using namespace trotterforge;

TEST(Pauli, SingleSiteProductsAgreeWithMatrices) {
  for (char a : std::string("IXYZ")) {
    for (char b : std::string("IXYZ")) {
      const auto [phase, c] = multiply(pauli_from_char(a), pauli_from_char(b));
      const Matrix lhs = oracle::pauli_matrix(a) * oracle::pauli_matrix(b);
      const Matrix rhs = phase * oracle::pauli_matrix(pauli_to_char(c));
      EXPECT_LT((lhs - rhs).norm(), 1e-15) << a << b;
    }
  }
}

TEST(Pauli, StringConstructionSortsAndSkipsIdentity) {
  const PauliString s({3, 1, 2}, "ZIX");
  EXPECT_EQ(s.support(), (std::vector<Vertex>{2, 3}));
  EXPECT_EQ(s.at(3), Pauli::Z);
  EXPECT_EQ(s.at(2), Pauli::X);
  EXPECT_EQ(s.at(1), Pauli::I);
  EXPECT_EQ(s.to_string(), "X2 Z3");
  EXPECT_THROW(PauliString({0, 0}, "XZ"), ValidationError);
  EXPECT_THROW(PauliString({0}, "XZ"), ValidationError);
  EXPECT_THROW(PauliString({0}, "Q"), ValidationError);
}

TEST(Pauli, EmbeddingMatchesKroneckerOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> letter(0, 3);
  const VertexSet sites{0, 2, 3, 5};
  for (int trial = 0; trial < 50; ++trial) {
    std::string symbols;
    for (int i = 0; i < 4; ++i) symbols += "IXYZ"[letter(rng)];
    const PauliString s(sites, symbols);
    const Matrix fast = to_dense(s, sites).matrix();
    EXPECT_LT((fast - oracle::kron_string(symbols)).norm(), 1e-15) << symbols;
  }
}

TEST(Pauli, StringProductsAgreeWithMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> letter(0, 3);
  const VertexSet sites{0, 1, 2};
  for (int trial = 0; trial < 40; ++trial) {
    std::string a, b;
    for (int i = 0; i < 3; ++i) {
      a += "IXYZ"[letter(rng)];
      b += "IXYZ"[letter(rng)];
    }
    const auto [phase, c] = PauliString(sites, a) * PauliString(sites, b);
    const Matrix expected = oracle::kron_string(a) * oracle::kron_string(b);
    EXPECT_LT((phase * oracle::embed(c, sites) - expected).norm(), 1e-14) << a << "*" << b;
    const Matrix comm = expected - oracle::kron_string(b) * oracle::kron_string(a);
    EXPECT_EQ(commutes(PauliString(sites, a), PauliString(sites, b)), comm.norm() < 1e-14);
  }
}

TEST(Pauli, ICommutatorOfXAndZIsTwoY) {
  const PauliSum x(PauliString({0}, "X"), 1.0);
  const PauliSum z(PauliString({0}, "Z"), 1.0);
  const PauliSum result = i_commutator(x, z);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result.terms().begin()->first, PauliString({0}, "Y"));
  EXPECT_DOUBLE_EQ(result.terms().begin()->second, 2.0);
}

TEST(Pauli, SumSupportIsUnion) {
  PauliSum s;
  s.add(PauliString({4}, "X"), 1.0);
  s.add(PauliString({1, 2}, "ZZ"), 0.5);
  EXPECT_EQ(s.support(), (VertexSet{1, 2, 4}));
  s.add(PauliString({4}, "X"), -1.0);
  s.prune(1e-14);
  EXPECT_EQ(s.support(), (VertexSet{1, 2}));
}
