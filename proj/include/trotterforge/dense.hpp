#pragma once

// Dense operators on the Hilbert space of a vertex subset. Sites are ordered
// ascending; the lowest vertex is the most significant bit of the basis index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "trotterforge/error.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/pauli.hpp"

namespace trotterforge {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kDefaultDenseCap = 14;

/// Site cap for dense matrices; TROTTERFORGE_DENSE_CAP overrides the default.
inline int dense_site_cap() {
  if (const char* env = std::getenv("TROTTERFORGE_DENSE_CAP")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value <= 30) return static_cast<int>(value);
    throw ValidationError(std::string("invalid TROTTERFORGE_DENSE_CAP '") + env + "'");
  }
  return kDefaultDenseCap;
}

inline void check_dense_cap(std::size_t sites) {
  const int cap = dense_site_cap();
  if (sites > static_cast<std::size_t>(cap))
    throw ResourceError(std::to_string(sites) + " sites exceed the dense cap of " +
                        std::to_string(cap));
}

/// Matrix together with the vertices it acts on.
class DenseOperator {
 public:
  DenseOperator() = default;

  DenseOperator(VertexSet sites, Matrix matrix) : sites_(std::move(sites)), matrix_(std::move(matrix)) {
    const Eigen::Index dim = Eigen::Index{1} << sites_.size();
    if (matrix_.rows() != dim || matrix_.cols() != dim)
      throw ValidationError("operator dimension " + std::to_string(matrix_.rows()) + " does not match " +
                            std::to_string(sites_.size()) + " sites");
  }

  static DenseOperator zero(VertexSet sites) {
    const Eigen::Index dim = Eigen::Index{1} << sites.size();
    return {std::move(sites), Matrix::Zero(dim, dim)};
  }

  static DenseOperator identity(VertexSet sites) {
    const Eigen::Index dim = Eigen::Index{1} << sites.size();
    return {std::move(sites), Matrix::Identity(dim, dim)};
  }

  const VertexSet& sites() const { return sites_; }
  const Matrix& matrix() const { return matrix_; }
  Matrix& matrix() { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  double hermiticity_defect() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol = 1e-12) const { return dim() == 0 || hermiticity_defect() < tol; }

  DenseOperator operator-(const DenseOperator& other) const {
    require_same_sites(other);
    return {sites_, matrix_ - other.matrix_};
  }
  DenseOperator operator+(const DenseOperator& other) const {
    require_same_sites(other);
    return {sites_, matrix_ + other.matrix_};
  }
  DenseOperator operator*(const DenseOperator& other) const {
    require_same_sites(other);
    return {sites_, matrix_ * other.matrix_};
  }

  void require_same_sites(const DenseOperator& other) const {
    if (sites_ != other.sites_) throw ValidationError("operators act on different site sets");
  }

 private:
  VertexSet sites_;
  Matrix matrix_;
};

namespace detail {

inline int position_of(const VertexSet& sites, Vertex v) {
  auto it = std::lower_bound(sites.begin(), sites.end(), v);
  if (it == sites.end() || *it != v)
    throw ValidationError("vertex " + std::to_string(v) + " outside the operator's sites");
  return static_cast<int>(it - sites.begin());
}

}  // namespace detail

/// out <- (u (x) I) out, where u acts on `sub`, a subset of the sites of
/// `out`. Costs O(dim^2 2^|sub|) instead of a full dense product.
inline void apply_local_left(const Matrix& u, const VertexSet& sub, const VertexSet& sites, Matrix& out) {
  const int n = static_cast<int>(sites.size());
  const int s = static_cast<int>(sub.size());
  const Eigen::Index local_dim = Eigen::Index{1} << s;
  if (u.rows() != local_dim || u.cols() != local_dim) throw ValidationError("local operator has the wrong size");
  std::vector<std::uint64_t> scatter(static_cast<std::size_t>(local_dim), 0);
  std::uint64_t sub_mask = 0;
  for (int a = 0; a < s; ++a) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - detail::position_of(sites, sub[static_cast<std::size_t>(a)]));
    sub_mask |= bit;
    const std::uint64_t local_bit = std::uint64_t{1} << (s - 1 - a);
    for (Eigen::Index l = 0; l < local_dim; ++l)
      if (static_cast<std::uint64_t>(l) & local_bit) scatter[static_cast<std::size_t>(l)] |= bit;
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(local_dim));
  Matrix block(local_dim, out.cols());
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & sub_mask) continue;
    for (Eigen::Index l = 0; l < local_dim; ++l)
      rows[static_cast<std::size_t>(l)] = static_cast<Eigen::Index>(base | scatter[static_cast<std::size_t>(l)]);
    for (Eigen::Index l = 0; l < local_dim; ++l) block.row(l) = out.row(rows[static_cast<std::size_t>(l)]);
    block = u * block;
    for (Eigen::Index l = 0; l < local_dim; ++l) out.row(rows[static_cast<std::size_t>(l)]) = block.row(l);
  }
}

/// Adds coeff * P to `out`, where `out` acts on `sites`. A Pauli string maps
/// basis state j to phase(j) |j xor flip>.
inline void add_pauli_string(Matrix& out, const VertexSet& sites, const PauliString& s, Complex coeff) {
  const int n = static_cast<int>(sites.size());
  std::uint64_t flip = 0;
  std::uint64_t zmask = 0;
  int num_y = 0;
  for (const auto& [v, p] : s.ops()) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - detail::position_of(sites, v));
    if (p == Pauli::X || p == Pauli::Y) flip |= bit;
    if (p == Pauli::Z || p == Pauli::Y) zmask |= bit;
    if (p == Pauli::Y) ++num_y;
  }
  // Y = i X Z on a single site: Y|b> = i (-1)^b |1-b>.
  static const Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex base = coeff * kIPowers[num_y % 4];
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t j = 0; j < dim; ++j) {
    const bool negative = (__builtin_popcountll(j & zmask) & 1) != 0;
    out(static_cast<Eigen::Index>(j ^ flip), static_cast<Eigen::Index>(j)) += negative ? -base : base;
  }
}

inline DenseOperator to_dense(const PauliSum& sum, const VertexSet& sites) {
  check_dense_cap(sites.size());
  DenseOperator out = DenseOperator::zero(sites);
  for (const auto& [s, c] : sum.terms()) add_pauli_string(out.matrix(), sites, s, c);
  return out;
}

inline DenseOperator to_dense(const PauliString& s, const VertexSet& sites, double coeff = 1.0) {
  return to_dense(PauliSum(s, coeff), sites);
}

/// Largest |eigenvalue| via Lanczos with full reorthogonalization.
inline double lanczos_spectral_norm(const Matrix& a, double tol = 1e-13) {
  const Eigen::Index dim = a.rows();
  const Eigen::Index max_iter = std::min<Eigen::Index>(dim, 300);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  v.normalize();
  Matrix basis(dim, max_iter);
  std::vector<double> alpha;
  std::vector<double> beta;
  double estimate = 0.0;
  for (Eigen::Index j = 0; j < max_iter; ++j) {
    basis.col(j) = v;
    Vector w = a * v;
    alpha.push_back(v.dot(w).real());
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeffs = basis.leftCols(j + 1).adjoint() * w;
      w -= basis.leftCols(j + 1) * coeffs;
    }
    const double b = w.norm();
    const Eigen::Index size = j + 1;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < size) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const bool top_is_max = std::abs(theta(size - 1)) >= std::abs(theta(0));
    const Eigen::Index idx = top_is_max ? size - 1 : 0;
    estimate = std::abs(theta(idx));
    // Ritz residual of the extreme pair: |beta_j * last component of its eigenvector|.
    const double residual = b * std::abs(es.eigenvectors()(size - 1, idx));
    if (b < 1e-300 || residual <= tol * std::max(estimate, 1e-300)) break;
    beta.push_back(b);
    v = w / b;
  }
  return estimate;
}

/// Dimension above which Hermitian spectral norms switch to Lanczos.
inline constexpr Eigen::Index kDenseEigenLimit = 512;

/// Spectral norm of a Hermitian matrix: max |eigenvalue|.
inline double spectral_norm_hermitian(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  if (a.rows() <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return lanczos_spectral_norm(a);
}

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// Spectral norm via the Hermitian route when possible, otherwise SVD.
inline double operator_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale) return spectral_norm_hermitian(a);
  return spectral_norm(a);
}

inline double operator_norm(const DenseOperator& a) { return operator_norm(a.matrix()); }

}  // namespace trotterforge
