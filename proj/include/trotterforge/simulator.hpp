#pragma once

// Exact dense dynamics: exponentials of Hermitian matrices, Heisenberg
// evolution tau_t(O) = e^{itH} O e^{-itH}, product-schedule execution and
// conditional expectations.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trotterforge/dense.hpp"
#include "trotterforge/error.hpp"
#include "trotterforge/interaction.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/schedule.hpp"

namespace trotterforge {

/// H = V diag(values) V^dagger.
struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;

  static Eigensystem of(const DenseOperator& h) {
    check_dense_cap(h.sites().size());
    const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
    if (h.hermiticity_defect() > 1e-12 * scale) throw ValidationError("operator is not Hermitian");
    Eigensystem es;
    if (h.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
      // Real symmetric input: the real solver is several times cheaper.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix().real());
      es.values = solver.eigenvalues();
      es.vectors = solver.eigenvectors().cast<Complex>();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
      es.values = solver.eigenvalues();
      es.vectors = solver.eigenvectors();
    }
    return es;
  }

  /// e^{itH}.
  Matrix exp_i(double t) const {
    Vector phases(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) phases(i) = std::polar(1.0, t * values(i));
    return vectors * phases.asDiagonal() * vectors.adjoint();
  }

  /// e^{itH} O e^{-itH}, computed in the eigenbasis.
  Matrix conjugate(double t, const Matrix& o) const {
    if (t == 0.0) return o;
    Matrix rotated = vectors.adjoint() * o * vectors;
    const Eigen::Index n = values.size();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) rotated(i, j) *= std::polar(1.0, t * (values(i) - values(j)));
    return vectors * rotated * vectors.adjoint();
  }
};

inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// e^{itH} via the eigendecomposition of H.
inline DenseOperator expm_hermitian(const DenseOperator& h, double t) {
  return {h.sites(), Eigensystem::of(h).exp_i(t)};
}

/// tau_t(O) = e^{itH} O e^{-itH}.
inline DenseOperator heisenberg(const DenseOperator& h, double t, const DenseOperator& o) {
  h.require_same_sites(o);
  return {o.sites(), Eigensystem::of(h).conjugate(t, o.matrix())};
}

inline DenseOperator heisenberg(const Eigensystem& es, const VertexSet& sites, double t, const DenseOperator& o) {
  if (sites != o.sites()) throw ValidationError("operators act on different site sets");
  return {o.sites(), es.conjugate(t, o.matrix())};
}

/// Dense layer Hamiltonians of a decomposition with lazily computed
/// eigensystems and a memo of layer exponentials keyed by (layer, duration).
/// A layer whose terms have disjoint supports is exponentiated term by term,
/// which keeps its evolution strictly local up to rounding of single
/// products. The memo is safe to share between threads.
class EvolutionPlan {
 public:
  EvolutionPlan(const Decomposition& decomposition, VertexSet region) : region_(std::move(region)) {
    check_dense_cap(region_.size());
    for (const auto& layer : decomposition.layers) {
      layers_.push_back(assemble(layer, region_));
      local_.push_back(local_terms(layer));
    }
    eigen_.resize(layers_.size());
  }

  int k() const { return static_cast<int>(layers_.size()); }
  const VertexSet& region() const { return region_; }
  const DenseOperator& layer_hamiltonian(int layer) const { return layers_.at(static_cast<std::size_t>(layer - 1)); }

  /// Sum of all layer Hamiltonians.
  DenseOperator hamiltonian() const {
    DenseOperator h = DenseOperator::zero(region_);
    for (const auto& layer : layers_) h.matrix() += layer.matrix();
    return h;
  }

  /// e^{i duration K_layer}, layers labelled 1..k.
  const Matrix& layer_unitary(int layer, double duration) const {
    if (layer < 1 || layer > k()) throw ValidationError("layer " + std::to_string(layer) + " out of range");
    const Key key{layer, std::bit_cast<std::uint64_t>(duration)};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
    }
    std::unique_ptr<Matrix> u;
    if (const auto& local = local_[static_cast<std::size_t>(layer - 1)]) {
      const Eigen::Index dim = Eigen::Index{1} << region_.size();
      u = std::make_unique<Matrix>(Matrix::Identity(dim, dim));
      for (const auto& [support, es] : *local) apply_local_left(es.exp_i(duration), support, region_, *u);
    } else {
      u = std::make_unique<Matrix>(eigensystem(layer).exp_i(duration));
    }
    if (unitarity_defect(*u) >= 1e-11) throw AssertionFailure("layer exponential lost unitarity");
    std::lock_guard lock(mutex_);
    auto [it, inserted] = cache_.try_emplace(key, std::move(u));
    return *it->second;
  }

  /// Unitary W of one application of `schedule` at step mu, so that
  /// sigma_mu(O) = W O W^dagger. The first entry is applied first.
  Matrix step_unitary(const ProductSchedule& schedule, double mu) const {
    if (schedule.k() != k())
      throw ValidationError("schedule has k=" + std::to_string(schedule.k()) + " but decomposition has " +
                            std::to_string(k()) + " layers");
    const Eigen::Index dim = Eigen::Index{1} << region_.size();
    Matrix w = Matrix::Identity(dim, dim);
    for (const auto& e : schedule.entries()) w = layer_unitary(e.layer, e.fraction * mu) * w;
    return w;
  }

  std::size_t cached_unitaries() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  using Key = std::pair<int, std::uint64_t>;
  using LocalTerms = std::vector<std::pair<VertexSet, Eigensystem>>;

  /// Per-term eigensystems of a layer with pairwise disjoint supports inside
  /// the region; empty when the supports overlap.
  std::optional<LocalTerms> local_terms(const Interaction& layer) const {
    LocalTerms terms;
    VertexSet covered;
    for (const auto& [support, op] : layer.terms()) {
      if (!is_subset(support, region_)) continue;
      if (intersects(covered, support)) return std::nullopt;
      covered = set_union(covered, support);
      terms.emplace_back(support, Eigensystem::of(to_dense(op, support)));
    }
    return terms;
  }

  const Eigensystem& eigensystem(int layer) const {
    std::lock_guard lock(mutex_);
    auto& slot = eigen_[static_cast<std::size_t>(layer - 1)];
    if (!slot) slot = std::make_unique<Eigensystem>(Eigensystem::of(layers_[static_cast<std::size_t>(layer - 1)]));
    return *slot;
  }

  VertexSet region_;
  std::vector<DenseOperator> layers_;
  std::vector<std::optional<LocalTerms>> local_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<Eigensystem>> eigen_;
  mutable std::map<Key, std::unique_ptr<Matrix>> cache_;
};

/// pi_{t,n}(O) = (sigma_mu)^n (O) with t = n mu.
inline DenseOperator run_schedule(const EvolutionPlan& plan, const ProductSchedule& schedule, double mu, int n,
                                  const DenseOperator& o) {
  if (n < 0) throw ValidationError("step count must be non-negative");
  if (o.sites() != plan.region()) throw ValidationError("observable lives on a different region");
  // (sigma_mu)^n is conjugation by W^n; W^n by repeated squaring.
  Matrix base = plan.step_unitary(schedule, mu);
  const Eigen::Index dim = base.rows();
  Matrix power = Matrix::Identity(dim, dim);
  for (unsigned remaining = static_cast<unsigned>(n); remaining != 0; remaining >>= 1) {
    if (remaining & 1U) power = base * power;
    if (remaining > 1) base = base * base;
  }
  return {o.sites(), power * o.matrix() * power.adjoint()};
}

inline DenseOperator run_schedule(const Decomposition& decomposition, const ProductSchedule& schedule, double mu,
                                  int n, const DenseOperator& o, const VertexSet& region) {
  const EvolutionPlan plan(decomposition, region);
  return run_schedule(plan, schedule, mu, n, o);
}

namespace detail {

/// Bit masks (within the basis index of `lambda`) of the sites in X.
inline std::uint64_t site_mask(const VertexSet& X, const VertexSet& lambda) {
  const int n = static_cast<int>(lambda.size());
  std::uint64_t mask = 0;
  for (Vertex v : X) mask |= std::uint64_t{1} << (n - 1 - position_of(lambda, v));
  return mask;
}

}  // namespace detail

/// E_X(A) = (tr_{Lambda \ X}(A) / 2^{|Lambda \ X|}) (x) I_{Lambda \ X}, with
/// Lambda the sites of A.
inline DenseOperator conditional_expectation(const DenseOperator& a, const VertexSet& X) {
  const VertexSet& lambda = a.sites();
  if (!is_subset(X, lambda)) throw ValidationError("conditional expectation: X is not inside the region");
  const int n = static_cast<int>(lambda.size());
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t keep = detail::site_mask(X, lambda);
  const std::uint64_t traced = (dim - 1) & ~keep;
  const int traced_count = std::popcount(traced);
  const double norm = std::ldexp(1.0, -traced_count);

  // Enumerate the kept and traced sub-indices as submasks.
  std::vector<std::uint64_t> kept_states;
  for (std::uint64_t s = keep;; s = (s - 1) & keep) {
    kept_states.push_back(s);
    if (s == 0) break;
  }
  std::vector<std::uint64_t> traced_states;
  for (std::uint64_t s = traced;; s = (s - 1) & traced) {
    traced_states.push_back(s);
    if (s == 0) break;
  }

  const Matrix& m = a.matrix();
  DenseOperator out = DenseOperator::zero(lambda);
  Matrix& o = out.matrix();
  for (std::uint64_t i : kept_states) {
    for (std::uint64_t j : kept_states) {
      Complex acc = 0.0;
      for (std::uint64_t e : traced_states)
        acc += m(static_cast<Eigen::Index>(i | e), static_cast<Eigen::Index>(j | e));
      acc *= norm;
      for (std::uint64_t e : traced_states)
        o(static_cast<Eigen::Index>(i | e), static_cast<Eigen::Index>(j | e)) = acc;
    }
  }
  return out;
}

struct LeakagePoint {
  int radius = 0;
  double leakage = 0.0;
};

/// ||(E_{Z^(r)} - id)(A)|| for r = 0 .. D(Lambda).
inline std::vector<LeakagePoint> leakage_profile(const DenseOperator& a, const VertexSet& Z,
                                                 const LatticeGraph& graph) {
  const VertexSet& lambda = a.sites();
  if (!is_subset(Z, lambda)) throw ValidationError("leakage profile: Z is not inside the region");
  std::vector<LeakagePoint> profile;
  const int max_radius = graph.diameter(lambda);
  for (int r = 0; r <= max_radius; ++r) {
    VertexSet fattened;
    for (Vertex v : graph.fatten(Z, r))
      if (std::binary_search(lambda.begin(), lambda.end(), v)) fattened.push_back(v);
    double leak = 0.0;
    if (fattened.size() < lambda.size()) {
      const DenseOperator residual = conditional_expectation(a, fattened) - a;
      leak = operator_norm(residual.matrix());
    }
    profile.push_back({r, leak});
  }
  return profile;
}

/// ||A - B|| in spectral norm.
inline double error_norm(const DenseOperator& a, const DenseOperator& b) {
  a.require_same_sites(b);
  return operator_norm(Matrix(a.matrix() - b.matrix()));
}

}  // namespace trotterforge
