#include "tcid/lattice.hpp"

#include <algorithm>
#include <string>

#include "tcid/errors.hpp"

namespace tcid {
namespace {

using boost::multiprecision::abs;

Vector round_vector(const Vector& a) {
  return a.unaryExpr([](const Real& x) { return round_even(x); });
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (!boost::multiprecision::isfinite(m(r, c))) return false;
  return true;
}

void require_finite(const Vector& v, const char* what) {
  if (!all_finite(v)) throw ContractViolation(std::string(what) + " has non-finite entries");
}

void require_full_rank(const LatticeBasis& basis, const char* op) {
  if (!basis.full_rank()) {
    throw ContractViolation(std::string(op) + " requires a full-rank basis (rank " +
                            std::to_string(basis.rank()) + ", dim " +
                            std::to_string(basis.ambient_dim()) + ")");
  }
}

void require_dim(const LatticeBasis& basis, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != basis.ambient_dim()) {
    throw ContractViolation("vector length " + std::to_string(v.size()) +
                            " does not match ambient dimension " +
                            std::to_string(basis.ambient_dim()));
  }
}

// Gram-Schmidt state for LLL: b*_0..b*_{k-1} stay valid while row k is worked on.
struct Gso {
  Matrix star;
  Vector sq;

  explicit Gso(const Matrix& b) : star(b.rows(), b.cols()), sq(b.cols()) {}

  Real mu(const Matrix& b, Eigen::Index k, Eigen::Index j) const {
    return b.col(k).dot(star.col(j)) / sq(j);
  }

  void update(const Matrix& b, Eigen::Index k) {
    star.col(k) = b.col(k);
    for (Eigen::Index j = 0; j < k; ++j) star.col(k) -= mu(b, k, j) * star.col(j);
    sq(k) = star.col(k).squaredNorm();
  }
};

}  // namespace

void Tolerances::validate() const {
  auto check = [](double x, const char* name) {
    if (!(x > 0.0 && x < 0.5)) {
      throw ConfigError(std::string(name) + " must lie in (0, 0.5), got " + std::to_string(x));
    }
  };
  check(integrality_tol, "integrality_tol");
  check(rank_tol, "rank_tol");
  check(orth_tol, "orth_tol");
}

LatticeBasis::LatticeBasis(Matrix columns, double rank_tol) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1) throw ContractViolation("empty basis");
  if (columns_.cols() > columns_.rows()) {
    throw ContractViolation("basis has more columns than its ambient dimension");
  }
  if (!all_finite(columns_)) throw ContractViolation("basis has non-finite entries");
  const Eigen::MatrixXd approx = columns_.unaryExpr([](const Real& x) { return to_double(x); });
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(approx);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(s.size() - 1) > rank_tol * s(0))) {
    throw ContractViolation("basis columns are not linearly independent");
  }
}

LatticeBasis make_basis_unchecked(Matrix columns) {
  return LatticeBasis(std::move(columns), LatticeBasis::Unchecked{});
}

CoordinateSolve solve_coordinates(const LatticeBasis& basis, const Vector& v) {
  require_dim(basis, v);
  require_finite(v, "vector");
  Eigen::ColPivHouseholderQR<Matrix> qr(basis.columns());
  CoordinateSolve out;
  out.coeffs = qr.solve(v);
  out.residual_norm = (basis.columns() * out.coeffs - v).norm();
  return out;
}

Real integrality_gap(const LatticeBasis& basis, const Vector& v) {
  const auto solve = solve_coordinates(basis, v);
  return (solve.coeffs - round_vector(solve.coeffs)).cwiseAbs().maxCoeff();
}

bool contains(const LatticeBasis& basis, const Vector& v, const Tolerances& tol) {
  if (!basis.full_rank()) throw UnsupportedQuery("membership requires a full-rank basis");
  const auto solve = solve_coordinates(basis, v);
  const Real scale = basis.columns().colwise().norm().maxCoeff();
  if (solve.residual_norm > tol.integrality_tol * scale) return false;
  return (solve.coeffs - round_vector(solve.coeffs)).cwiseAbs().maxCoeff() <= tol.integrality_tol;
}

MergeResult merge_vector(const LatticeBasis& basis, const Vector& v, const Tolerances& tol) {
  require_full_rank(basis, "merge_vector");
  require_dim(basis, v);
  require_finite(v, "merged vector");

  const std::size_t cap = 64 * basis.ambient_dim();
  Matrix b = basis.columns();
  Vector w = v;
  std::size_t swaps = 0;
  Vector a = Eigen::ColPivHouseholderQR<Matrix>(b).solve(w);
  bool fresh = true;
  for (;;) {
    Vector k = round_vector(a);
    Eigen::Index pivot = 0;
    Real worst = (a - k).cwiseAbs().maxCoeff(&pivot);
    if (worst <= tol.integrality_tol) {
      if (fresh) break;
      a = Eigen::ColPivHouseholderQR<Matrix>(b).solve(w);
      fresh = true;
      continue;
    }
    if (swaps >= cap) {
      throw NonConvergenceError(
          "merge_vector did not converge within " + std::to_string(cap) + " swaps", swaps,
          to_double(worst));
    }
    // The remainder w - b*k = b*f replaces the column whose coordinate was
    // farthest from an integer; the covolume shrinks by |f_pivot|.
    const Vector f = a - k;
    Vector remainder = w - b * k;
    w = b.col(pivot);
    b.col(pivot) = std::move(remainder);
    a = -f / f(pivot);
    a(pivot) = 1 / f(pivot);
    fresh = false;
    ++swaps;
  }
  if (swaps == 0) return {basis, 0};
  return {make_basis_unchecked(std::move(b)), swaps};
}

std::vector<std::size_t> select_independent(std::span<const Vector> vectors, double rank_tol,
                                            std::size_t& rank) {
  if (vectors.empty()) throw ContractViolation("no generators");
  const Eigen::Index n = vectors.front().size();
  Matrix g(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) throw ContractViolation("generators have mixed lengths");
    require_finite(vectors[i], "generator");
    g.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(g);
  qr.setThreshold(Real(rank_tol));
  rank = qr.maxPivot() == 0 ? 0 : static_cast<std::size_t>(qr.rank());
  const auto& perm = qr.colsPermutation().indices();
  std::vector<std::size_t> order(static_cast<std::size_t>(perm.size()));
  for (Eigen::Index i = 0; i < perm.size(); ++i) order[static_cast<std::size_t>(i)] = static_cast<std::size_t>(perm(i));
  return order;
}

GeneratedLattice lattice_from_generators(std::span<const Vector> vectors, const Tolerances& tol) {
  std::size_t rank = 0;
  const auto order = select_independent(vectors, tol.rank_tol, rank);
  const auto n = static_cast<std::size_t>(vectors.front().size());
  if (rank < n) {
    Matrix g(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) g.col(static_cast<Eigen::Index>(i)) = vectors[i];
    // Trailing columns of Q span the complement of the generators' span.
    Eigen::ColPivHouseholderQR<Matrix> qr(g);
    const Matrix q = qr.householderQ();
    std::vector<std::vector<double>> unreached;
    for (std::size_t c = rank; c < n; ++c) {
      std::vector<double> dir(n);
      for (std::size_t r = 0; r < n; ++r) {
        dir[r] = to_double(q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      }
      unreached.push_back(std::move(dir));
    }
    throw RankDeficiencyError(n, rank, std::move(unreached));
  }

  Matrix seed(n, n);
  std::vector<bool> in_seed(vectors.size(), false);
  for (std::size_t c = 0; c < n; ++c) {
    seed.col(static_cast<Eigen::Index>(c)) = vectors[order[c]];
    in_seed[order[c]] = true;
  }
  GeneratedLattice out{LatticeBasis(std::move(seed), tol.rank_tol), n, 0};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (in_seed[i]) continue;
    auto merged = merge_vector(out.basis, vectors[i], tol);
    if (merged.swap_count > 0) {
      ++out.used_count;
      out.total_swaps += merged.swap_count;
      out.basis = lll_reduce(merged.basis);
    }
  }
  return out;
}

LatticeBasis lll_reduce(const LatticeBasis& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw ContractViolation("LLL delta must lie in (0.25, 1)");
  Matrix b = basis.columns();
  const Eigen::Index n = b.cols();
  if (n == 1) return basis;

  // Incremental Gram-Schmidt: mu(i, j) for j < i and squared norms sq(i).
  Gso gso(b);
  for (Eigen::Index i = 0; i < n; ++i) gso.update(b, i);
  Matrix mu = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) mu(i, j) = gso.mu(b, i, j);
  Vector sq = gso.sq;

  const Real half(0.5);
  auto reduce = [&](Eigen::Index k, Eigen::Index l) {
    if (abs(mu(k, l)) <= half) return;
    const Real q = round_even(mu(k, l));
    b.col(k) -= q * b.col(l);
    mu(k, l) -= q;
    for (Eigen::Index i = 0; i < l; ++i) mu(k, i) -= q * mu(l, i);
  };

  Eigen::Index k = 1;
  std::size_t iterations = 0;
  while (k < n) {
    if (++iterations > 10'000'000) {
      throw NonConvergenceError("LLL iteration cap reached", iterations, 0.0);
    }
    reduce(k, k - 1);
    const Real m = mu(k, k - 1);
    if (sq(k) < (delta - m * m) * sq(k - 1)) {
      b.col(k).swap(b.col(k - 1));
      for (Eigen::Index j = 0; j < k - 1; ++j) std::swap(mu(k, j), mu(k - 1, j));
      const Real merged = sq(k) + m * m * sq(k - 1);
      mu(k, k - 1) = m * sq(k - 1) / merged;
      sq(k) = sq(k - 1) * sq(k) / merged;
      sq(k - 1) = merged;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const Real t = mu(i, k);
        mu(i, k) = mu(i, k - 1) - m * t;
        mu(i, k - 1) = t + mu(k, k - 1) * mu(i, k);
      }
      k = std::max<Eigen::Index>(k - 1, 1);
      continue;
    }
    for (Eigen::Index l = k - 2; l >= 0; --l) reduce(k, l);
    ++k;
  }
  return make_basis_unchecked(std::move(b));
}

bool is_lll_reduced(const LatticeBasis& basis, double delta, double slack) {
  const Matrix& b = basis.columns();
  const Eigen::Index n = b.cols();
  Gso gso(b);
  for (Eigen::Index k = 0; k < n; ++k) gso.update(b, k);
  for (Eigen::Index k = 1; k < n; ++k) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (abs(gso.mu(b, k, j)) > 0.5 + slack) return false;
    }
    const Real m = gso.mu(b, k, k - 1);
    if (gso.sq(k) < (delta - m * m) * gso.sq(k - 1) * (1.0 - slack)) return false;
  }
  return true;
}

Real determinant(const LatticeBasis& basis) {
  require_full_rank(basis, "determinant");
  Eigen::HouseholderQR<Matrix> qr(basis.columns());
  return qr.matrixQR().diagonal().cwiseAbs().prod();
}

bool same_lattice(const LatticeBasis& a, const LatticeBasis& b, const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim()) return false;
  if (!a.full_rank() || !b.full_rank()) throw UnsupportedQuery("membership requires a full-rank basis");
  auto spans = [&](const LatticeBasis& outer, const Matrix& inner) {
    const Eigen::ColPivHouseholderQR<Matrix> qr(outer.columns());
    const Matrix coeffs = qr.solve(inner);
    const Real scale = outer.columns().colwise().norm().maxCoeff();
    const Vector residuals = (outer.columns() * coeffs - inner).colwise().norm().transpose();
    if (residuals.maxCoeff() > tol.integrality_tol * scale) return false;
    const Matrix rounded = coeffs.unaryExpr([](const Real& x) { return round_even(x); });
    return (coeffs - rounded).cwiseAbs().maxCoeff() <= tol.integrality_tol;
  };
  return spans(a, b.columns()) && spans(b, a.columns());
}

}  // namespace tcid
