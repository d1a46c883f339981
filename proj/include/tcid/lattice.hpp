#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tcid/real.hpp"

namespace tcid {

struct Tolerances {
  double integrality_tol = 1e-6;  // max distance of a coordinate from an integer
  double rank_tol = 1e-10;        // relative singular-value threshold
  double orth_tol = 1e-8;         // relative Gram off-diagonal threshold

  // Throws ConfigError unless every field lies in (0, 0.5).
  void validate() const;
};

// A set of linearly independent columns in R^ambient_dim. Construction checks
// finiteness and independence (sigma_min > rank_tol * sigma_max).
class LatticeBasis {
 public:
  explicit LatticeBasis(Matrix columns, double rank_tol = Tolerances{}.rank_tol);

  std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(columns_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(columns_.cols()); }
  bool full_rank() const noexcept { return rank() == ambient_dim(); }
  const Matrix& columns() const noexcept { return columns_; }
  Vector column(std::size_t j) const { return columns_.col(static_cast<Eigen::Index>(j)); }

 private:
  struct Unchecked {};
  LatticeBasis(Matrix columns, Unchecked) : columns_(std::move(columns)) {}
  friend LatticeBasis make_basis_unchecked(Matrix columns);

  Matrix columns_;
};

// Internal escape hatch for callers that preserve independence by construction
// (unimodular updates of an already valid basis).
LatticeBasis make_basis_unchecked(Matrix columns);

struct CoordinateSolve {
  Vector coeffs;
  Real residual_norm = 0;
};

// Least-squares coordinates of v in the basis via column-pivoted QR.
CoordinateSolve solve_coordinates(const LatticeBasis& basis, const Vector& v);

// True iff v is (numerically) an integer combination of the basis columns.
// Requires a full-rank basis.
bool contains(const LatticeBasis& basis, const Vector& v, const Tolerances& tol = {});

// Largest |a_k - round(a_k)| over the coordinates of v. Full rank only.
Real integrality_gap(const LatticeBasis& basis, const Vector& v);

struct MergeResult {
  LatticeBasis basis;
  std::size_t swap_count = 0;
};

// Generalized Euclid step: returns a basis of the lattice generated by the
// columns of `basis` together with v. Each swap replaces the column with the
// largest fractional coordinate by the reduced remainder, shrinking the
// covolume by that fraction (<= 1/2).
MergeResult merge_vector(const LatticeBasis& basis, const Vector& v, const Tolerances& tol = {});

struct GeneratedLattice {
  LatticeBasis basis;
  std::size_t used_count = 0;  // generators that changed the lattice (seed included)
  std::size_t total_swaps = 0;
};

// Basis of the lattice generated by `vectors`. The seed basis is the N most
// independent generators (pivoted QR); the rest are merged in input order.
// Throws RankDeficiencyError when the generators do not span R^N.
GeneratedLattice lattice_from_generators(std::span<const Vector> vectors, const Tolerances& tol = {});

// Indices of the most independent generators, in pivoted-QR order. Only the
// first `rank` entries are independent; `rank` is the numerical rank.
std::vector<std::size_t> select_independent(std::span<const Vector> vectors, double rank_tol,
                                            std::size_t& rank);

// LLL reduction with Lovasz parameter delta in (0.25, 1).
LatticeBasis lll_reduce(const LatticeBasis& basis, double delta = 0.75);

// Size-reduced and Lovasz conditions, checked with a small slack.
bool is_lll_reduced(const LatticeBasis& basis, double delta, double slack = 1e-9);

// Lattice covolume: product of |R_ii| from a QR factorization.
Real determinant(const LatticeBasis& basis);

// Both bases contain every column of the other.
bool same_lattice(const LatticeBasis& a, const LatticeBasis& b, const Tolerances& tol = {});

}  // namespace tcid
