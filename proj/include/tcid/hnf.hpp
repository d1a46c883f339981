#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tcid/lattice.hpp"

namespace tcid {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Exact rational matrix, column-major. Used as the reference for lattice
// equality; nothing on the floating-point path depends on it.
class RationalMatrix {
 public:
  RationalMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return entries_[c * rows_ + r]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[c * rows_ + r]; }

  Matrix to_real() const;
  bool operator==(const RationalMatrix& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> entries_;
};

// Column-style Hermite normal form of the lattice generated by the columns:
// lower triangular, positive diagonal, 0 <= H(i, j) < H(i, i) for j < i.
// Canonical, so two generator sets give equal output iff their lattices agree.
// Throws RankDeficiencyError when the columns do not span full rank.
RationalMatrix hnf_exact(const RationalMatrix& generators);

// Product of the diagonal of a triangular basis.
Rational triangular_determinant(const RationalMatrix& hnf);

// Exact membership of v in the lattice of a full-rank HNF basis.
bool hnf_contains(const RationalMatrix& hnf, const std::vector<Rational>& v);

}  // namespace tcid
