#include "tcid/hnf.hpp"

#include <utility>

#include "tcid/errors.hpp"

namespace tcid {
namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

using IntColumns = std::vector<std::vector<Integer>>;

void axpy(std::vector<Integer>& dst, const Integer& q, const std::vector<Integer>& src) {
  for (std::size_t r = 0; r < dst.size(); ++r) dst[r] -= q * src[r];
}

}  // namespace

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

Matrix RationalMatrix::to_real() const {
  Matrix out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r) {
      const Rational& q = (*this)(r, c);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Real(boost::multiprecision::numerator(q).str()) /
          Real(boost::multiprecision::denominator(q).str());
    }
  return out;
}

RationalMatrix hnf_exact(const RationalMatrix& generators) {
  const std::size_t n = generators.rows();
  const std::size_t p = generators.cols();
  if (n == 0 || p == 0) throw ContractViolation("empty generator matrix");

  Integer scale = 1;
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t r = 0; r < n; ++r) {
      const Integer d = boost::multiprecision::denominator(generators(r, c));
      scale = boost::multiprecision::lcm(scale, d);
    }

  IntColumns cols(p, std::vector<Integer>(n));
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t r = 0; r < n; ++r) {
      const Rational scaled = generators(r, c) * Rational(scale);
      cols[c][r] = boost::multiprecision::numerator(scaled);
    }

  for (std::size_t i = 0; i < n; ++i) {
    // Euclid on row i across columns i..p-1 until only column i is nonzero.
    for (;;) {
      std::size_t best = p;
      for (std::size_t c = i; c < p; ++c) {
        if (cols[c][i] == 0) continue;
        if (best == p || abs(cols[c][i]) < abs(cols[best][i])) best = c;
      }
      if (best == p) throw RankDeficiencyError(n, i);
      std::swap(cols[i], cols[best]);
      bool done = true;
      for (std::size_t c = i + 1; c < p; ++c) {
        if (cols[c][i] == 0) continue;
        axpy(cols[c], floor_div(cols[c][i], cols[i][i]), cols[i]);
        if (cols[c][i] != 0) done = false;
      }
      if (done) break;
    }
    if (cols[i][i] < 0)
      for (auto& x : cols[i]) x = -x;
    for (std::size_t c = 0; c < i; ++c) {
      const Integer q = floor_div(cols[c][i], cols[i][i]);
      if (q != 0) axpy(cols[c], q, cols[i]);
    }
  }

  RationalMatrix out(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) out(r, c) = Rational(cols[c][r], scale);
  return out;
}

Rational triangular_determinant(const RationalMatrix& hnf) {
  Rational det = 1;
  for (std::size_t i = 0; i < hnf.rows() && i < hnf.cols(); ++i) det *= hnf(i, i);
  return det;
}

bool hnf_contains(const RationalMatrix& hnf, const std::vector<Rational>& v) {
  const std::size_t n = hnf.rows();
  if (hnf.cols() != n || v.size() != n) throw ContractViolation("hnf_contains: shape mismatch");
  std::vector<Rational> rest = v;
  for (std::size_t i = 0; i < n; ++i) {
    const Rational coeff = rest[i] / hnf(i, i);
    if (boost::multiprecision::denominator(coeff) != 1) return false;
    for (std::size_t r = i; r < n; ++r) rest[r] -= coeff * hnf(r, i);
  }
  return true;
}

}  // namespace tcid
