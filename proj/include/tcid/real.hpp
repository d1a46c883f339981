#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#ifndef TCID_REAL_DIGITS
#define TCID_REAL_DIGITS 120
#endif

namespace tcid {

// Working precision of the identification pipeline. The generalized Euclid
// merge amplifies input rounding by the index of the seed sublattice, which
// grows exponentially with the dimension, so double precision is not enough.
inline constexpr unsigned kRealDigits10 = TCID_REAL_DIGITS;

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<kRealDigits10, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

// Column-major dense storage throughout; lattice generators are columns.
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Nearest integer, ties to even.
Real round_even(const Real& x);

inline double to_double(const Real& x) { return x.convert_to<double>(); }

// Decimal text with `digits` significant digits (0 = full working precision).
std::string format_real(const Real& x, unsigned digits = 0);

// Throws ParseError (line 0) on malformed text.
Real parse_real(std::string_view text);

}  // namespace tcid
