#include "tcid/real.hpp"

#include <cctype>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tcid/errors.hpp"

namespace tcid {

Real round_even(const Real& x) {
  const Real nearest = boost::multiprecision::round(x);  // ties away from zero
  if (boost::multiprecision::abs(x - boost::multiprecision::trunc(x)) == Real(0.5)) {
    return 2 * boost::multiprecision::round(x / 2);
  }
  return nearest;
}

std::string format_real(const Real& x, unsigned digits) {
  std::ostringstream out;
  out << std::setprecision(static_cast<int>(digits == 0 ? kRealDigits10 : digits)) << x;
  return out.str();
}

Real parse_real(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty numeric field", 0);
  // Reject anything the C locale would not read as a single decimal number.
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' ||
          c == 'e' || c == 'E')) {
      throw ParseError("malformed number '" + std::string(text) + "'", 0);
    }
  }
  try {
    Real value(std::string{text});
    if (!boost::multiprecision::isfinite(value)) throw ParseError("non-finite number", 0);
    // Rank checks run in double precision, so values must fit a double.
    if (abs(value) > std::numeric_limits<double>::max()) {
      throw ParseError("number out of range '" + std::string(text) + "'", 0);
    }
    return value;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + std::string(text) + "'", 0);
  }
}

}  // namespace tcid
