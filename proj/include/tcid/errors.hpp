#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tcid {

// Base of every error raised by the library. The CLI maps subclasses onto
// stable exit codes (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition (dimension mismatch, non-finite input, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Membership queried on a rank-deficient basis.
class UnsupportedQuery : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The generators span fewer than `ambient_dim` dimensions. `deficiency` is the
// number of directions that no observation reaches.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t ambient_dim, std::size_t rank,
                      std::vector<std::vector<double>> unreached = {})
      : Error("generator set has rank " + std::to_string(rank) + " < " +
              std::to_string(ambient_dim) + " (" + std::to_string(ambient_dim - rank) +
              " unidentifiable dimension(s))"),
        ambient_dim_(ambient_dim),
        rank_(rank),
        unreached_(std::move(unreached)) {}
  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t deficiency() const noexcept { return ambient_dim_ - rank_; }
  // Orthonormal directions spanning the complement of the generators' span.
  const std::vector<std::vector<double>>& unreached_directions() const noexcept {
    return unreached_;
  }

 private:
  std::size_t ambient_dim_;
  std::size_t rank_;
  std::vector<std::vector<double>> unreached_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::size_t swaps, double last_fraction)
      : Error(what), swaps_(swaps), last_fraction_(last_fraction) {}
  std::size_t swaps() const noexcept { return swaps_; }
  double last_fraction() const noexcept { return last_fraction_; }

 private:
  std::size_t swaps_;
  double last_fraction_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcid
