#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tcid/codec.hpp"
#include "tcid/lattice.hpp"

namespace tcid {

// Above this max-abs deviation the best dictionary candidate is reported as
// an unknown transform.
inline constexpr double kUnknownTransformThreshold = 1e-3;

// Candidate errors closer than this are ties, resolved in dictionary order.
inline constexpr double kMatchTieTolerance = 1e-12;

// LLL parameter used before the pairwise orthogonalizing sweeps.
inline constexpr double kDecomposeLllDelta = 0.99;

struct IdentificationResult {
  LatticeBasis lattice;
  std::size_t num_observations = 0;
  Real determinant = 0;
  std::optional<Vector> steps_estimate;      // descending
  std::optional<Matrix> transform_estimate;  // row k pairs with steps_estimate(k)
  bool orthogonal_decomposition_ok = false;
  std::size_t swap_count = 0;
  Real max_membership_residual = 0;
};

struct CandidateScore {
  TransformSpec spec;
  double max_abs_error = 0.0;
  // Entry k is +/-(j + 1): estimated row k equals sign * dictionary row j.
  std::vector<int> signed_permutation;
};

struct DictionaryMatch {
  TransformSpec best;
  std::vector<int> signed_permutation;
  double max_abs_error = 0.0;
  bool known = false;  // max_abs_error <= kUnknownTransformThreshold
  std::vector<CandidateScore> candidates;
};

struct Decomposition {
  LatticeBasis basis;
  bool ok = false;
};

struct TransformEstimate {
  Matrix transform;
  Vector steps;
};

struct Identification {
  IdentificationResult result;
  std::optional<DictionaryMatch> match;
};

// Lattice generated by the observations (see lattice_from_generators).
GeneratedLattice identify_lattice(std::span<const Vector> observations, const Tolerances& tol = {});

// Searches for an orthogonal-column basis of the same lattice. `ok` reports
// whether every pair of columns is orthogonal to orth_tol.
Decomposition orthogonal_decompose(const LatticeBasis& basis, const Tolerances& tol = {});

bool columns_orthogonal(const Matrix& columns, double orth_tol);

// Splits an orthogonal basis into unit directions (rows of the transform) and
// their lengths (steps). Canonical form: each row's largest-magnitude entry is
// positive, rows ordered by descending step with index-order tie-break.
TransformEstimate extract_transform_and_steps(const LatticeBasis& orth_basis);

// Greedy signed-permutation matching of the estimated rows against each
// candidate; returns the candidate with the smallest max deviation.
DictionaryMatch match_dictionary(const Matrix& transform_estimate,
                                 std::span<const TransformSpec> dictionary);

// Score of a single candidate matrix (rows are the dictionary basis).
CandidateScore score_candidate(const Matrix& transform_estimate, const Matrix& candidate);

// dct2, hadamard (power-of-two sizes only) and identity at size n.
std::vector<TransformSpec> default_dictionary(std::size_t n);

Identification identify(std::span<const Vector> observations, const Tolerances& tol = {},
                        std::span<const TransformSpec> dictionary = {});

}  // namespace tcid
