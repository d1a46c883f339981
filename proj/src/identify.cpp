#include "tcid/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tcid/errors.hpp"

namespace tcid {

using boost::multiprecision::abs;

GeneratedLattice identify_lattice(std::span<const Vector> observations, const Tolerances& tol) {
  if (observations.empty()) throw ContractViolation("identify_lattice: no observations");
  return lattice_from_generators(observations, tol);
}

bool columns_orthogonal(const Matrix& columns, double orth_tol) {
  const Matrix gram = columns.transpose() * columns;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      if (abs(gram(i, j)) > orth_tol * sqrt(gram(i, i) * gram(j, j))) return false;
    }
  return true;
}

Decomposition orthogonal_decompose(const LatticeBasis& basis, const Tolerances& tol) {
  if (!basis.full_rank()) throw ContractViolation("orthogonal_decompose requires a full-rank basis");
  Matrix b = lll_reduce(basis, kDecomposeLllDelta).columns();
  const Eigen::Index n = b.cols();

  // Pairwise Lagrange steps: b_j -= round(<b_j,b_i>/<b_i,b_i>) b_i while it shortens b_j.
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool improved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real ii = b.col(i).squaredNorm();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const Real q = round_even(b.col(j).dot(b.col(i)) / ii);
        if (q == 0) continue;
        const Vector candidate = b.col(j) - q * b.col(i);
        if (candidate.squaredNorm() < b.col(j).squaredNorm() * (1.0 - 1e-12)) {
          b.col(j) = candidate;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  const bool ok = columns_orthogonal(b, tol.orth_tol);
  return {make_basis_unchecked(std::move(b)), ok};
}

TransformEstimate extract_transform_and_steps(const LatticeBasis& orth_basis) {
  const Matrix& b = orth_basis.columns();
  const Eigen::Index n = b.cols();
  Vector norms = b.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(norms(k) > 0)) throw ContractViolation("zero-length basis column");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index c) { return norms(a) > norms(c); });

  TransformEstimate out{Matrix(n, b.rows()), Vector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    Vector dir = b.col(src) / norms(src);
    // First entry within rounding of the largest magnitude decides the sign.
    const Real peak = dir.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
      if (abs(dir(i)) >= peak * (1.0 - 1e-9)) {
        if (dir(i) < 0) dir = -dir;
        break;
      }
    }
    out.steps(k) = norms(src);
    out.transform.row(k) = dir.transpose();
  }
  return out;
}

CandidateScore score_candidate(const Matrix& estimate, const Matrix& candidate) {
  if (estimate.rows() != candidate.rows() || estimate.cols() != candidate.cols()) {
    throw ConfigError("dictionary candidate size does not match the estimated transform");
  }
  const Eigen::Index n = estimate.rows();
  const Matrix inner = estimate * candidate.transpose();

  struct Pair {
    Real weight;
    Eigen::Index est;
    Eigen::Index dict;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) pairs.push_back({abs(inner(i, j)), i, j});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.weight > b.weight; });

  CandidateScore score;
  score.signed_permutation.assign(static_cast<std::size_t>(n), 0);
  std::vector<bool> dict_used(static_cast<std::size_t>(n), false);
  std::size_t assigned = 0;
  for (const auto& p : pairs) {
    auto& slot = score.signed_permutation[static_cast<std::size_t>(p.est)];
    if (slot != 0 || dict_used[static_cast<std::size_t>(p.dict)]) continue;
    const int sign = inner(p.est, p.dict) < 0 ? -1 : 1;
    slot = sign * static_cast<int>(p.dict + 1);
    dict_used[static_cast<std::size_t>(p.dict)] = true;
    if (++assigned == static_cast<std::size_t>(n)) break;
  }

  Real worst = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int entry = score.signed_permutation[static_cast<std::size_t>(i)];
    const Real sign = entry < 0 ? -1 : 1;
    const Eigen::Index j = std::abs(entry) - 1;
    worst = std::max(worst, Real((estimate.row(i) - sign * candidate.row(j)).cwiseAbs().maxCoeff()));
  }
  score.max_abs_error = to_double(worst);
  return score;
}

DictionaryMatch match_dictionary(const Matrix& transform_estimate,
                                 std::span<const TransformSpec> dictionary) {
  if (dictionary.empty()) throw ConfigError("empty transform dictionary");
  DictionaryMatch out;
  out.max_abs_error = std::numeric_limits<double>::infinity();
  for (const auto& spec : dictionary) {
    CandidateScore score = score_candidate(transform_estimate, build_transform(spec));
    score.spec = spec;
    // Candidates that coincide (dct2 and hadamard at n = 2) differ only by
    // rounding noise, so the earlier dictionary entry wins near-ties.
    if (score.max_abs_error < out.max_abs_error - kMatchTieTolerance) {
      out.best = spec;
      out.max_abs_error = score.max_abs_error;
      out.signed_permutation = score.signed_permutation;
    }
    out.candidates.push_back(std::move(score));
  }
  out.known = out.max_abs_error <= kUnknownTransformThreshold;
  return out;
}

std::vector<TransformSpec> default_dictionary(std::size_t n) {
  std::vector<TransformSpec> dict{{TransformKind::Dct2, n, 0}};
  if ((n & (n - 1)) == 0) dict.push_back({TransformKind::Hadamard, n, 0});
  dict.push_back({TransformKind::Identity, n, 0});
  return dict;
}

Identification identify(std::span<const Vector> observations, const Tolerances& tol,
                        std::span<const TransformSpec> dictionary) {
  tol.validate();
  GeneratedLattice generated = identify_lattice(observations, tol);
  Decomposition decomposition = orthogonal_decompose(generated.basis, tol);

  Identification out{IdentificationResult{decomposition.basis}, std::nullopt};
  IdentificationResult& r = out.result;
  r.num_observations = observations.size();
  r.swap_count = generated.total_swaps;
  r.orthogonal_decomposition_ok = decomposition.ok;
  if (decomposition.ok) {
    TransformEstimate est = extract_transform_and_steps(decomposition.basis);
    r.lattice = make_basis_unchecked(coding_lattice_basis(est.transform, est.steps));
    if (!dictionary.empty()) out.match = match_dictionary(est.transform, dictionary);
    r.steps_estimate = std::move(est.steps);
    r.transform_estimate = std::move(est.transform);
  } else {
    r.lattice = lll_reduce(decomposition.basis, kDecomposeLllDelta);
  }
  r.determinant = determinant(r.lattice);
  for (const auto& v : observations) {
    r.max_membership_residual = std::max(r.max_membership_residual, integrality_gap(r.lattice, v));
  }
  return out;
}

}  // namespace tcid
