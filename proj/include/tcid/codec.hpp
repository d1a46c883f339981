#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcid/lattice.hpp"

namespace tcid {

enum class TransformKind { Dct2, Hadamard, Identity, RandomOrthonormal };

std::string_view to_string(TransformKind kind);
// Accepts "dct2", "hadamard", "identity", "random". Throws ConfigError.
TransformKind parse_transform_kind(std::string_view name);

struct TransformSpec {
  TransformKind kind = TransformKind::Dct2;
  std::size_t size = 8;
  std::uint64_t seed = 0;  // RandomOrthonormal only

  void validate() const;
};

struct QuantizerSpec {
  Vector steps;

  void validate() const;
};

struct SourceSpec {
  double correlation = 0.9;
  double variance = 1e4;
  std::uint64_t seed = 0;

  void validate() const;
};

// Ground truth of one coder: rows of `transform` are the analysis basis.
struct CoderConfig {
  TransformSpec transform;
  QuantizerSpec quantizer;

  void validate() const;
};

// Orthonormal analysis matrix T (coefficients = T * x).
Matrix build_transform(const TransformSpec& spec);

using IndexVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

// q_k = round_half_even((T x)_k / step_k).
IndexVector encode_block(const Vector& x, const Matrix& transform, const Vector& steps);
IndexVector encode_block(const Vector& x, const CoderConfig& config);

// x = T^T diag(steps) q.
Vector decode_block(const IndexVector& q, const Matrix& transform, const Vector& steps);
Vector decode_block(const IndexVector& q, const CoderConfig& config);

// T^T diag(steps): every decoded vector is an integer combination of its columns.
Matrix coding_lattice_basis(const Matrix& transform, const Vector& steps);

struct Simulation {
  std::vector<Vector> observations;
  std::vector<IndexVector> indices;
  CoderConfig ground_truth;
  Matrix transform;
  LatticeBasis realized_basis;
};

// One stationary AR(1) stream of length num_blocks * N, cut into consecutive
// blocks, each passed through encode/decode.
Simulation simulate(const SourceSpec& source, const CoderConfig& config, std::size_t num_blocks);

// Log-uniform draw of `n` steps on [lo, hi].
Vector sample_log_uniform_steps(std::size_t n, double lo, double hi, std::uint64_t seed);

}  // namespace tcid
