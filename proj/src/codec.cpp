#include "tcid/codec.hpp"

#include <cmath>
#include <random>

#include <boost/math/constants/constants.hpp>

#include "tcid/errors.hpp"

namespace tcid {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Dct2: return "dct2";
    case TransformKind::Hadamard: return "hadamard";
    case TransformKind::Identity: return "identity";
    case TransformKind::RandomOrthonormal: return "random";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "dct2" || name == "dct") return TransformKind::Dct2;
  if (name == "hadamard") return TransformKind::Hadamard;
  if (name == "identity") return TransformKind::Identity;
  if (name == "random") return TransformKind::RandomOrthonormal;
  throw ConfigError("unknown transform kind '" + std::string(name) + "'");
}

void TransformSpec::validate() const {
  if (size < 1) throw ConfigError("transform size must be >= 1");
  if (kind == TransformKind::Hadamard && (size & (size - 1)) != 0) {
    throw ConfigError("Hadamard transform requires a power-of-two size, got " + std::to_string(size));
  }
}

void QuantizerSpec::validate() const {
  if (steps.size() < 1) throw ConfigError("quantizer needs at least one step");
  for (Eigen::Index k = 0; k < steps.size(); ++k) {
    if (!boost::multiprecision::isfinite(steps(k)) || !(steps(k) > 0)) {
      throw ConfigError("quantization steps must be finite and positive");
    }
  }
}

void SourceSpec::validate() const {
  if (!(std::abs(correlation) < 1.0)) throw ConfigError("AR(1) correlation must satisfy |rho| < 1");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw ConfigError("source variance must be positive");
}

void CoderConfig::validate() const {
  transform.validate();
  quantizer.validate();
  if (static_cast<std::size_t>(quantizer.steps.size()) != transform.size) {
    throw ConfigError("transform size " + std::to_string(transform.size) + " does not match " +
                      std::to_string(quantizer.steps.size()) + " quantization steps");
  }
}

Matrix build_transform(const TransformSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.size);
  switch (spec.kind) {
    case TransformKind::Identity:
      return Matrix::Identity(n, n);
    case TransformKind::Dct2: {
      Matrix t(n, n);
      const Real nd(n);
      const Real pi = boost::math::constants::pi<Real>();
      for (Eigen::Index k = 0; k < n; ++k) {
        const Real scale = sqrt((k == 0 ? Real(1) : Real(2)) / nd);
        for (Eigen::Index i = 0; i < n; ++i) {
          t(k, i) = scale * cos(pi * Real(2 * i + 1) * Real(k) / (2 * nd));
        }
      }
      return t;
    }
    case TransformKind::Hadamard: {
      Matrix h = Matrix::Ones(1, 1);
      while (h.rows() < n) {
        const Eigen::Index m = h.rows();
        Matrix next(2 * m, 2 * m);
        next << h, h, h, -h;
        h = std::move(next);
      }
      return h / sqrt(Real(n));
    }
    case TransformKind::RandomOrthonormal: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal;
      Matrix g(n, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) g(r, c) = Real(normal(rng));
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ();
      // Fix signs so the factor is unique (positive diagonal of R).
      for (Eigen::Index c = 0; c < n; ++c) {
        if (qr.matrixQR()(c, c) < 0) q.col(c) = -q.col(c);
      }
      return q;
    }
  }
  throw ConfigError("unhandled transform kind");
}

IndexVector encode_block(const Vector& x, const Matrix& transform, const Vector& steps) {
  if (x.size() != transform.cols() || steps.size() != transform.rows()) {
    throw ContractViolation("encode_block: dimension mismatch");
  }
  const Vector coeffs = (transform * x).cwiseQuotient(steps);
  IndexVector q(coeffs.size());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    q(k) = round_even(coeffs(k)).convert_to<long long>();
  }
  return q;
}

IndexVector encode_block(const Vector& x, const CoderConfig& config) {
  return encode_block(x, build_transform(config.transform), config.quantizer.steps);
}

Vector decode_block(const IndexVector& q, const Matrix& transform, const Vector& steps) {
  if (q.size() != transform.rows() || steps.size() != transform.rows()) {
    throw ContractViolation("decode_block: dimension mismatch");
  }
  Vector levels(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) levels(k) = steps(k) * Real(q(k));
  return transform.transpose() * levels;
}

Vector decode_block(const IndexVector& q, const CoderConfig& config) {
  return decode_block(q, build_transform(config.transform), config.quantizer.steps);
}

Matrix coding_lattice_basis(const Matrix& transform, const Vector& steps) {
  return transform.transpose() * steps.asDiagonal();
}

Simulation simulate(const SourceSpec& source, const CoderConfig& config, std::size_t num_blocks) {
  if (num_blocks < 1) throw ContractViolation("simulate requires at least one block");
  source.validate();
  config.validate();
  const Matrix t = build_transform(config.transform);
  const Vector& steps = config.quantizer.steps;
  const auto n = static_cast<Eigen::Index>(config.transform.size);

  std::mt19937_64 rng(source.seed);
  std::normal_distribution<double> normal;
  const double sigma = std::sqrt(source.variance);
  const double rho = source.correlation;
  const double innovation = sigma * std::sqrt(1.0 - rho * rho);
  double prev = sigma * normal(rng);

  Simulation sim{{}, {}, config, t, LatticeBasis(coding_lattice_basis(t, steps))};
  sim.observations.reserve(num_blocks);
  sim.indices.reserve(num_blocks);
  Vector block(n);
  bool first = true;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!first) prev = rho * prev + innovation * normal(rng);
      first = false;
      block(i) = Real(prev);
    }
    IndexVector q = encode_block(block, t, steps);
    sim.observations.push_back(decode_block(q, t, steps));
    sim.indices.push_back(std::move(q));
  }
  return sim;
}

Vector sample_log_uniform_steps(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("step range must satisfy 0 < lo <= hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  Vector steps(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < steps.size(); ++k) steps(k) = Real(std::exp(u(rng)));
  return steps;
}

}  // namespace tcid
