// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "tcid/cli.hpp"
#include "tcid/errors.hpp"
#include "tcid/experiments.hpp"
#include "tcid/hnf.hpp"
#include "tcid/identify.hpp"

using namespace tcid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Real exact_to_real(const Rational& q) {
  return Real(boost::multiprecision::numerator(q).str()) /
         Real(boost::multiprecision::denominator(q).str());
}

struct Verdict {
  bool pass;
  std::string detail;
};

// 1-D, P = 2: the identified step equals the common factor of the two values.
Verdict euclid_coincidence() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<long long> coef(-10000, 10000);
  std::uniform_real_distribution<double> log_step(std::log(1e-3), std::log(1e3));
  const int cases = 1000;
  int ok = 0;
  double worst = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < cases; ++i) {
    long long a = 0, b = 0;
    do {
      a = coef(rng);
      b = coef(rng);
    } while (oracle::gcd_all({a, b}) != 1);
    const Real step = std::exp(log_step(rng));
    const std::vector<Vector> obs = {Vector::Constant(1, a * step), Vector::Constant(1, b * step)};
    try {
      const auto id = identify(obs);
      if (!id.result.steps_estimate) continue;
      const double rel = to_double(abs((*id.result.steps_estimate)(0) - step) / step);
      worst = std::max(worst, rel);
      ok += rel <= 1e-10;
    } catch (const Error&) {
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream s;
  s << ok << "/" << cases << " within 1e-10 (worst " << worst << "), " << secs << " s";
  return {ok == cases && secs < 1.0, s.str()};
}

// Float merge pipeline against the exact Hermite normal form.
Verdict oracle_equivalence() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> dim(1, 4), extra(0, 5);
  const int sets = 500;
  int checked = 0, ok = 0;
  const auto t0 = Clock::now();
  while (checked < sets) {
    const std::size_t n = dim(rng);
    const RationalMatrix g = oracle::random_rational_generators(n, n + extra(rng), rng);
    RationalMatrix h(1, 1);
    try {
      h = hnf_exact(g);
    } catch (const RankDeficiencyError&) {
      continue;
    }
    ++checked;
    const Matrix real = g.to_real();
    std::vector<Vector> cols;
    for (Eigen::Index c = 0; c < real.cols(); ++c) cols.emplace_back(real.col(c));
    try {
      const auto out = lattice_from_generators(cols);
      const LatticeBasis exact(h.to_real());
      const Real det_exact = exact_to_real(triangular_determinant(h));
      ok += same_lattice(out.basis, exact) &&
            abs(determinant(out.basis) - det_exact) <= 1e-9 * det_exact;
    } catch (const Error&) {
    }
  }
  std::ostringstream s;
  s << ok << "/" << sets << " sets match, " << seconds_since(t0) << " s";
  return {ok == sets, s.str()};
}

// Largest deviation of the estimated rows/steps from the truth, matching each
// estimated row to the truth row it is most parallel to.
struct RoundTripError {
  double step_rel = 0;
  double transform_abs = 0;
};

RoundTripError compare_estimate(const Matrix& t_hat, const Vector& s_hat, const Matrix& t,
                                const Vector& steps) {
  RoundTripError e;
  std::vector<bool> used(static_cast<std::size_t>(t.rows()), false);
  for (Eigen::Index k = 0; k < t_hat.rows(); ++k) {
    Eigen::Index best = -1;
    double best_dot = -1;
    for (Eigen::Index j = 0; j < t.rows(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(to_double(t_hat.row(k).dot(t.row(j))));
      if (d > best_dot) {
        best_dot = d;
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    const double sign = to_double(t_hat.row(k).dot(t.row(best))) < 0 ? -1.0 : 1.0;
    e.transform_abs = std::max(
        e.transform_abs, to_double((t_hat.row(k) - sign * t.row(best)).cwiseAbs().maxCoeff()));
    e.step_rel = std::max(e.step_rel, to_double(abs(s_hat(k) - steps(best)) / steps(best)));
  }
  return e;
}

Verdict round_trip() {
  const std::size_t n = 8, p = 16, trials = 200;
  const Matrix dct = build_transform({TransformKind::Dct2, n, 0});
  int ok = 0;
  double worst_step = 0, worst_t = 0;
  bool estimates_ok = true;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t seed = 3000 + i;
    const Vector steps = sample_log_uniform_steps(n, 0.1, 10, seed);
    const CoderConfig coder{{TransformKind::Dct2, n, 0}, {steps}};
    const auto sim = simulate(SourceSpec{0.9, 1e4, seed ^ 0x5a5a5a5aULL}, coder, p);
    const LatticeBasis truth(coding_lattice_basis(dct, steps));
    try {
      const auto id = identify(sim.observations);
      if (!same_lattice(id.result.lattice, truth)) continue;
      ++ok;
      if (!id.result.transform_estimate || !id.result.steps_estimate) {
        estimates_ok = false;
        continue;
      }
      const auto e = compare_estimate(*id.result.transform_estimate, *id.result.steps_estimate, dct, steps);
      worst_step = std::max(worst_step, e.step_rel);
      worst_t = std::max(worst_t, e.transform_abs);
    } catch (const Error&) {
    }
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(ok) / trials;
  std::ostringstream s;
  s << "success " << rate << ", worst step rel " << worst_step << ", worst transform abs " << worst_t
    << ", " << secs << " s";
  return {rate >= 0.99 && estimates_ok && worst_step <= 1e-6 && worst_t <= 1e-6 && secs < 60, s.str()};
}

Verdict failure_decay() {
  const std::size_t trials = 200;
  const auto rows = run_success_curve(8, 0, 10, trials, ExperimentConfig{}, 404);
  std::vector<double> rate;
  for (const auto& r : rows) rate.push_back(r.success_rate);
  bool monotone = true;
  for (std::size_t i = 0; i < rate.size(); ++i)
    for (std::size_t j = i + 1; j < rate.size(); ++j) monotone = monotone && rate[j] >= rate[i] - 0.05;
  std::vector<double> xs, ys;
  for (std::size_t e = 0; e < rate.size(); ++e) {
    if (rate[e] < 1.0) {
      xs.push_back(static_cast<double>(e));
      ys.push_back(std::log(1.0 - rate[e]));
    }
  }
  const bool have_fit = xs.size() >= 2;
  const double slope = have_fit ? oracle::fit_line(xs, ys).slope : 0.0;
  std::ostringstream s;
  s << "rates";
  for (double r : rate) s << " " << r;
  s << "; log-failure slope " << (have_fit ? std::to_string(slope) : "n/a");
  const bool pass = monotone && rate[0] <= 0.05 && rate[8] >= 0.99 && have_fit && slope < 0;
  return {pass, s.str()};
}

Verdict work_scaling() {
  ExperimentConfig config;
  config.measure_time = true;
  const std::vector<std::size_t> dims = {4, 8, 16, 32};
  const auto rows = run_scaling(dims, 8, 60, config, 505);
  std::vector<double> xs, ys;
  std::ostringstream s;
  for (const auto& r : rows) {
    xs.push_back(static_cast<double>(r.dim));
    ys.push_back(r.mean_swaps);
    s << "N=" << r.dim << " swaps " << r.mean_swaps << " time " << r.mean_time_ms.value_or(0) << " ms; ";
  }
  const auto fit = oracle::fit_line(xs, ys);
  const double swaps16 = ys[2], swaps32 = ys[3];
  s << "R^2 " << fit.r2 << ", swaps(32)/swaps(16) " << swaps32 / swaps16;
  return {fit.r2 >= 0.9 && swaps32 <= 6 * swaps16, s.str()};
}

Verdict invariant_suites() {
  const std::uint64_t seeds = 200;
  const std::vector<std::pair<const char*, props::Failure (*)(std::uint64_t)>> suites = {
      {"MERGE-MONOTONE", props::check_merge_monotone},
      {"MERGE-CONTAIN", props::check_merge_contain},
      {"MERGE-TERMINATION", props::check_merge_termination},
      {"LLL-SOUND", props::check_lll_sound},
      {"SIGNED-PERMUTATION-INVARIANCE", props::check_signed_permutation_invariance},
      {"SCALE-EQUIVARIANCE", props::check_scale_equivariance},
      {"IDEMPOTENT-REQUANT", props::check_idempotent_requant},
  };
  bool pass = true;
  std::ostringstream s;
  for (const auto& [name, check] : suites) {
    std::uint64_t ok = 0;
    std::string first;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      const auto f = check(seed);
      if (!f) {
        ++ok;
      } else if (first.empty()) {
        first = *f;
      }
    }
    pass = pass && ok == seeds;
    s << name << " " << ok << "/" << seeds << (first.empty() ? "" : " [" + first + "]") << "; ";
  }
  return {pass, s.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "tcid_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  std::ostringstream sink;
  const std::vector<std::string> base = {"experiment", "--dims", "4,8", "--excess", "0:6",
                                         "--trials", "30", "--seed", "77", "--out"};
  auto args_a = base, args_b = base;
  args_a.push_back(a);
  args_b.push_back(b);
  const int ca = run_cli(args_a, sink, sink);
  const int cb = run_cli(args_b, sink, sink);
  const std::string ta = slurp(a), tb = slurp(b);
  std::filesystem::remove_all(dir);
  std::ostringstream s;
  s << "exit codes " << ca << "/" << cb << ", " << ta.size() << " bytes, "
    << (ta == tb ? "identical" : "different");
  return {ca == 0 && cb == 0 && !ta.empty() && ta == tb, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 euclid-coincidence", euclid_coincidence},
      {"2 oracle-equivalence", oracle_equivalence},
      {"3 round-trip-excess-8", round_trip},
      {"4 failure-decay", failure_decay},
      {"5 work-scaling", work_scaling},
      {"6 invariant-suites", invariant_suites},
      {"7 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v{false, ""};
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return failed ? 1 : 0;
}
