#include "tcid/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>

#include "tcid/errors.hpp"
#include "tcid/identify.hpp"

namespace tcid {
namespace {

using boost::multiprecision::abs;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void ExperimentConfig::validate_for(std::size_t dim) const {
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  TransformSpec{transform, dim, 0}.validate();
  if (!(step_lo > 0.0) || !(step_hi >= step_lo)) throw ConfigError("step range must satisfy 0 < lo <= hi");
  SourceSpec{correlation, variance, 0}.validate();
  tol.validate();
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t dim, std::size_t excess,
                         std::size_t trial) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ dim);
  h = splitmix64(h ^ (excess << 20));
  return splitmix64(h ^ (static_cast<std::uint64_t>(trial) << 40));
}

TrialOutcome run_trial(std::size_t dim, std::size_t num_obs, const ExperimentConfig& config,
                       std::uint64_t seed) {
  if (num_obs < 1) throw ContractViolation("run_trial requires at least one observation");
  TrialOutcome out;
  out.dim = dim;
  out.num_obs = num_obs;

  const std::uint64_t steps_seed = splitmix64(seed ^ 0x5354455053ULL);
  const std::uint64_t transform_seed = splitmix64(seed ^ 0x5452414e53ULL);
  const std::uint64_t source_seed = splitmix64(seed ^ 0x534f555243ULL);

  CoderConfig coder{{config.transform, dim, transform_seed},
                    {sample_log_uniform_steps(dim, config.step_lo, config.step_hi, steps_seed)}};
  const Simulation sim =
      simulate(SourceSpec{config.correlation, config.variance, source_seed}, coder, num_obs);

  try {
    const auto start = std::chrono::steady_clock::now();
    const Identification id = identify(sim.observations, config.tol);
    const auto stop = std::chrono::steady_clock::now();
    if (config.measure_time) {
      out.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    const IdentificationResult& r = id.result;
    out.swap_count = r.swap_count;
    out.decomposition_ok = r.orthogonal_decomposition_ok;
    out.success = same_lattice(r.lattice, sim.realized_basis, config.tol);
    if (!out.success) out.failure_reason = "identified lattice is a proper sublattice";
    if (r.orthogonal_decomposition_ok) {
      const CandidateScore match = score_candidate(*r.transform_estimate, sim.transform);
      out.transform_error = match.max_abs_error;
      double worst = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const auto j = static_cast<Eigen::Index>(std::abs(match.signed_permutation[k]) - 1);
        const Real& truth = coder.quantizer.steps(j);
        const Real rel = abs((*r.steps_estimate)(static_cast<Eigen::Index>(k)) - truth) / truth;
        worst = std::max(worst, to_double(rel));
      }
      out.step_rel_error = worst;
    }
  } catch (const Error& e) {
    out.success = false;
    out.failure_reason = e.what();
  }
  return out;
}

std::vector<TrialOutcome> run_trials(const std::vector<TrialTask>& tasks,
                                     const ExperimentConfig& config, Execution mode) {
  std::vector<TrialOutcome> outcomes(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (mode == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto& t = tasks[static_cast<std::size_t>(i)];
      outcomes[static_cast<std::size_t>(i)] = run_trial(t.dim, t.num_obs, config, t.seed);
    }
    return outcomes;
  }

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const auto& t = tasks[static_cast<std::size_t>(i)];
      outcomes[static_cast<std::size_t>(i)] = run_trial(t.dim, t.num_obs, config, t.seed);
    } catch (...) {
#pragma omp critical(tcid_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

CurveRow aggregate(std::size_t dim, std::size_t excess, const std::vector<TrialOutcome>& outcomes,
                   bool timed) {
  CurveRow row;
  row.dim = dim;
  row.excess = excess;
  row.trials = outcomes.size();
  double swaps = 0.0;
  double time = 0.0;
  for (const auto& o : outcomes) {
    if (o.success) ++row.successes;
    swaps += static_cast<double>(o.swap_count);
    time += o.wall_time_ms;
  }
  if (row.trials > 0) {
    const double n = static_cast<double>(row.trials);
    row.success_rate = static_cast<double>(row.successes) / n;
    row.mean_swaps = swaps / n;
    if (timed) row.mean_time_ms = time / n;
  }
  return row;
}

namespace {

std::vector<CurveRow> run_grid(const std::vector<std::pair<std::size_t, std::size_t>>& points,
                               std::size_t trials, const ExperimentConfig& config,
                               std::uint64_t base_seed, Execution mode) {
  if (trials < 1) throw ConfigError("trials per point must be >= 1");
  std::vector<TrialTask> tasks;
  tasks.reserve(points.size() * trials);
  for (const auto& [dim, excess] : points) {
    config.validate_for(dim);
    for (std::size_t t = 0; t < trials; ++t) {
      tasks.push_back({dim, dim + excess, trial_seed(base_seed, dim, excess, t)});
    }
  }
  const auto outcomes = run_trials(tasks, config, mode);
  std::vector<CurveRow> rows;
  rows.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<TrialOutcome> slice(outcomes.begin() + static_cast<std::ptrdiff_t>(p * trials),
                                    outcomes.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials));
    rows.push_back(aggregate(points[p].first, points[p].second, slice, config.measure_time));
  }
  return rows;
}

}  // namespace

std::vector<CurveRow> run_success_curve(std::size_t dim, std::size_t excess_lo,
                                        std::size_t excess_hi, std::size_t trials_per_point,
                                        const ExperimentConfig& config, std::uint64_t base_seed,
                                        Execution mode) {
  if (excess_hi < excess_lo) throw ConfigError("excess range is empty");
  std::vector<std::pair<std::size_t, std::size_t>> points;
  for (std::size_t e = excess_lo; e <= excess_hi; ++e) points.emplace_back(dim, e);
  return run_grid(points, trials_per_point, config, base_seed, mode);
}

std::vector<CurveRow> run_scaling(const std::vector<std::size_t>& dims, std::size_t excess,
                                  std::size_t trials, const ExperimentConfig& config,
                                  std::uint64_t base_seed, Execution mode) {
  if (dims.empty()) throw ConfigError("no dimensions given");
  if (!std::is_sorted(dims.begin(), dims.end())) throw ConfigError("dimensions must be ascending");
  std::vector<std::pair<std::size_t, std::size_t>> points;
  for (std::size_t d : dims) points.emplace_back(d, excess);
  return run_grid(points, trials, config, base_seed, mode);
}

std::string format_curve_row(const CurveRow& row) {
  char buf[256];
  char time[64] = "NA";
  if (row.mean_time_ms) std::snprintf(time, sizeof time, "%.6g", *row.mean_time_ms);
  std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.4f,%.6g,%s", row.dim, row.excess, row.trials,
                row.successes, row.success_rate, row.mean_swaps, time);
  return buf;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kCurveCsvHeader << '\n';
  for (const auto& row : rows) out << format_curve_row(row) << '\n';
}

std::optional<std::size_t> smallest_sufficient_excess(const std::vector<CurveRow>& rows,
                                                      std::size_t dim, double target) {
  std::optional<std::size_t> best;
  for (const auto& row : rows) {
    if (row.dim != dim || row.success_rate < target) continue;
    if (!best || row.excess < *best) best = row.excess;
  }
  return best;
}

}  // namespace tcid
