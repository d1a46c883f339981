#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tcid/codec.hpp"
#include "tcid/lattice.hpp"

namespace tcid {

struct ExperimentConfig {
  TransformKind transform = TransformKind::Dct2;
  double step_lo = 0.1;
  double step_hi = 10.0;
  double correlation = 0.9;
  double variance = 1e4;
  Tolerances tol;
  // Wall-clock timing makes CSV output run-dependent, so it is opt-in.
  bool measure_time = false;

  void validate_for(std::size_t dim) const;
};

struct TrialOutcome {
  std::size_t dim = 0;
  std::size_t num_obs = 0;
  bool success = false;  // identified lattice == coding lattice
  std::size_t swap_count = 0;
  double wall_time_ms = 0.0;
  bool decomposition_ok = false;
  // Filled when the decomposition succeeds; NaN otherwise.
  double step_rel_error = std::numeric_limits<double>::quiet_NaN();
  double transform_error = std::numeric_limits<double>::quiet_NaN();
  std::string failure_reason;
};

struct CurveRow {
  std::size_t dim = 0;
  std::size_t excess = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_swaps = 0.0;
  std::optional<double> mean_time_ms;
};

enum class Execution { Serial, Parallel };

// Per-trial seed, a pure function of its coordinates in the sweep.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t dim, std::size_t excess,
                         std::size_t trial);

// One simulate -> identify round trip scored against its own ground truth.
TrialOutcome run_trial(std::size_t dim, std::size_t num_obs, const ExperimentConfig& config,
                       std::uint64_t seed);

struct TrialTask {
  std::size_t dim;
  std::size_t num_obs;
  std::uint64_t seed;
};

// Runs every task; outcomes[i] belongs to tasks[i] regardless of execution mode.
std::vector<TrialOutcome> run_trials(const std::vector<TrialTask>& tasks,
                                     const ExperimentConfig& config,
                                     Execution mode = Execution::Parallel);

// Aggregates outcomes in index order.
CurveRow aggregate(std::size_t dim, std::size_t excess, const std::vector<TrialOutcome>& outcomes,
                   bool timed);

std::vector<CurveRow> run_success_curve(std::size_t dim, std::size_t excess_lo,
                                        std::size_t excess_hi, std::size_t trials_per_point,
                                        const ExperimentConfig& config, std::uint64_t base_seed,
                                        Execution mode = Execution::Parallel);

std::vector<CurveRow> run_scaling(const std::vector<std::size_t>& dims, std::size_t excess,
                                  std::size_t trials, const ExperimentConfig& config,
                                  std::uint64_t base_seed, Execution mode = Execution::Parallel);

inline constexpr const char* kCurveCsvHeader =
    "dim,excess,trials,successes,success_rate,mean_swaps,mean_time_ms";

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);
std::string format_curve_row(const CurveRow& row);

// Smallest excess whose success rate reaches `target`, per dimension.
std::optional<std::size_t> smallest_sufficient_excess(const std::vector<CurveRow>& rows,
                                                      std::size_t dim, double target = 0.99);

}  // namespace tcid
