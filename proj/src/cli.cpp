#include "tcid/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tcid/errors.hpp"
#include "tcid/experiments.hpp"
#include "tcid/identify.hpp"
#include "tcid/io.hpp"

namespace tcid {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double_flag(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(flag + ": '" + text + "' is not a number");
  }
}

std::size_t parse_count_flag(const std::string& text, const std::string& flag) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ConfigError(flag + ": '" + text + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(std::stoull(text));
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError(flag + " expects lo:hi, got '" + text + "'");
  const double lo = parse_double_flag(parts[0], flag);
  const double hi = parse_double_flag(parts[1], flag);
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError(flag + " needs 0 < lo <= hi");
  return {lo, hi};
}

std::pair<std::size_t, std::size_t> parse_count_range(const std::string& text,
                                                      const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const auto v = parse_count_flag(parts[0], flag);
    return {v, v};
  }
  if (parts.size() != 2) throw ConfigError(flag + " expects lo:hi, got '" + text + "'");
  const auto lo = parse_count_flag(parts[0], flag);
  const auto hi = parse_count_flag(parts[1], flag);
  if (hi < lo) throw ConfigError(flag + " needs lo <= hi");
  return {lo, hi};
}

// "dct2,hadamard,identity,random:7"
std::vector<TransformSpec> parse_dictionary(const std::string& text, std::size_t n) {
  std::vector<TransformSpec> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    TransformSpec spec;
    spec.kind = parse_transform_kind(item.substr(0, colon));
    spec.size = n;
    if (colon != std::string::npos) {
      spec.seed = parse_count_flag(item.substr(colon + 1), "--dict");
    }
    spec.validate();
    out.push_back(spec);
  }
  if (out.empty()) throw ConfigError("--dict names no transforms");
  return out;
}

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
}

void require_writable_dir(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw IoError("cannot write '" + path + "': directory does not exist");
  }
  if (fs::is_directory(path, ec)) throw IoError("cannot write '" + path + "': is a directory");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given, std::ostream& out) {
  if (given) return *given;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  out << "seed " << seed << '\n';
  return seed;
}

struct TolFlags {
  double integrality = Tolerances{}.integrality_tol;
  double rank = Tolerances{}.rank_tol;
  double orth = Tolerances{}.orth_tol;

  void attach(CLI::App* app) {
    app->add_option("--integrality-tol", integrality, "Max coordinate distance from an integer")
        ->capture_default_str();
    app->add_option("--rank-tol", rank, "Relative singular-value threshold")->capture_default_str();
    app->add_option("--orth-tol", orth, "Relative Gram off-diagonal threshold")
        ->capture_default_str();
  }

  Tolerances get() const {
    Tolerances t{integrality, rank, orth};
    t.validate();
    return t;
  }
};

struct SimulateArgs {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::string transform = "dct2";
  std::uint64_t transform_seed = 0;
  std::string steps;
  std::string steps_range = "0.1:10";
  std::optional<std::uint64_t> seed;
  double rho = SourceSpec{}.correlation;
  double variance = SourceSpec{}.variance;
  std::string out_path;
  std::string truth_path;
  unsigned digits = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.dim < 1) throw ConfigError("--dim must be at least 1");
  if (a.count < 1) throw ConfigError("--count must be at least 1");
  if (a.digits != 0 && a.digits < 17) throw ConfigError("--digits must be 0 (full) or >= 17");
  const std::string truth_path = a.truth_path.empty() ? a.out_path + ".truth.json" : a.truth_path;
  require_writable_dir(a.out_path);
  require_writable_dir(truth_path);

  const std::uint64_t seed = resolve_seed(a.seed, out);
  CoderConfig coder;
  coder.transform.kind = parse_transform_kind(a.transform);
  coder.transform.size = a.dim;
  coder.transform.seed = a.transform_seed ? a.transform_seed : mix(seed ^ 0x7472616eULL);
  if (!a.steps.empty()) {
    const auto parts = split(a.steps, ',');
    if (parts.size() != a.dim) {
      throw ConfigError("--steps lists " + std::to_string(parts.size()) + " values for dim " +
                        std::to_string(a.dim));
    }
    coder.quantizer.steps.resize(static_cast<Eigen::Index>(a.dim));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      coder.quantizer.steps(static_cast<Eigen::Index>(i)) = parse_double_flag(parts[i], "--steps");
    }
  } else {
    const auto [lo, hi] = parse_range(a.steps_range, "--steps-range");
    coder.quantizer.steps = sample_log_uniform_steps(a.dim, lo, hi, mix(seed ^ 0x73746570ULL));
  }
  coder.validate();
  SourceSpec source{a.rho, a.variance, mix(seed ^ 0x736f7572ULL)};
  source.validate();

  const Simulation sim = simulate(source, coder, a.count);
  write_observations_file(a.out_path, sim.observations, a.digits);
  GroundTruth truth{coder.transform, sim.transform, coder.quantizer.steps, source, a.count, seed};
  write_text_file(truth_path, truth_to_json(truth).dump(2) + "\n");
  out << "wrote " << a.count << " observations to " << a.out_path << ", ground truth to "
      << truth_path << '\n';
  return kExitOk;
}

struct IdentifyArgs {
  std::string in_path;
  std::string out_path;
  std::optional<std::string> dict;
  TolFlags tol;
};

void emit_json(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

int cmd_identify(const IdentifyArgs& a, std::ostream& out) {
  const Tolerances tol = a.tol.get();
  require_readable(a.in_path);
  if (!a.out_path.empty()) require_writable_dir(a.out_path);
  const auto observations = read_observations_file(a.in_path);
  const std::size_t n = static_cast<std::size_t>(observations.front().size());
  const auto dictionary = a.dict ? parse_dictionary(*a.dict, n) : default_dictionary(n);
  try {
    const Identification id = identify(observations, tol, dictionary);
    emit_json(result_to_json(id), a.out_path, out);
  } catch (const RankDeficiencyError& e) {
    emit_json(rank_deficiency_to_json(e), a.out_path, out);
    throw;
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string dims = "4,8,16";
  std::string excess = "0:10";
  std::size_t trials = 200;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool timing = false;
  bool serial = false;
  std::string transform = "dct2";
  std::string steps_range = "0.1:10";
  double rho = SourceSpec{}.correlation;
  double variance = SourceSpec{}.variance;
  TolFlags tol;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  if (a.trials < 1) throw ConfigError("--trials must be at least 1");
  std::vector<std::size_t> dims;
  for (const auto& d : split(a.dims, ',')) dims.push_back(parse_count_flag(d, "--dims"));
  if (dims.empty()) throw ConfigError("--dims is empty");
  const auto [lo, hi] = parse_count_range(a.excess, "--excess");
  ExperimentConfig config;
  config.transform = parse_transform_kind(a.transform);
  std::tie(config.step_lo, config.step_hi) = parse_range(a.steps_range, "--steps-range");
  config.correlation = a.rho;
  config.variance = a.variance;
  config.tol = a.tol.get();
  config.measure_time = a.timing;
  for (std::size_t d : dims) config.validate_for(d);
  require_writable_dir(a.out_path);

  const std::uint64_t seed = resolve_seed(a.seed, out);
  const Execution mode = a.serial ? Execution::Serial : Execution::Parallel;
  std::vector<CurveRow> rows;
  for (std::size_t d : dims) {
    auto curve = run_success_curve(d, lo, hi, a.trials, config, seed, mode);
    rows.insert(rows.end(), curve.begin(), curve.end());
  }
  std::ostringstream csv;
  write_curve_csv(csv, rows);
  write_text_file(a.out_path, csv.str());
  for (std::size_t d : dims) {
    const auto e = smallest_sufficient_excess(rows, d);
    out << "dim " << d << ": ";
    if (e) {
      out << "success >= 99% from excess " << *e << '\n';
    } else {
      out << "success never reached 99% for excess " << lo << ".." << hi << '\n';
    }
  }
  return kExitOk;
}

struct MatchArgs {
  std::string transform_path;
  std::string in_path;
  std::optional<std::string> dict;
  TolFlags tol;
};

int cmd_match(const MatchArgs& a, std::ostream& out) {
  Matrix estimate;
  if (!a.transform_path.empty()) {
    const Json doc = read_json_file(a.transform_path);
    estimate = matrix_from_json(doc.is_object() ? doc.at("transform") : doc);
    if (estimate.rows() != estimate.cols()) throw ParseError("transform must be square", 0);
  } else {
    const auto observations = read_observations_file(a.in_path);
    const Identification id = identify(observations, a.tol.get());
    if (!id.result.transform_estimate) {
      out << "best: unknown (no orthogonal decomposition of the observation lattice)\n";
      return kExitOk;
    }
    estimate = *id.result.transform_estimate;
  }
  const std::size_t n = static_cast<std::size_t>(estimate.rows());
  const auto dictionary = a.dict ? parse_dictionary(*a.dict, n) : default_dictionary(n);
  const DictionaryMatch m = match_dictionary(estimate, dictionary);
  out << std::left << std::setw(12) << "candidate" << "max_abs_error\n";
  for (const auto& c : m.candidates) {
    out << std::left << std::setw(12) << to_string(c.spec.kind) << std::setprecision(6)
        << c.max_abs_error << '\n';
  }
  if (m.known) {
    out << "best: " << to_string(m.best.kind) << " (max_abs_error " << m.max_abs_error << ")\n";
  } else {
    out << "best: unknown (closest " << to_string(m.best.kind) << ", max_abs_error "
        << m.max_abs_error << ")\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transform coder identification from decoded vectors", "tcid"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate decoded vectors and a ground-truth sidecar");
  s->add_option("--dim", sim.dim, "Transform size N")->required();
  s->add_option("--count", sim.count, "Number of blocks P")->required();
  s->add_option("--transform", sim.transform, "dct2 | hadamard | identity | random")
      ->capture_default_str();
  s->add_option("--transform-seed", sim.transform_seed, "Seed of a random transform");
  auto* steps_opt = s->add_option("--steps", sim.steps, "Explicit comma-separated step sizes");
  s->add_option("--steps-range", sim.steps_range, "Log-uniform step range lo:hi")
      ->capture_default_str()
      ->excludes(steps_opt);
  s->add_option("--seed", sim.seed, "Base seed (derived and printed when absent)");
  s->add_option("--rho", sim.rho, "AR(1) correlation")->capture_default_str();
  s->add_option("--variance", sim.variance, "AR(1) variance")->capture_default_str();
  s->add_option("--out", sim.out_path, "Observation CSV path")->required();
  s->add_option("--truth", sim.truth_path, "Sidecar path (default <out>.truth.json)");
  s->add_option("--digits", sim.digits, "Significant digits per field, 0 = full precision")
      ->capture_default_str();

  IdentifyArgs idn;
  auto* i = app.add_subcommand("identify", "Identify the coder behind an observation file");
  i->add_option("--in", idn.in_path, "Observation CSV")->required();
  i->add_option("--out", idn.out_path, "Result path (default stdout)");
  i->add_option("--dict", idn.dict, "Comma-separated dictionary, e.g. dct2,hadamard,identity");
  idn.tol.attach(i);

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Monte-Carlo success curves");
  e->add_option("--dims", exp.dims, "Comma-separated dimensions")->capture_default_str();
  e->add_option("--excess", exp.excess, "Excess range lo:hi")->capture_default_str();
  e->add_option("--trials", exp.trials, "Trials per point")->capture_default_str();
  e->add_option("--seed", exp.seed, "Base seed (derived and printed when absent)");
  e->add_option("--out", exp.out_path, "CSV path")->required();
  e->add_flag("--timing", exp.timing, "Fill mean_time_ms (makes the CSV run-dependent)");
  e->add_flag("--serial", exp.serial, "Run trials on one thread");
  e->add_option("--transform", exp.transform, "Transform kind")->capture_default_str();
  e->add_option("--steps-range", exp.steps_range, "Log-uniform step range lo:hi")
      ->capture_default_str();
  e->add_option("--rho", exp.rho, "AR(1) correlation")->capture_default_str();
  e->add_option("--variance", exp.variance, "AR(1) variance")->capture_default_str();
  exp.tol.attach(e);

  MatchArgs mat;
  auto* m = app.add_subcommand("match", "Match a transform estimate against the dictionary");
  auto* tf = m->add_option("--transform-file", mat.transform_path,
                           "JSON matrix, or a document with a \"transform\" field");
  auto* mi = m->add_option("--in", mat.in_path, "Observation CSV to identify first");
  tf->excludes(mi);
  m->add_option("--dict", mat.dict, "Comma-separated dictionary");
  mat.tol.attach(m);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitConfig;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out);
    if (i->parsed()) return cmd_identify(idn, out);
    if (e->parsed()) return cmd_experiment(exp, out);
    if (m->parsed()) {
      if (mat.transform_path.empty() && mat.in_path.empty()) {
        throw ConfigError("match needs --transform-file or --in");
      }
      return cmd_match(mat, out);
    }
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& ex) {
    err << "invalid input: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << '\n';
    return kExitParse;
  } catch (const RankDeficiencyError& ex) {
    err << "rank deficiency: " << ex.what() << '\n';
    return kExitRankDeficient;
  } catch (const NonConvergenceError& ex) {
    err << "non-convergence: " << ex.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& ex) {
    err << "unexpected error: " << ex.what() << '\n';
    return kExitUnexpected;
  }
  return kExitUnexpected;
}

}  // namespace tcid
