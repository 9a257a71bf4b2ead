#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rffdq/io.hpp"
#include "rffdq/pqcsim.hpp"
#include "rffdq/regress.hpp"

namespace rffdq {

struct TargetSource {
  enum class Kind { Explicit, Circuit, Random };
  Kind kind = Kind::Random;
  std::optional<TrigPolynomial> poly;
  std::optional<Circuit> circuit;
  Observable observable;
  std::vector<double> theta;
  std::size_t support_size = 1;
  /// Distribution the random support is drawn from; null means uniform over the canonical half.
  std::shared_ptr<const FrequencyDistribution> support_from;
  std::uint64_t seed = 0;
};

struct ProblemSpec {
  EncodingStrategy encoding;
  std::shared_ptr<const FrequencySet> fs;
  TargetSource target;
  double sigma = 0.0;  // uniform noise on [-sigma sqrt 3, sigma sqrt 3]
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::uint64_t data_stream = 0;
};

struct GeneratedProblem {
  Dataset data;
  TrigPolynomial target;
  double noise_variance = 0.0;
};

/// Fields: "encoding", "target" ({"kind": "explicit", "function": {...}} |
/// {"kind": "circuit", "circuit": {...}, "theta": [...]} | {"kind": "random", "support": k,
/// "from": dist, "seed": s}), "noise" ({"kind": "none" | "uniform", "sigma": s}), "n", "seed".
ProblemSpec problem_from_json(const io::json& j);
TrigPolynomial materialize_target(const ProblemSpec& spec);
GeneratedProblem generate_problem(const ProblemSpec& spec);

/// Squared L2 distance under the normalised uniform measure, exact via Parseval when the
/// model's spectrum lives on the target's (integer) lattice, by quadrature otherwise.
double l2_error_sq(const FittedModel& model, const TrigPolynomial& target);

struct SweepDist {
  std::string label;
  std::shared_ptr<const FrequencyDistribution> dist;
};

struct SweepConfig {
  ProblemSpec problem;
  std::vector<SweepDist> dists;
  std::vector<std::size_t> Ms;
  std::vector<std::size_t> ns;
  std::vector<std::optional<double>> lambdas;  // nullopt = 1/sqrt(n)
  std::vector<std::uint64_t> seeds;
  bool krr = false;
  std::uint64_t master_seed = 0;
};

SweepConfig sweep_from_json(const io::json& j);

struct ResultRow {
  std::string experiment_id;
  std::size_t d = 0;
  std::uint64_t omega_size = 0;
  std::string dist_kind;
  std::size_t M = 0;
  std::size_t n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double emp_risk = 0.0;
  double true_risk = 0.0;
  double krr_true_risk = 0.0;
  double risk_gap = 0.0;
  double l2_err_sq = 0.0;
  double rel_l2_err = 0.0;
  double alignment = 0.0;
  double p_max = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";
};

struct RunOptions {
  std::size_t threads = 0;                 // 0: RFFDQ_THREADS or hardware concurrency
  std::optional<std::size_t> stop_after;   // stop after writing this many new rows
  bool resume = false;
  bool timing = false;                     // record wall-clock runtimes (breaks byte-identity)
};

std::size_t cell_count(const SweepConfig& cfg);
ResultRow run_cell(const SweepConfig& cfg, std::size_t cell_index, bool timing = false);

/// Runs every cell not already present in out_path (when resuming), appending rows in cell order.
/// Returns the whole table, previously written rows included.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const std::string& out_path, const RunOptions& opt = {});
/// In-memory sweep.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const RunOptions& opt = {});

std::string results_header();
std::string row_to_csv(const ResultRow& row);
std::vector<ResultRow> results_from_csv(const std::string& text);

enum class PlotKind { RiskVsM, RiskVsN, AlignmentScatter };
PlotKind plot_kind_from_name(const std::string& name);
std::string emit_plot(const std::vector<ResultRow>& rows, PlotKind kind);

}  // namespace rffdq
