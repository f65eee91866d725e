#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mri/controllers.hpp"
#include "mri/fast_error.hpp"
#include "mri/oracle.hpp"

namespace mri {

/// Inner table paired with each MRI method.
std::string fast_table_for(std::string_view method);

struct TestCase {
  std::string problem;
  std::string method;
  std::string fast_table;
  double tol = 1e-5;
  Law law = Law::CC;
  FastErrorStrategy strategy;
  std::vector<double> k;  // empty: law defaults

  /// Stable sort key; also names the case in CSV output.
  [[nodiscard]] std::string key() const;
};

struct Metrics {
  double error_deviation = 0.0;
  double slow_cost_deviation = 0.0;  // NaN without an oracle
  double fast_cost_deviation = 0.0;
  bool failed = false;
};

Metrics compute_metrics(double max_error, long n_slow, long n_fast, bool failed, const OracleResult* oracle,
                        double tol);
Metrics compute_metrics(const SolveReport& report, const OracleResult* oracle, double tol);

/// Sum over cases of 10*SlowCostDev + FastCostDev + 10*ErrorDev^2, with 1e10
/// for each failed case.
double objective(std::span<const Metrics> metrics);

struct MeshStats {
  std::array<long, 3> evaluations{};  // per refinement stage
  double best_value = 0.0;
};

using ObjectiveFn = std::function<double(std::span<const double> k)>;

/// Grid points of one refinement stage in [0,1]^n. Stage 0 is the full
/// 0.2-spaced grid; stages 1 and 2 are centered on `center` with total width
/// 0.4 (spacing 0.04) and 0.08 (spacing 0.02), clipped to [0,1].
std::vector<std::vector<double>> mesh_stage(int stage, std::span<const double> center, int n);

/// Three-stage successive mesh refinement. Ties go to the lexicographically
/// smallest k.
std::vector<double> optimize_params(int n, const ObjectiveFn& fn, MeshStats* stats = nullptr);

struct SuiteConfig {
  std::vector<std::string> problems;
  std::vector<std::string> methods;
  std::vector<double> tolerances;
  std::vector<Law> laws;
  std::vector<FastErrorStrategy> strategies;
  std::map<Law, std::vector<double>> k_override;
  std::filesystem::path oracle_dir = "cache/oracle";
  std::filesystem::path reference_dir = "cache/reference";
  std::filesystem::path out_dir = "results";
  bool compute_oracle = false;
  bool need_oracle = true;  // false: cost deviations are left as NaN
  int threads = 0;          // 0: hardware concurrency
  int subset_stride = 1;    // keep every stride-th case of the expanded matrix
  int subset_offset = 0;

  /// The full benchmark matrix: seven problems, four methods, three tolerances,
  /// the four multirate controllers, LASA-mean.
  static SuiteConfig defaults();
  /// JSON object; absent keys keep their defaults. Schema in docs/formats.md.
  static SuiteConfig from_json(std::string_view text);
  static SuiteConfig load(const std::filesystem::path& path);
};

std::vector<TestCase> expand_matrix(const SuiteConfig& cfg);

struct CaseResult {
  TestCase tc;
  Metrics metrics;
  double max_error = 0.0;
  long n_slow = 0;
  long n_fast = 0;
  long slow_opt = 0;  // 0 without an oracle
  long fast_opt = 0;
  long accepted = 0;
  long rejected = 0;
  std::string failure;
  std::vector<StepRecord> steps;  // only filled by run_case with keep_steps
};

std::filesystem::path oracle_cache_path(const std::filesystem::path& dir, std::string_view problem,
                                        std::string_view method, double tol);
/// Command line that regenerates a missing oracle cache.
std::string oracle_regen_command(std::string_view problem, std::string_view method, double tol,
                                 const std::filesystem::path& dir);

/// Loads the cached oracle, computing and storing it when allowed. Throws
/// std::runtime_error naming the regeneration command otherwise.
OracleResult obtain_oracle(std::string_view problem, std::string_view method, double tol,
                           const std::filesystem::path& dir, bool compute, const OracleConfig& cfg = {});

ControllerParams params_for(const TestCase& tc);

/// `reference` may be null; the checkpoint references are then loaded or
/// computed through the cache in reference_dir.
CaseResult run_case(const TestCase& tc, const OracleResult* oracle, const std::vector<StateVec>* reference,
                    const std::filesystem::path& reference_dir, bool keep_steps = false);

/// Runs `fn(i)` for i in [0, n) on a pool of worker threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Runs every case of the matrix. Results are sorted by case key.
std::vector<CaseResult> run_suite(const SuiteConfig& cfg, const std::vector<TestCase>& cases);
std::vector<CaseResult> run_suite(const SuiteConfig& cfg);

std::string cases_csv(const std::vector<CaseResult>& results);
/// Reads a cases CSV back; metrics are recomputed from the stored columns.
std::vector<CaseResult> read_cases_csv(const std::filesystem::path& path);

struct GroupSummary {
  std::string group;  // controller, strategy, method or tol
  std::string key;
  int n = 0;
  int failed = 0;
  double mean_error_deviation = 0.0;
  double mean_slow_cost_deviation = 0.0;
  double mean_fast_cost_deviation = 0.0;
};

/// Means over successful runs; failures are only counted.
std::vector<GroupSummary> summarize(const std::vector<CaseResult>& results);
std::string summary_csv(const std::vector<GroupSummary>& summary);

/// cases.csv, summary.csv and the SVG charts into `dir`.
void write_report(const std::filesystem::path& dir, const std::vector<CaseResult>& results);

/// Step trace of one solve: CSV columns t,H,M,h,eps_s,eps_f,accepted,law.
std::string trace_csv(const std::vector<StepRecord>& steps);
/// H and h = H/M against t for accepted steps, log scale.
std::string trace_svg(const std::vector<StepRecord>& steps, const std::string& title);

}  // namespace mri
