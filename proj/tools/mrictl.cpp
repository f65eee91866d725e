// mrictl: batch driver for the multirate steppers.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mri/harness.hpp"
#include "mri/problems.hpp"
#include "mri/text_io.hpp"

namespace fs = std::filesystem;
using namespace mri;

namespace {

void write_file(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << s;
}

struct SolveArgs {
  std::string problem = "kaps";
  std::string method = "ERK33";
  std::string fast_table;
  double tol = 1e-5;
  std::string controller = "cc";
  std::string fast_error = "lasa-mean";
  std::vector<double> k;
  std::string out = "results/solve";
  std::string reference_dir = "cache/reference";
};

int do_solve(const SolveArgs& a) {
  TestCase tc{a.problem, a.method, a.fast_table.empty() ? fast_table_for(a.method) : a.fast_table, a.tol,
              parse_law(a.controller), FastErrorStrategy::parse(a.fast_error), a.k};
  const auto r = run_case(tc, nullptr, nullptr, a.reference_dir, true);
  const fs::path out = a.out;
  write_file(out / "trace.csv", trace_csv(r.steps));
  write_file(out / "trace.svg", trace_svg(r.steps, tc.key()));
  std::printf("case            %s\n", tc.key().c_str());
  std::printf("status          %s\n", r.metrics.failed ? ("FAILED: " + r.failure).c_str() : "ok");
  std::printf("max rel error   %.6e\n", r.max_error);
  std::printf("error deviation %+.4f\n", r.metrics.error_deviation);
  std::printf("steps           %ld accepted, %ld rejected\n", r.accepted, r.rejected);
  std::printf("evaluations     %ld slow, %ld fast\n", r.n_slow, r.n_fast);
  std::printf("trace           %s\n", (out / "trace.csv").string().c_str());
  return r.metrics.failed ? 2 : 0;
}

struct OracleArgs {
  std::string problem = "kaps";
  std::string method = "ERK33";
  double tol = 1e-5;
  std::string oracle_dir = "cache/oracle";
  int threads = 1;
  bool force = false;
};

int do_oracle(const OracleArgs& a) {
  const auto path = oracle_cache_path(a.oracle_dir, a.problem, a.method, a.tol);
  if (a.force && fs::exists(path)) fs::remove(path);
  OracleConfig cfg;
  cfg.threads = a.threads;
  const auto r = obtain_oracle(a.problem, a.method, a.tol, a.oracle_dir, true, cfg);
  std::printf("%s: %zu steps, f_slow_opt=%ld f_fast_opt=%ld\n", path.string().c_str(), r.steps.size(), r.f_slow_opt,
              r.f_fast_opt);
  return 0;
}

struct SuiteArgs {
  std::string config;
  bool compute_oracle = false;
  bool use_cached_oracle = false;
  bool no_oracle = false;
  int subset = 0;
  int subset_offset = -1;
  int threads = -1;
  std::string out;
  std::vector<std::string> problems, methods, controllers, strategies;
  std::vector<double> tols;
};

SuiteConfig suite_config(const SuiteArgs& a) {
  SuiteConfig c = a.config.empty() ? SuiteConfig::defaults() : SuiteConfig::load(a.config);
  if (a.compute_oracle) c.compute_oracle = true;
  if (a.use_cached_oracle) c.compute_oracle = false;
  if (a.no_oracle) c.need_oracle = false;
  if (a.subset > 0) c.subset_stride = a.subset;
  if (a.subset_offset >= 0) c.subset_offset = a.subset_offset;
  if (a.threads >= 0) c.threads = a.threads;
  if (!a.out.empty()) c.out_dir = a.out;
  if (!a.problems.empty()) c.problems = a.problems;
  if (!a.methods.empty()) c.methods = a.methods;
  if (!a.tols.empty()) c.tolerances = a.tols;
  if (!a.controllers.empty()) {
    c.laws.clear();
    for (const auto& s : a.controllers) c.laws.push_back(parse_law(s));
  }
  if (!a.strategies.empty()) {
    c.strategies.clear();
    for (const auto& s : a.strategies) c.strategies.push_back(FastErrorStrategy::parse(s));
  }
  return c;
}

void add_suite_options(CLI::App* cmd, SuiteArgs& a) {
  cmd->add_option("--config", a.config, "JSON suite config (see docs/formats.md)");
  auto* co = cmd->add_flag("--compute-oracle", a.compute_oracle, "compute missing oracle caches");
  cmd->add_flag("--use-cached-oracle", a.use_cached_oracle, "require existing oracle caches (default)")->excludes(co);
  cmd->add_flag("--no-oracle", a.no_oracle, "skip cost deviations");
  cmd->add_option("--subset", a.subset, "keep every N-th case of the matrix")->check(CLI::PositiveNumber);
  cmd->add_option("--subset-offset", a.subset_offset, "first case index kept by --subset");
  cmd->add_option("--threads", a.threads, "worker threads, 0 = all cores");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--problems", a.problems, "problem names");
  cmd->add_option("--methods", a.methods, "MRI methods");
  cmd->add_option("--tols", a.tols, "tolerances");
  cmd->add_option("--controllers", a.controllers, "cc ll pimr pidmr i pi pid gus");
  cmd->add_option("--fast-error", a.strategies, "fs sa-mean sa-max lasa-mean lasa-max");
}

int do_suite(const SuiteArgs& a) {
  const auto cfg = suite_config(a);
  const auto cases = expand_matrix(cfg);
  std::fprintf(stderr, "running %zu cases\n", cases.size());
  const auto res = run_suite(cfg, cases);
  write_report(cfg.out_dir, res);
  int failed = 0;
  for (const auto& r : res) failed += r.metrics.failed;
  std::printf("%zu cases, %d failed; report in %s\n", res.size(), failed, cfg.out_dir.string().c_str());
  std::fputs(summary_csv(summarize(res)).c_str(), stdout);
  return 0;
}

int do_optimize(const SuiteArgs& a, const std::string& controller) {
  SuiteConfig cfg = suite_config(a);
  if (!cfg.need_oracle) throw std::invalid_argument("optimize needs oracle baselines; drop --no-oracle");
  const Law law = parse_law(controller);
  cfg.laws = {law};
  const auto base = expand_matrix(cfg);
  std::fprintf(stderr, "optimizing %s over %zu cases\n", std::string(law_name(law)).c_str(), base.size());
  std::ostringstream log;
  log << "k,E\n";
  MeshStats st;
  const auto k = optimize_params(law_param_count(law), [&](std::span<const double> kk) {
    auto cases = base;
    for (auto& tc : cases) tc.k.assign(kk.begin(), kk.end());
    const auto res = run_suite(cfg, cases);
    std::vector<Metrics> m;
    for (const auto& r : res) m.push_back(r.metrics);
    const double E = objective(m);
    std::string ks;
    for (std::size_t i = 0; i < kk.size(); ++i) ks += (i ? ";" : "") + fmt17(kk[i]);
    log << ks << ',' << fmt17(E) << '\n';
    return E;
  }, &st);
  write_file(fs::path(cfg.out_dir) / ("optimize_" + std::string(law_name(law)) + ".csv"), log.str());
  std::printf("best k for %s:", std::string(law_name(law)).c_str());
  for (double v : k) std::printf(" %.2f", v);
  std::printf("  (E=%.6g; evaluations %ld/%ld/%ld)\n", st.best_value, st.evaluations[0], st.evaluations[1],
              st.evaluations[2]);
  return 0;
}

int do_report(const std::string& cases, const std::string& out) {
  const auto res = read_cases_csv(cases);
  write_report(out, res);
  std::printf("%zu cases; report in %s\n", res.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrictl: adaptive multirate (MRI-GARK) integration, oracle baselines and benchmark reports"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "one adaptive solve, with a step trace");
  solve->add_option("--problem", sa.problem, "problem name")->required();
  solve->add_option("--method", sa.method, "ERK33 ERK45a IRK21a ESDIRK34a");
  solve->add_option("--fast-table", sa.fast_table, "inner table (default: paired with the method)");
  solve->add_option("--tol", sa.tol, "tolerance");
  solve->add_option("--controller", sa.controller, "cc ll pimr pidmr i pi pid gus");
  solve->add_option("--fast-error", sa.fast_error, "fs sa-mean sa-max lasa-mean lasa-max");
  solve->add_option("--k", sa.k, "controller parameters");
  solve->add_option("--out", sa.out, "output directory");
  solve->add_option("--reference-dir", sa.reference_dir, "reference cache directory");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "compute and cache the optimal (H,M) baseline");
  oracle->add_option("--problem", oa.problem)->required();
  oracle->add_option("--method", oa.method)->required();
  oracle->add_option("--tol", oa.tol)->required();
  oracle->add_option("--oracle-dir", oa.oracle_dir, "cache directory");
  oracle->add_option("--threads", oa.threads, "parallel M sweep");
  oracle->add_flag("--force", oa.force, "recompute even if cached");

  SuiteArgs su;
  auto* suite = app.add_subcommand("suite", "run the test matrix and write the report");
  add_suite_options(suite, su);

  SuiteArgs op;
  std::string controller = "cc";
  auto* optimize = app.add_subcommand("optimize", "successive mesh refinement of controller parameters");
  add_suite_options(optimize, op);
  optimize->add_option("--controller", controller, "law to optimize")->required();

  std::string cases, report_out = "results";
  auto* report = app.add_subcommand("report", "rebuild summary and plots from a cases CSV");
  report->add_option("--cases", cases, "cases.csv from a suite run")->required();
  report->add_option("--out", report_out, "output directory");

  auto* problems = app.add_subcommand("problems", "problem catalogue");
  auto* list = problems->add_subcommand("list", "list problems");
  problems->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return do_solve(sa);
    if (*oracle) return do_oracle(oa);
    if (*suite) return do_suite(su);
    if (*optimize) return do_optimize(op, controller);
    if (*report) return do_report(cases, report_out);
    if (*list) {
      for (const auto& n : problem_names()) {
        const auto p = make_problem(n);
        std::printf("%-15s dim=%-4zu t=[%g, %g]  %s\n", n.c_str(), p.ivp.dim, p.ivp.t0, p.ivp.tf, p.description.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
