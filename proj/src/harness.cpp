#include "mri/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "mri/problems.hpp"
#include "mri/svg.hpp"
#include "mri/text_io.hpp"

namespace mri {

std::string fast_table_for(std::string_view method) {
  if (method.starts_with("MRI-GARK-")) method.remove_prefix(9);
  if (method == "IRK21a") return "heun-euler";
  if (method == "ERK33" || method == "ESDIRK34a") return "bogacki-shampine";
  if (method == "ERK45a") return "zonneveld";
  throw std::invalid_argument("no fast table paired with method '" + std::string(method) + "'");
}

namespace {

std::string tol_text(double tol) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", tol);
  return buf;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string TestCase::key() const {
  std::string s = problem + "/" + method + "/" + tol_text(tol) + "/" + std::string(law_name(law)) + "/" + strategy.label();
  if (!k.empty()) {
    s += "/k";
    for (double v : k) s += ":" + fmt17(v);
  }
  return s;
}

Metrics compute_metrics(double max_error, long n_slow, long n_fast, bool failed, const OracleResult* oracle,
                        double tol) {
  Metrics m;
  m.failed = failed || !std::isfinite(max_error);
  if (m.failed) {
    m.error_deviation = m.slow_cost_deviation = m.fast_cost_deviation = nan();
    return m;
  }
  // an exact solve would give -inf; keep it finite
  m.error_deviation = std::log10(std::max(max_error, 1e-300) / tol);
  if (oracle && !oracle->failed && oracle->f_slow_opt > 0 && oracle->f_fast_opt > 0) {
    m.slow_cost_deviation = static_cast<double>(n_slow) / static_cast<double>(oracle->f_slow_opt);
    m.fast_cost_deviation = static_cast<double>(n_fast) / static_cast<double>(oracle->f_fast_opt);
  } else {
    m.slow_cost_deviation = m.fast_cost_deviation = nan();
  }
  return m;
}

Metrics compute_metrics(const SolveReport& report, const OracleResult* oracle, double tol) {
  return compute_metrics(report.max_error, report.n_slow_evals, report.n_fast_evals, report.failed, oracle, tol);
}

double objective(std::span<const Metrics> metrics) {
  double E = 0.0;
  for (const auto& m : metrics) {
    if (m.failed) {
      E += 1e10;
      continue;
    }
    E += 10.0 * m.slow_cost_deviation + m.fast_cost_deviation + 10.0 * m.error_deviation * m.error_deviation;
  }
  return E;
}

// Mesh coordinates live on the integer lattice of 1/50 steps, so every stage
// lands on exact multiples and clipping never creates off-grid points.
std::vector<std::vector<double>> mesh_stage(int stage, std::span<const double> center, int n) {
  constexpr int unit = 50;
  int half = 0, step = 10;
  if (stage == 1) {
    half = 10;  // +-0.2
    step = 2;
  } else if (stage == 2) {
    half = 2;  // +-0.04
    step = 1;
  } else if (stage != 0) {
    throw std::invalid_argument("mesh_stage: stage must be 0, 1 or 2");
  }
  std::vector<std::vector<int>> axes(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    auto& ax = axes[static_cast<std::size_t>(d)];
    if (stage == 0) {
      for (int v = 0; v <= unit; v += step) ax.push_back(v);
      continue;
    }
    const int c = static_cast<int>(std::lround(center[static_cast<std::size_t>(d)] * unit));
    for (int v = c - half; v <= c + half; v += step) {
      if (v >= 0 && v <= unit) ax.push_back(v);
    }
  }
  // lexicographic enumeration, last coordinate fastest
  std::vector<std::vector<double>> pts;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = axes[d][idx[d]] / static_cast<double>(unit);
    pts.push_back(std::move(p));
    int d = n - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == axes[static_cast<std::size_t>(d)].size()) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return pts;
}

std::vector<double> optimize_params(int n, const ObjectiveFn& fn, MeshStats* stats) {
  if (n < 1) throw std::invalid_argument("optimize_params: need at least one parameter");
  std::vector<double> best;
  double best_val = std::numeric_limits<double>::infinity();
  MeshStats st;
  for (int stage = 0; stage < 3; ++stage) {
    const auto pts = mesh_stage(stage, best, n);
    std::vector<double> stage_best;
    double stage_val = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      const double v = fn(p);
      ++st.evaluations[static_cast<std::size_t>(stage)];
      // points come in lexicographic order, so strict < keeps the smallest k on ties
      if (v < stage_val || stage_best.empty()) {
        stage_val = v;
        stage_best = p;
      }
    }
    best = stage_best;
    best_val = stage_val;
  }
  st.best_value = best_val;
  if (stats) *stats = st;
  return best;
}

SuiteConfig SuiteConfig::defaults() {
  SuiteConfig c;
  c.problems = {"bicoupling", "brusselator", "kaps", "kpr", "forced-vdp", "pleiades", "fourbody3d"};
  c.methods = {"ERK33", "ERK45a", "IRK21a", "ESDIRK34a"};
  c.tolerances = {1e-3, 1e-5, 1e-7};
  c.laws = {Law::CC, Law::LL, Law::PIMR, Law::PIDMR};
  c.strategies = {FastErrorStrategy::lasa(FastErrorStrategy::Aggregate::mean)};
  return c;
}

SuiteConfig SuiteConfig::from_json(std::string_view text) {
  using nlohmann::json;
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("suite config: top level must be an object");
  static const std::set<std::string> known = {"problems",       "methods",       "tolerances", "controllers",
                                              "strategies",     "k",             "oracle_dir", "reference_dir",
                                              "out_dir",        "compute_oracle", "threads",   "subset_stride",
                                              "subset_offset", "need_oracle"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("suite config: unknown key '" + key + "'");
  }
  SuiteConfig c = defaults();
  if (j.contains("problems")) c.problems = j["problems"].get<std::vector<std::string>>();
  if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<std::vector<double>>();
  if (j.contains("controllers")) {
    c.laws.clear();
    for (const auto& s : j["controllers"].get<std::vector<std::string>>()) c.laws.push_back(parse_law(s));
  }
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j["strategies"].get<std::vector<std::string>>()) c.strategies.push_back(FastErrorStrategy::parse(s));
  }
  if (j.contains("k")) {
    for (const auto& [law, v] : j["k"].items()) c.k_override[parse_law(law)] = v.get<std::vector<double>>();
  }
  if (j.contains("oracle_dir")) c.oracle_dir = j["oracle_dir"].get<std::string>();
  if (j.contains("reference_dir")) c.reference_dir = j["reference_dir"].get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("compute_oracle")) c.compute_oracle = j["compute_oracle"].get<bool>();
  if (j.contains("need_oracle")) c.need_oracle = j["need_oracle"].get<bool>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("subset_stride")) c.subset_stride = j["subset_stride"].get<int>();
  if (j.contains("subset_offset")) c.subset_offset = j["subset_offset"].get<int>();
  if (c.subset_stride < 1 || c.subset_offset < 0) throw std::invalid_argument("suite config: bad subset");
  for (const auto& [law, k] : c.k_override) {
    ControllerParams p{law, k, 1, 1};
    p.validate();
  }
  return c;
}

SuiteConfig SuiteConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

std::vector<TestCase> expand_matrix(const SuiteConfig& cfg) {
  std::vector<TestCase> all;
  for (const auto& p : cfg.problems) {
    for (const auto& m : cfg.methods) {
      for (double tol : cfg.tolerances) {
        for (Law law : cfg.laws) {
          for (const auto& s : cfg.strategies) {
            TestCase tc{p, m, fast_table_for(m), tol, law, s, {}};
            if (auto it = cfg.k_override.find(law); it != cfg.k_override.end()) tc.k = it->second;
            all.push_back(std::move(tc));
          }
        }
      }
    }
  }
  std::vector<TestCase> out;
  for (std::size_t i = static_cast<std::size_t>(cfg.subset_offset); i < all.size();
       i += static_cast<std::size_t>(cfg.subset_stride)) {
    out.push_back(all[i]);
  }
  return out;
}

std::filesystem::path oracle_cache_path(const std::filesystem::path& dir, std::string_view problem,
                                        std::string_view method, double tol) {
  return dir / (std::string(problem) + "__" + std::string(method) + "__" + tol_text(tol) + ".csv");
}

std::string oracle_regen_command(std::string_view problem, std::string_view method, double tol,
                                 const std::filesystem::path& dir) {
  return "mrictl oracle --problem " + std::string(problem) + " --method " + std::string(method) + " --tol " +
         tol_text(tol) + " --oracle-dir " + dir.string();
}

OracleResult obtain_oracle(std::string_view problem, std::string_view method, double tol,
                           const std::filesystem::path& dir, bool compute, const OracleConfig& cfg) {
  const auto path = oracle_cache_path(dir, problem, method, tol);
  if (std::filesystem::exists(path)) return read_oracle_csv(path);
  if (!compute) {
    throw std::runtime_error("missing oracle cache " + path.string() + "; regenerate it with `" +
                             oracle_regen_command(problem, method, tol, dir) +
                             "` or rerun with --compute-oracle");
  }
  const auto prob = make_problem(problem);
  const auto m = load_method(method);
  const auto table = rk_table_by_name(fast_table_for(method));
  auto r = optimal_hm_search(prob.ivp, m, table, tol, cfg);
  if (r.failed) throw std::runtime_error("oracle failed for " + path.string() + ": " + r.failure);
  write_oracle_csv(path, r);
  return r;
}

ControllerParams params_for(const TestCase& tc) {
  const auto m = load_method(tc.method);
  const auto table = rk_table_by_name(tc.fast_table);
  ControllerParams p = ControllerParams::defaults(tc.law, m.order_Phat, table.order_phat);
  if (!tc.k.empty()) p.k = tc.k;
  p.validate();
  return p;
}

CaseResult run_case(const TestCase& tc, const OracleResult* oracle, const std::vector<StateVec>* reference,
                    const std::filesystem::path& reference_dir, bool keep_steps) {
  CaseResult cr;
  cr.tc = tc;
  const auto prob = make_problem(tc.problem);
  std::vector<StateVec> ref_local;
  if (!reference) {
    const ReferenceCache cache(reference_dir);
    ref_local = reference_states(prob, &cache);
    reference = &ref_local;
  }
  const auto m = load_method(tc.method);
  const auto table = rk_table_by_name(tc.fast_table);
  StepPolicy pol;
  pol.tol = tc.tol;
  const auto rep = adaptive_solve(prob.ivp, prob.checkpoints, m, table, tc.strategy, params_for(tc), pol, reference);
  cr.max_error = rep.max_error;
  cr.n_slow = rep.n_slow_evals;
  cr.n_fast = rep.n_fast_evals;
  cr.accepted = rep.accepted;
  cr.rejected = rep.rejected;
  cr.failure = rep.failure;
  if (oracle) {
    cr.slow_opt = oracle->f_slow_opt;
    cr.fast_opt = oracle->f_fast_opt;
  }
  cr.metrics = compute_metrics(rep, oracle, tc.tol);
  if (keep_steps) cr.steps = rep.steps;
  return cr;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t nt = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min(nt, n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < nt; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lk(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<CaseResult> run_suite(const SuiteConfig& cfg, const std::vector<TestCase>& cases) {
  // oracles and references first, one per distinct key, so workers never race on cache files
  std::map<std::string, OracleResult> oracles;
  if (cfg.need_oracle) {
    std::vector<std::tuple<std::string, std::string, double>> keys;
    std::set<std::string> seen;
    for (const auto& tc : cases) {
      const auto p = oracle_cache_path(cfg.oracle_dir, tc.problem, tc.method, tc.tol).string();
      if (seen.insert(p).second) keys.emplace_back(tc.problem, tc.method, tc.tol);
    }
    // fail fast, before any expensive work, when caches are missing
    if (!cfg.compute_oracle) {
      for (const auto& [p, m, tol] : keys) {
        if (!std::filesystem::exists(oracle_cache_path(cfg.oracle_dir, p, m, tol))) {
          obtain_oracle(p, m, tol, cfg.oracle_dir, false);
        }
      }
    }
    std::vector<OracleResult> got(keys.size());
    parallel_for(keys.size(), cfg.threads, [&](std::size_t i) {
      const auto& [p, m, tol] = keys[i];
      got[i] = obtain_oracle(p, m, tol, cfg.oracle_dir, cfg.compute_oracle);
    });
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto& [p, m, tol] = keys[i];
      oracles[oracle_cache_path(cfg.oracle_dir, p, m, tol).string()] = std::move(got[i]);
    }
  }
  std::vector<std::string> probs;
  for (const auto& tc : cases) {
    if (std::find(probs.begin(), probs.end(), tc.problem) == probs.end()) probs.push_back(tc.problem);
  }
  std::vector<std::vector<StateVec>> refs(probs.size());
  const ReferenceCache cache(cfg.reference_dir);
  parallel_for(probs.size(), cfg.threads, [&](std::size_t i) { refs[i] = reference_states(make_problem(probs[i]), &cache); });

  std::vector<CaseResult> out(cases.size());
  parallel_for(cases.size(), cfg.threads, [&](std::size_t i) {
    const auto& tc = cases[i];
    const OracleResult* o = nullptr;
    if (cfg.need_oracle) o = &oracles.at(oracle_cache_path(cfg.oracle_dir, tc.problem, tc.method, tc.tol).string());
    const auto pi = static_cast<std::size_t>(std::find(probs.begin(), probs.end(), tc.problem) - probs.begin());
    out[i] = run_case(tc, o, &refs[pi], cfg.reference_dir, false);
  });
  std::sort(out.begin(), out.end(), [](const CaseResult& a, const CaseResult& b) { return a.tc.key() < b.tc.key(); });
  return out;
}

std::vector<CaseResult> run_suite(const SuiteConfig& cfg) { return run_suite(cfg, expand_matrix(cfg)); }

namespace {

constexpr std::string_view kCasesHeader =
    "key,problem,method,fast_table,tol,controller,strategy,k,failed,max_error,error_deviation,n_slow,n_fast,"
    "slow_opt,fast_opt,slow_cost_deviation,fast_cost_deviation,accepted,rejected";

std::string k_text(const std::vector<double>& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? ";" : "") + fmt17(k[i]);
  return s;
}

}  // namespace

std::string cases_csv(const std::vector<CaseResult>& results) {
  std::ostringstream os;
  os << kCasesHeader << '\n';
  for (const auto& r : results) {
    const auto& tc = r.tc;
    os << tc.key() << ',' << tc.problem << ',' << tc.method << ',' << tc.fast_table << ',' << fmt17(tc.tol) << ','
       << law_name(tc.law) << ',' << tc.strategy.label() << ',' << k_text(tc.k) << ',' << (r.metrics.failed ? 1 : 0)
       << ',' << fmt17(r.max_error) << ',' << fmt17(r.metrics.error_deviation) << ',' << r.n_slow << ',' << r.n_fast
       << ',' << r.slow_opt << ',' << r.fast_opt << ',' << fmt17(r.metrics.slow_cost_deviation) << ','
       << fmt17(r.metrics.fast_cost_deviation) << ',' << r.accepted << ',' << r.rejected << '\n';
  }
  return os.str();
}

std::vector<CaseResult> read_cases_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(f, line);
  if (line != kCasesHeader) throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<CaseResult> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 19) throw std::runtime_error(path.string() + ": bad row '" + line + "'");
    CaseResult r;
    r.tc.problem = c[1];
    r.tc.method = c[2];
    r.tc.fast_table = c[3];
    r.tc.tol = std::stod(c[4]);
    r.tc.law = parse_law(c[5]);
    r.tc.strategy = FastErrorStrategy::parse(c[6]);
    if (!c[7].empty()) {
      std::stringstream ks(c[7]);
      std::string v;
      while (std::getline(ks, v, ';')) r.tc.k.push_back(std::stod(v));
    }
    const bool failed = c[8] == "1";
    r.max_error = std::stod(c[9]);
    r.n_slow = std::stol(c[11]);
    r.n_fast = std::stol(c[12]);
    r.slow_opt = std::stol(c[13]);
    r.fast_opt = std::stol(c[14]);
    r.accepted = std::stol(c[17]);
    r.rejected = std::stol(c[18]);
    OracleResult o;
    o.f_slow_opt = r.slow_opt;
    o.f_fast_opt = r.fast_opt;
    r.metrics = compute_metrics(r.max_error, r.n_slow, r.n_fast, failed, r.slow_opt > 0 ? &o : nullptr, r.tc.tol);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GroupSummary> summarize(const std::vector<CaseResult>& results) {
  std::vector<GroupSummary> out;
  auto add = [&](const std::string& group, auto key_of) {
    std::vector<std::string> keys;
    for (const auto& r : results) {
      const std::string k = key_of(r);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (const auto& k : keys) {
      GroupSummary g;
      g.group = group;
      g.key = k;
      int ncost = 0;
      double se = 0, ss = 0, sf = 0;
      for (const auto& r : results) {
        if (key_of(r) != k) continue;
        ++g.n;
        if (r.metrics.failed) {
          ++g.failed;
          continue;
        }
        se += r.metrics.error_deviation;
        if (std::isfinite(r.metrics.slow_cost_deviation)) {
          ss += r.metrics.slow_cost_deviation;
          sf += r.metrics.fast_cost_deviation;
          ++ncost;
        }
      }
      const int ok = g.n - g.failed;
      g.mean_error_deviation = ok > 0 ? se / ok : nan();
      g.mean_slow_cost_deviation = ncost > 0 ? ss / ncost : nan();
      g.mean_fast_cost_deviation = ncost > 0 ? sf / ncost : nan();
      out.push_back(g);
    }
  };
  add("controller", [](const CaseResult& r) { return std::string(law_name(r.tc.law)); });
  add("strategy", [](const CaseResult& r) { return r.tc.strategy.label(); });
  add("method", [](const CaseResult& r) { return r.tc.method; });
  add("tol", [](const CaseResult& r) { return tol_text(r.tc.tol); });
  add("problem", [](const CaseResult& r) { return r.tc.problem; });
  return out;
}

std::string summary_csv(const std::vector<GroupSummary>& summary) {
  std::ostringstream os;
  os << "group,key,n,failed,mean_error_deviation,mean_slow_cost_deviation,mean_fast_cost_deviation\n";
  for (const auto& g : summary) {
    os << g.group << ',' << g.key << ',' << g.n << ',' << g.failed << ',' << fmt17(g.mean_error_deviation) << ','
       << fmt17(g.mean_slow_cost_deviation) << ',' << fmt17(g.mean_fast_cost_deviation) << '\n';
  }
  return os.str();
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << s;
}

}  // namespace

void write_report(const std::filesystem::path& dir, const std::vector<CaseResult>& results) {
  std::filesystem::create_directories(dir);
  write_text(dir / "cases.csv", cases_csv(results));
  const auto summary = summarize(results);
  write_text(dir / "summary.csv", summary_csv(summary));

  // mean deviation bars, one chart per grouping
  for (const std::string group : {"controller", "strategy"}) {
    std::vector<std::string> cats;
    std::vector<std::vector<double>> vals(3);
    for (const auto& g : summary) {
      if (g.group != group) continue;
      cats.push_back(g.key);
      vals[0].push_back(g.mean_error_deviation);
      vals[1].push_back(g.mean_slow_cost_deviation);
      vals[2].push_back(g.mean_fast_cost_deviation);
    }
    svg::Axes ax{"mean deviations by " + group, group, "deviation", false, false};
    write_text(dir / ("deviations_by_" + group + ".svg"),
               svg::bar_chart(ax, cats, {"error deviation", "slow cost deviation", "fast cost deviation"}, vals));
  }

  // total evaluations against tol, one line per controller
  std::vector<svg::Series> slow_lines, fast_lines;
  std::vector<std::string> laws;
  for (const auto& r : results) {
    const std::string l(law_name(r.tc.law));
    if (std::find(laws.begin(), laws.end(), l) == laws.end()) laws.push_back(l);
  }
  for (const auto& l : laws) {
    std::map<double, std::pair<double, double>> by_tol;
    for (const auto& r : results) {
      if (std::string(law_name(r.tc.law)) != l || r.metrics.failed) continue;
      by_tol[r.tc.tol].first += static_cast<double>(r.n_slow);
      by_tol[r.tc.tol].second += static_cast<double>(r.n_fast);
    }
    svg::Series s{l, {}, {}, false}, f{l, {}, {}, false};
    for (const auto& [tol, v] : by_tol) {
      s.x.push_back(tol);
      s.y.push_back(v.first);
      f.x.push_back(tol);
      f.y.push_back(v.second);
    }
    slow_lines.push_back(std::move(s));
    fast_lines.push_back(std::move(f));
  }
  write_text(dir / "slow_evals_vs_tol.svg",
             svg::line_plot({"slow evaluations (successful runs)", "tol", "f_slow evaluations", true, true}, slow_lines));
  write_text(dir / "fast_evals_vs_tol.svg",
             svg::line_plot({"fast evaluations (successful runs)", "tol", "f_fast evaluations", true, true}, fast_lines));
}

std::string trace_csv(const std::vector<StepRecord>& steps) {
  std::ostringstream os;
  os << "t,H,M,h,eps_s,eps_f,accepted,law\n";
  for (const auto& s : steps) {
    os << fmt17(s.t) << ',' << fmt17(s.H) << ',' << s.M << ',' << fmt17(s.H / s.M) << ',' << fmt17(s.eps_s) << ','
       << fmt17(s.eps_f) << ',' << (s.accepted ? 1 : 0) << ',' << law_name(s.law_used) << '\n';
  }
  return os.str();
}

std::string trace_svg(const std::vector<StepRecord>& steps, const std::string& title) {
  svg::Series H{"H", {}, {}, true}, h{"h = H/M", {}, {}, true};
  for (const auto& s : steps) {
    if (!s.accepted) continue;
    H.x.push_back(s.t);
    H.y.push_back(s.H);
    h.x.push_back(s.t);
    h.y.push_back(s.H / s.M);
  }
  return svg::line_plot({title, "t", "step size", false, true}, {H, h});
}

}  // namespace mri
