#include "mri/oracle.hpp"

#include "mri/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace mri {

void OracleConfig::validate() const {
  if (!(slow_weight > 0 && H_fine > 0 && H_tol > 0 && H_interval > 0 && eff_rtol > 0)) {
    throw std::invalid_argument("oracle config: all parameters must be positive");
  }
  if (M_min_iter < 1 || M_min_iter >= M_max_iter) {
    throw std::invalid_argument("oracle config: need 1 <= M_min_iter < M_max_iter");
  }
  if (threads < 1) throw std::invalid_argument("oracle config: threads must be >= 1");
}

double oracle_cost(long n_slow, long n_fast, double slow_weight) {
  return slow_weight * static_cast<double>(n_slow) + static_cast<double>(n_fast);
}

namespace {

FindHResult from_probe(const Probe& p, double H, const OracleConfig& cfg) {
  FindHResult r;
  r.H = H;
  r.err = p.err;
  r.n_slow = p.n_slow;
  r.n_fast = p.n_fast;
  r.eff = H / oracle_cost(p.n_slow, p.n_fast, cfg.slow_weight);
  r.y_next = p.y_next;
  r.ok = true;
  return r;
}

bool passes(const Probe& p, double tol) { return !p.failed && std::isfinite(p.err) && p.err < tol; }

}  // namespace

FindHResult find_H(const ProbeFn& probe, double t, std::span<const double> y, double tf, int M, double tol,
                   const OracleConfig& cfg) {
  FindHResult out;
  int n = 0;
  auto run = [&](double H) {
    ++n;
    return probe(t, y, H, M);
  };

  Probe p = run(cfg.H_fine);
  if (!passes(p, tol)) {
    out.failure = "H_fine was insufficiently small (M=" + std::to_string(M) + ", t=" + std::to_string(t) + ")";
    out.probes = n;
    return out;
  }
  // `best` always holds the probe at H_left, the largest H known to pass
  FindHResult best = from_probe(p, cfg.H_fine, cfg);

  double H_left = 0.0;
  double H_right = 0.0;
  bool err_ok = true;
  while (err_ok && t + H_right < tf) {
    H_left = H_right;
    H_right = std::min(H_right + cfg.H_interval, tf - t);
    p = run(H_right);
    err_ok = passes(p, tol);
    if (err_ok) best = from_probe(p, H_right, cfg);
  }
  if (!err_ok) {
    double H_mid = 0.5 * (H_left + H_right);
    // guard against a bracket that cannot shrink in floating point
    for (int it = 0; (H_right - H_left) / H_mid > cfg.H_tol && it < 2000; ++it) {
      H_mid = 0.5 * (H_left + H_right);
      if (H_mid <= H_left || H_mid >= H_right) break;
      p = run(H_mid);
      if (passes(p, tol) || (!p.failed && p.err == tol)) {
        H_left = H_mid;
        best = from_probe(p, H_mid, cfg);
      } else {
        H_right = H_mid;
      }
    }
  }
  best.probes = n;
  return best;
}

std::vector<double> OracleResult::H_opt() const {
  std::vector<double> v;
  for (const auto& s : steps) v.push_back(s.H);
  return v;
}

std::vector<int> OracleResult::M_opt() const {
  std::vector<int> v;
  for (const auto& s : steps) v.push_back(s.M);
  return v;
}

OracleResult optimal_hm_search(const ProbeFn& probe, double t0, std::span<const double> y0, double tf,
                               double tol, const OracleConfig& cfg) {
  cfg.validate();
  OracleResult res;
  double t = t0;
  StateVec y(y0.begin(), y0.end());
  const int batch = std::max(1, cfg.threads);

  while (t + cfg.H_fine < tf) {
    std::vector<FindHResult> cands;
    std::vector<int> Ms;
    double eff_max = 0.0;
    bool stop = false;
    int M = 1;
    while (!stop && M < cfg.M_max_iter) {
      // evaluate a batch of consecutive M in parallel, then consume in order
      const int hi = std::min(cfg.M_max_iter, M + batch);
      std::vector<FindHResult> got(static_cast<std::size_t>(hi - M));
      if (batch == 1) {
        got[0] = find_H(probe, t, y, tf, M, tol, cfg);
      } else {
        std::vector<std::future<FindHResult>> fut;
        for (int m = M; m < hi; ++m) {
          fut.push_back(std::async(std::launch::async, [&, m] { return find_H(probe, t, y, tf, m, tol, cfg); }));
        }
        for (std::size_t q = 0; q < fut.size(); ++q) got[q] = fut[q].get();
      }
      for (auto& r : got) {
        if (!r.ok) {
          res.failed = true;
          res.failure = r.failure;
          return res;
        }
        if (!cands.empty() && (eff_max - r.eff) / eff_max > cfg.eff_rtol && M > cfg.M_min_iter) {
          stop = true;
          break;
        }
        eff_max = std::max(eff_max, r.eff);
        Ms.push_back(M);
        cands.push_back(std::move(r));
        ++M;
      }
    }
    // first index of the maximum, as indexOf does
    std::size_t opt = 0;
    for (std::size_t q = 1; q < cands.size(); ++q) {
      if (cands[q].eff > cands[opt].eff) opt = q;
    }
    const auto& c = cands[opt];
    if (!(c.err <= tol)) throw std::logic_error("oracle committed a step above tol");
    res.steps.push_back({t, c.H, Ms[opt], c.n_slow, c.n_fast, c.eff, c.err});
    res.f_slow_opt += c.n_slow;
    res.f_fast_opt += c.n_fast;
    t += c.H;
    y = c.y_next;
  }
  return res;
}

namespace {

// Reference memo for the step being searched. All probes of one step share
// (t, y), so the key can drop y; a new t starts a new step.
class ReferenceMemo {
 public:
  StateVec get(const SplitIVP& ivp, const AdaptiveOptions& opts, double t, std::span<const double> y, double H) {
    {
      std::lock_guard lk(mu_);
      if (t != t_ || StateVec(y.begin(), y.end()) != y_) {
        t_ = t;
        y_.assign(y.begin(), y.end());
        memo_.clear();
      }
      auto it = memo_.find(H);
      if (it != memo_.end()) return it->second;
    }
    const Rhs full = [&ivp](double tt, std::span<const double> yy, std::span<double> out) {
      ivp.f_slow(tt, yy, out);
      StateVec tmp(out.size());
      ivp.f_fast(tt, yy, tmp);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
    };
    const double ts[] = {t + H};
    StateVec r = integrate_adaptive(full, t, y, ts, opts).at(0);
    std::lock_guard lk(mu_);
    if (t == t_) memo_.emplace(H, r);
    return r;
  }

 private:
  std::mutex mu_;
  double t_ = std::nan("");
  StateVec y_;
  std::map<double, StateVec> memo_;
};

}  // namespace

ProbeFn mri_probe(const SplitIVP& ivp, const MRIMethod& method, const EmbeddedRKTable& fast_table,
                  const FastErrorStrategy& strategy, const MRIStepOptions& opts, const AdaptiveOptions& reference) {
  auto memo = std::make_shared<ReferenceMemo>();
  return [&ivp, &method, &fast_table, strategy, opts, reference, memo](double t, std::span<const double> y,
                                                                       double H, int M) {
    Probe p;
    const auto r = mri_step(method, fast_table, ivp, t, y, H, M, strategy, opts);
    p.n_slow = r.n_slow_evals + r.n_slow_solver_evals;
    p.n_fast = r.n_fast_evals;
    p.failed = r.failed || !all_finite(r.y_next);
    if (p.failed) {
      p.err = std::numeric_limits<double>::infinity();
      return p;
    }
    StateVec ref;
    try {
      ref = memo->get(ivp, reference, t, y, H);
    } catch (const std::runtime_error&) {
      p.failed = true;
      p.err = std::numeric_limits<double>::infinity();
      return p;
    }
    p.err = err_norm_diff(r.y_next, ref, ref, opts.norm);
    p.y_next = r.y_next;
    return p;
  };
}

OracleResult optimal_hm_search(const SplitIVP& ivp, const MRIMethod& method, const EmbeddedRKTable& fast_table,
                               double tol, const OracleConfig& cfg, const FastErrorStrategy& strategy) {
  const auto probe = mri_probe(ivp, method, fast_table, strategy);
  return optimal_hm_search(probe, ivp.t0, ivp.y0, ivp.tf, tol, cfg);
}

std::string oracle_csv(const OracleResult& r) {
  std::ostringstream os;
  os << "step,t,H_opt,M_opt,n_slow,n_fast,eff\n";
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const auto& s = r.steps[i];
    os << i << ',' << fmt17(s.t) << ',' << fmt17(s.H) << ',' << s.M << ',' << s.n_slow << ',' << s.n_fast << ','
       << fmt17(s.eff) << '\n';
  }
  os << "total,,,," << r.f_slow_opt << ',' << r.f_fast_opt << ",\n";
  return os.str();
}

void write_oracle_csv(const std::filesystem::path& path, const OracleResult& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << oracle_csv(r);
}

OracleResult read_oracle_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read oracle cache " + path.string());
  OracleResult r;
  std::string line;
  std::getline(f, line);
  if (line != "step,t,H_opt,M_opt,n_slow,n_fast,eff") throw std::runtime_error(path.string() + ": bad header");
  bool total = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto c = split_csv(line);
    while (c.size() < 7) c.emplace_back();
    if (c[0] == "total") {
      r.f_slow_opt = std::stol(c[4]);
      r.f_fast_opt = std::stol(c[5]);
      total = true;
      continue;
    }
    OracleStep s;
    s.t = std::stod(c[1]);
    s.H = std::stod(c[2]);
    s.M = std::stoi(c[3]);
    s.n_slow = std::stol(c[4]);
    s.n_fast = std::stol(c[5]);
    s.eff = std::stod(c[6]);
    r.steps.push_back(s);
  }
  if (!total) throw std::runtime_error(path.string() + ": missing total row");
  return r;
}

}  // namespace mri
