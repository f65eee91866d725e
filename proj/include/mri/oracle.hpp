#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mri/fast_error.hpp"
#include "mri/mri_method.hpp"
#include "mri/ode_core.hpp"
#include "mri/rk_inner.hpp"

namespace mri {

struct OracleConfig {
  double slow_weight = 10.0;
  double H_fine = 1e-10;
  double H_tol = 1e-5;
  double H_interval = 1e-1;
  int M_max_iter = 400;
  int M_min_iter = 10;
  double eff_rtol = 1e-1;
  int threads = 1;  // parallel M sweep; results do not depend on it

  void validate() const;
};

/// One trial step of size H: its error against a reference started from the
/// same state, the evaluation counts and the new state.
struct Probe {
  double err = 0.0;
  long n_slow = 0;
  long n_fast = 0;
  StateVec y_next;
  bool failed = false;
};

/// Must be safe to call concurrently for the same (t, y) with different M.
using ProbeFn = std::function<Probe(double t, std::span<const double> y, double H, int M)>;

struct FindHResult {
  double H = 0.0;
  double eff = 0.0;
  double err = 0.0;
  long n_slow = 0;
  long n_fast = 0;
  StateVec y_next;
  int probes = 0;
  bool ok = false;
  std::string failure;
};

double oracle_cost(long n_slow, long n_fast, double slow_weight);

/// Largest H (to relative H_tol) with err(H) <= tol for a fixed M, by bracket
/// expansion in steps of H_interval followed by bisection. Fails when even
/// H_fine misses tol.
FindHResult find_H(const ProbeFn& probe, double t, std::span<const double> y, double tf, int M, double tol,
                   const OracleConfig& cfg);

struct OracleStep {
  double t = 0.0;  // start of the step
  double H = 0.0;
  int M = 1;
  long n_slow = 0;
  long n_fast = 0;
  double eff = 0.0;
  double err = 0.0;
};

struct OracleResult {
  std::vector<OracleStep> steps;
  long f_slow_opt = 0;
  long f_fast_opt = 0;
  bool failed = false;
  std::string failure;

  [[nodiscard]] std::vector<double> H_opt() const;
  [[nodiscard]] std::vector<int> M_opt() const;
};

/// Greedy per-step search: sweeps M = 1, 2, ... through find_H and commits the
/// most efficient pair. Totals count committed steps only.
OracleResult optimal_hm_search(const ProbeFn& probe, double t0, std::span<const double> y0, double tf,
                               double tol, const OracleConfig& cfg);

/// Probe for an MRI method: the reference is a tight Verner solve from (t, y)
/// over H, memoized by (t, H) for the step being searched.
ProbeFn mri_probe(const SplitIVP& ivp, const MRIMethod& method, const EmbeddedRKTable& fast_table,
                  const FastErrorStrategy& strategy, const MRIStepOptions& opts = {},
                  const AdaptiveOptions& reference = {});

OracleResult optimal_hm_search(const SplitIVP& ivp, const MRIMethod& method, const EmbeddedRKTable& fast_table,
                               double tol, const OracleConfig& cfg,
                               const FastErrorStrategy& strategy = FastErrorStrategy{});

/// CSV: step,t,H_opt,M_opt,n_slow,n_fast,eff then a "total" trailer row.
void write_oracle_csv(const std::filesystem::path& path, const OracleResult& r);
std::string oracle_csv(const OracleResult& r);
OracleResult read_oracle_csv(const std::filesystem::path& path);

}  // namespace mri
