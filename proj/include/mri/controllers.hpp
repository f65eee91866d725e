#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mri/fast_error.hpp"
#include "mri/mri_method.hpp"
#include "mri/ode_core.hpp"

namespace mri {

enum class Law { CC, LL, PIMR, PIDMR, I, PI, PID, GUS };

Law parse_law(std::string_view text);  // cc|ll|pimr|pidmr|i|pi|pid|gus
std::string_view law_name(Law law);
bool is_multirate(Law law);
/// Number of free parameters k for the law.
int law_param_count(Law law);
/// Accepted-step history each law needs before it can run on its own.
int law_history(Law law);

struct ControllerParams {
  Law law = Law::CC;
  std::vector<double> k;  // CC: k1 k2; LL/PIMR: k11 k12 k21 k22; PIDMR: k11 k12 k13 k21 k22 k23
  int P = 1;              // slow embedding order
  int p = 1;              // fast embedding order

  /// Optimized defaults for the multirate laws, textbook values for the rest.
  static ControllerParams defaults(Law law, int P, int p);
  void validate() const;
};

/// Exponents applied to eta^s (alpha, beta1) and eta^f (beta2), most recent
/// first. Unused slots are zero.
struct Exponents {
  std::array<double, 3> alpha{};
  std::array<double, 3> beta1{};
  std::array<double, 3> beta2{};
};

Exponents compute_exponents(const ControllerParams& params);

/// Histories are most-recent-first: H[0] = H_n (the step just taken), M[0] = M_n,
/// eta_s[0] = eta^s_{n+1} (its oversolve factor).
struct ControllerState {
  static constexpr std::size_t depth = 3;
  std::vector<double> H, M, eta_s, eta_f;
  int warmup_count = 0;  // accepted steps so far

  void push(double H_n, double M_n, double eta_s_next, double eta_f_next);
  [[nodiscard]] std::size_t size() const { return H.size(); }
};

struct StepPolicy {
  double tol = 1e-5;
  double tol_split = 0.5;  // tol_s = tol_split*tol, tol_f = (1-tol_split)*tol
  double H_min = 1e-12;    // absolute
  double H_max = 1e300;
  int M_max = 100000;
  int max_rejections = 50;  // consecutive
  double H0 = 0.0;          // 0 selects 1e-4*(tf - t0)
  int M0 = 10;
  double growth_min = 0.1;
  double growth_max = 5.0;
  double eps_floor = 1e-16;
  long max_steps = 10'000'000;
  int single_rate_M = 10;

  [[nodiscard]] double tol_s() const { return tol_split * tol; }
  [[nodiscard]] double tol_f() const { return (1.0 - tol_split) * tol; }
};

struct HMUpdate {
  double H = 0.0;
  double M_real = 1.0;
  int M = 1;
};

/// Raw laws (no growth clamp). M = ceil(M_real), at least 1.
HMUpdate update_CC(const ControllerState& s, const ControllerParams& params);
HMUpdate update_LL(const ControllerState& s, const ControllerParams& params);
HMUpdate update_PIMR(const ControllerState& s, const ControllerParams& params);
HMUpdate update_PIDMR(const ControllerState& s, const ControllerParams& params);
/// I, PI, PID, GUS. M is carried over from the history.
HMUpdate update_singlerate(const ControllerState& s, const ControllerParams& params);

/// Dispatches on params.law, falling back to the warm-up law (CC with its
/// default k for multirate laws, I for single-rate) while history is short.
/// `law_used` receives the law that produced the result.
HMUpdate controller_update(const ControllerState& s, const ControllerParams& params, Law* law_used = nullptr);

/// Update after a rejected step with size H_failed, multirate ratio M_failed
/// and oversolve factors eta_s, eta_f.
HMUpdate rejection_update(double H_failed, int M_failed, double eta_s, double eta_f,
                          const ControllerParams& params);

/// Applies the growth clamp relative to H_prev and the policy bounds.
HMUpdate limit_update(HMUpdate u, double H_prev, const StepPolicy& policy);

struct StepRecord {
  double t = 0.0;
  double H = 0.0;
  int M = 1;
  double eps_s = 0.0;
  double eps_f = 0.0;
  bool accepted = false;
  Law law_used = Law::CC;
};

struct SolveReport {
  std::vector<StepRecord> steps;
  std::vector<double> checkpoint_times;
  std::vector<StateVec> checkpoint_states;
  std::vector<double> checkpoint_errors;  // empty without references
  double max_error = 0.0;
  long n_slow_evals = 0;  // includes Newton evaluations
  long n_fast_evals = 0;
  long n_slow_solver_evals = 0;
  long accepted = 0;
  long rejected = 0;
  bool failed = false;
  std::string failure;
  StateVec y_final;
};

using StepFn = std::function<MRIStepResult(double t, std::span<const double> y, double H, int M)>;

/// Generic accept/reject loop around an arbitrary step function. Lands
/// exactly on every checkpoint; the last checkpoint is the final time.
SolveReport run_controller(const StepFn& step, double t0, std::span<const double> y0,
                           std::span<const double> checkpoints, const ControllerParams& params,
                           const StepPolicy& policy, const std::vector<StateVec>* reference = nullptr);

SolveReport adaptive_solve(const SplitIVP& ivp, std::span<const double> checkpoints, const MRIMethod& method,
                           const EmbeddedRKTable& fast_table, const FastErrorStrategy& strategy,
                           const ControllerParams& params, const StepPolicy& policy,
                           const std::vector<StateVec>* reference = nullptr, const MRIStepOptions& opts = {});

}  // namespace mri
