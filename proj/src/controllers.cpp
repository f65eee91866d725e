#include "mri/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mri {

Law parse_law(std::string_view text) {
  if (text == "cc") return Law::CC;
  if (text == "ll") return Law::LL;
  if (text == "pimr") return Law::PIMR;
  if (text == "pidmr") return Law::PIDMR;
  if (text == "i") return Law::I;
  if (text == "pi") return Law::PI;
  if (text == "pid") return Law::PID;
  if (text == "gus") return Law::GUS;
  throw std::invalid_argument("unknown controller '" + std::string(text) + "' (expected cc|ll|pimr|pidmr|i|pi|pid|gus)");
}

std::string_view law_name(Law law) {
  switch (law) {
    case Law::CC: return "cc";
    case Law::LL: return "ll";
    case Law::PIMR: return "pimr";
    case Law::PIDMR: return "pidmr";
    case Law::I: return "i";
    case Law::PI: return "pi";
    case Law::PID: return "pid";
    case Law::GUS: return "gus";
  }
  return "?";
}

bool is_multirate(Law law) { return law == Law::CC || law == Law::LL || law == Law::PIMR || law == Law::PIDMR; }

int law_param_count(Law law) {
  switch (law) {
    case Law::CC: return 2;
    case Law::LL:
    case Law::PIMR: return 4;
    case Law::PIDMR: return 6;
    case Law::I: return 1;
    case Law::PI: return 2;
    case Law::PID: return 3;
    case Law::GUS: return 2;
  }
  return 0;
}

int law_history(Law law) {
  switch (law) {
    case Law::CC:
    case Law::I: return 1;
    case Law::LL:
    case Law::PIMR:
    case Law::PI:
    case Law::GUS: return 2;
    case Law::PIDMR:
    case Law::PID: return 3;
  }
  return 1;
}

ControllerParams ControllerParams::defaults(Law law, int P, int p) {
  ControllerParams c;
  c.law = law;
  c.P = P;
  c.p = p;
  switch (law) {
    case Law::CC: c.k = {0.42, 0.44}; break;
    case Law::LL: c.k = {0.82, 0.54, 0.94, 0.9}; break;
    case Law::PIMR: c.k = {0.18, 0.86, 0.34, 0.80}; break;
    case Law::PIDMR: c.k = {0.34, 0.10, 0.78, 0.46, 0.42, 0.74}; break;
    case Law::I: c.k = {1.0}; break;
    case Law::PI: c.k = {0.6, 0.2}; break;
    case Law::PID: c.k = {0.49, 0.34, 0.10}; break;
    case Law::GUS: c.k = {0.98, 0.95}; break;
  }
  return c;
}

void ControllerParams::validate() const {
  if (static_cast<int>(k.size()) != law_param_count(law)) {
    throw std::invalid_argument("controller " + std::string(law_name(law)) + " expects " +
                                std::to_string(law_param_count(law)) + " parameters, got " +
                                std::to_string(k.size()));
  }
  if (P < 1 || p < 1) throw std::invalid_argument("controller orders must be >= 1");
  for (double v : k) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw std::invalid_argument("controller parameters must lie in [0,1]");
  }
}

Exponents compute_exponents(const ControllerParams& c) {
  Exponents e;
  const double P = c.P, p = c.p;
  const auto& k = c.k;
  switch (c.law) {
    case Law::CC:
      e.alpha[0] = k[0] / P;
      e.beta1[0] = (p + 1) * k[0] / (P * p);
      e.beta2[0] = -k[1] / p;
      break;
    case Law::LL:
    case Law::PIMR:
      e.alpha[0] = (k[0] + k[1]) / (2 * P);
      e.alpha[1] = -k[0] / (2 * P);
      e.beta1[0] = (p + 1) * (k[0] + k[1]) / (2 * P * p);
      e.beta1[1] = -(p + 1) * k[0] / (2 * P * p);
      e.beta2[0] = -(k[2] + k[3]) / (2 * p);
      e.beta2[1] = k[2] / (2 * p);
      break;
    case Law::PIDMR:
      e.alpha[0] = (k[0] + k[1] + k[2]) / (3 * P);
      e.alpha[1] = -(k[0] + k[1]) / (3 * P);
      e.alpha[2] = k[0] / (3 * P);
      e.beta1[0] = (p + 1) * (k[0] + k[1] + k[2]) / (3 * P * p);
      e.beta1[1] = -(p + 1) * (k[0] + k[1]) / (3 * P * p);
      e.beta1[2] = (p + 1) * k[0] / (3 * P * p);
      e.beta2[0] = -(k[3] + k[4] + k[5]) / (3 * p);
      e.beta2[1] = (k[3] + k[4]) / (3 * p);
      e.beta2[2] = -k[3] / (3 * p);
      break;
    case Law::I:
      e.alpha[0] = k[0] / P;
      break;
    case Law::PI:
      e.alpha[0] = k[0] / P;
      e.alpha[1] = -k[1] / P;
      break;
    case Law::PID:
      e.alpha[0] = k[0] / P;
      e.alpha[1] = -k[1] / P;
      e.alpha[2] = k[2] / P;
      break;
    case Law::GUS:
      e.alpha[0] = (k[0] + k[1]) / P;
      e.alpha[1] = -k[1] / P;
      break;
  }
  return e;
}

void ControllerState::push(double H_n, double M_n, double eta_s_next, double eta_f_next) {
  auto front = [](std::vector<double>& v, double x) {
    v.insert(v.begin(), x);
    if (v.size() > depth) v.pop_back();
  };
  front(H, H_n);
  front(M, M_n);
  front(eta_s, eta_s_next);
  front(eta_f, eta_f_next);
  ++warmup_count;
}

namespace {

int ceil_M(double m) {
  if (!(m < 2147483647.0)) return 2147483647;
  const double c = std::ceil(m);
  return c < 1.0 ? 1 : static_cast<int>(c);
}

// Product law over `depth` history entries; `trend` adds the H0/H1 (M0/M1) factor.
HMUpdate product_law(const ControllerState& s, const Exponents& e, std::size_t depth, bool trend, bool move_M) {
  if (s.size() < depth) throw std::logic_error("controller history too short");
  double H = s.H[0];
  double M = s.M[0];
  if (trend) {
    H *= s.H[0] / s.H[1];
    if (move_M) M *= s.M[0] / s.M[1];
  }
  for (std::size_t i = 0; i < depth; ++i) {
    if (e.alpha[i] != 0.0) H *= std::pow(s.eta_s[i], e.alpha[i]);
    if (move_M) {
      if (e.beta1[i] != 0.0) M *= std::pow(s.eta_s[i], e.beta1[i]);
      if (e.beta2[i] != 0.0) M *= std::pow(s.eta_f[i], e.beta2[i]);
    }
  }
  return {H, M, ceil_M(M)};
}

ControllerParams warmup_params(const ControllerParams& c) {
  if (c.law == Law::CC) return c;
  if (is_multirate(c.law)) return ControllerParams::defaults(Law::CC, c.P, c.p);
  return ControllerParams::defaults(Law::I, c.P, c.p);
}

}  // namespace

HMUpdate update_CC(const ControllerState& s, const ControllerParams& c) {
  return product_law(s, compute_exponents(c), 1, false, true);
}

HMUpdate update_LL(const ControllerState& s, const ControllerParams& c) {
  return product_law(s, compute_exponents(c), 2, true, true);
}

HMUpdate update_PIMR(const ControllerState& s, const ControllerParams& c) {
  return product_law(s, compute_exponents(c), 2, false, true);
}

HMUpdate update_PIDMR(const ControllerState& s, const ControllerParams& c) {
  return product_law(s, compute_exponents(c), 3, false, true);
}

HMUpdate update_singlerate(const ControllerState& s, const ControllerParams& c) {
  const auto depth = static_cast<std::size_t>(law_history(c.law));
  return product_law(s, compute_exponents(c), depth, c.law == Law::GUS, false);
}

HMUpdate controller_update(const ControllerState& s, const ControllerParams& c, Law* law_used) {
  ControllerParams eff = c;
  if (s.size() < static_cast<std::size_t>(law_history(c.law))) eff = warmup_params(c);
  if (law_used) *law_used = eff.law;
  switch (eff.law) {
    case Law::CC: return update_CC(s, eff);
    case Law::LL: return update_LL(s, eff);
    case Law::PIMR: return update_PIMR(s, eff);
    case Law::PIDMR: return update_PIDMR(s, eff);
    default: return update_singlerate(s, eff);
  }
}

HMUpdate rejection_update(double H_failed, int M_failed, double eta_s, double eta_f, const ControllerParams& c) {
  ControllerState one;
  one.push(H_failed, M_failed, eta_s, eta_f);
  const ControllerParams w = warmup_params(c);
  HMUpdate u = is_multirate(c.law) ? update_CC(one, w) : update_singlerate(one, w);
  u.H = std::min(u.H, 0.9 * H_failed);
  return u;
}

HMUpdate limit_update(HMUpdate u, double H_prev, const StepPolicy& policy) {
  if (!std::isfinite(u.H)) u.H = policy.growth_max * H_prev;
  u.H = std::clamp(u.H, policy.growth_min * H_prev, policy.growth_max * H_prev);
  u.H = std::min(u.H, policy.H_max);
  u.M = std::clamp(u.M, 1, policy.M_max);
  return u;
}

SolveReport run_controller(const StepFn& step, double t0, std::span<const double> y0,
                           std::span<const double> checkpoints, const ControllerParams& params,
                           const StepPolicy& policy, const std::vector<StateVec>* reference) {
  params.validate();
  if (checkpoints.empty()) throw std::invalid_argument("run_controller: no checkpoints");
  if (reference && reference->size() != checkpoints.size()) {
    throw std::invalid_argument("run_controller: reference/checkpoint count mismatch");
  }
  const double tf = checkpoints.back();
  const bool multirate = is_multirate(params.law);

  SolveReport rep;
  ControllerState state;
  double t = t0;
  StateVec y(y0.begin(), y0.end());
  double H = policy.H0 > 0.0 ? policy.H0 : 1e-4 * (tf - t0);
  int M = multirate ? std::clamp(policy.M0, 1, policy.M_max) : policy.single_rate_M;
  std::size_t ci = 0;
  int consecutive = 0;

  auto fail = [&](std::string why) {
    rep.failed = true;
    rep.failure = std::move(why);
  };

  while (ci < checkpoints.size()) {
    if (static_cast<long>(rep.steps.size()) >= policy.max_steps) {
      fail("step limit reached");
      break;
    }
    const double target = checkpoints[ci];
    double Hs = H;
    bool hit = false;
    // land on the checkpoint; stretch by up to 1% rather than leave a sliver
    if (t + 1.01 * Hs >= target) {
      Hs = target - t;
      hit = true;
    }
    if (!(Hs >= policy.H_min)) {
      fail("step size fell below H_min at t=" + std::to_string(t));
      break;
    }
    MRIStepResult r = step(t, y, Hs, M);
    rep.n_slow_evals += r.n_slow_evals + r.n_slow_solver_evals;
    rep.n_slow_solver_evals += r.n_slow_solver_evals;
    rep.n_fast_evals += r.n_fast_evals;

    StepRecord rec;
    rec.t = t;
    rec.H = Hs;
    rec.M = M;

    if (r.failed) {
      rec.eps_s = rec.eps_f = std::numeric_limits<double>::infinity();
      rec.law_used = params.law;
      rep.steps.push_back(rec);
      ++rep.rejected;
      if (++consecutive > policy.max_rejections) {
        fail("too many consecutive rejections at t=" + std::to_string(t));
        break;
      }
      H = 0.25 * Hs;
      continue;
    }

    const double es = std::max(r.eps_slow, policy.eps_floor);
    const double ef = std::max(r.eps_fast, policy.eps_floor);
    rec.eps_s = r.eps_slow;
    rec.eps_f = r.eps_fast;
    double eta_s, eta_f;
    bool accept;
    if (multirate) {
      eta_s = policy.tol_s() / es;
      eta_f = policy.tol_f() / ef;
      accept = r.eps_slow <= policy.tol_s() && r.eps_fast <= policy.tol_f();
    } else {
      // single-rate baselines control eps_s alone against the full tolerance
      eta_s = policy.tol / es;
      eta_f = 1.0;
      accept = r.eps_slow <= policy.tol;
    }

    HMUpdate u;
    if (accept) {
      consecutive = 0;
      ++rep.accepted;
      rec.accepted = true;
      t = hit ? target : t + Hs;
      y = std::move(r.y_next);
      state.push(Hs, M, eta_s, eta_f);
      u = limit_update(controller_update(state, params, &rec.law_used), Hs, policy);
      if (hit) {
        rep.checkpoint_times.push_back(t);
        rep.checkpoint_states.push_back(y);
        if (reference) {
          const auto& ref = (*reference)[ci];
          const double e = err_norm_diff(y, ref, ref);
          rep.checkpoint_errors.push_back(e);
          rep.max_error = std::max(rep.max_error, e);
        }
        ++ci;
      }
    } else {
      ++rep.rejected;
      rec.law_used = multirate ? Law::CC : Law::I;
      if (++consecutive > policy.max_rejections) {
        rep.steps.push_back(rec);
        fail("too many consecutive rejections at t=" + std::to_string(t));
        break;
      }
      u = limit_update(rejection_update(Hs, M, eta_s, eta_f, params), Hs, policy);
      u.H = std::min(u.H, 0.9 * Hs);
    }
    rep.steps.push_back(rec);
    H = u.H;
    if (multirate) M = u.M;
  }
  rep.y_final = y;
  if (rep.failed && reference) rep.max_error = std::numeric_limits<double>::infinity();
  return rep;
}

SolveReport adaptive_solve(const SplitIVP& ivp, std::span<const double> checkpoints, const MRIMethod& method,
                           const EmbeddedRKTable& fast_table, const FastErrorStrategy& strategy,
                           const ControllerParams& params, const StepPolicy& policy,
                           const std::vector<StateVec>* reference, const MRIStepOptions& opts) {
  StepFn fn = [&](double t, std::span<const double> y, double H, int M) {
    return mri_step(method, fast_table, ivp, t, y, H, M, strategy, opts);
  };
  StepPolicy pol = policy;
  pol.H_max = std::min(pol.H_max, ivp.tf - ivp.t0);
  return run_controller(fn, ivp.t0, ivp.y0, checkpoints, params, pol, reference);
}

}  // namespace mri
