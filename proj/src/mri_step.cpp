#include <cmath>
#include <stdexcept>

#include "mri/mri_method.hpp"

namespace mri {

int substeps_for(double dc, int M) {
  const int m = static_cast<int>(std::ceil(dc * M - 1e-12));
  return m < 1 ? 1 : m;
}

namespace {

// Coefficient row accessor: coef(k, j). Used for both gamma rows and the
// embedding row so one stage solver serves both.
using RowFn = std::function<double(int k, int j)>;

struct StepContext {
  const MRIMethod& method;
  const EmbeddedRKTable& table;
  const SplitIVP& ivp;
  double t;
  double H;
  int M;
  const MRIStepOptions& opts;
};

struct Pass {
  std::vector<StateVec> Y;
  std::vector<StateVec> F;
  std::vector<double> stage_err;  // LASA sums or SA differences, fast stages only
  long slow = 0;
  long fast = 0;
  long solver = 0;
  bool failed = false;
};

enum class StageErr { none, lasa, sa };

// Solves stage `i` from v0 using coefficient row `coef`. Columns < i come from
// pass.F; a nonzero column i makes the stage implicit in f_slow.
bool solve_stage(const StepContext& cx, Pass& pass, int i, const RowFn& coef, std::span<const double> v0,
                 Propagate prop, StageErr err_mode, StateVec& out) {
  const auto& m = cx.method;
  const std::size_t dim = v0.size();
  const int K = m.num_gamma();
  const double dci = m.dc[static_cast<std::size_t>(i)];

  if (dci > 0.0) {
    // R[k] = (1/dc_i) sum_j coef(k,j) F_j
    std::vector<StateVec> R(static_cast<std::size_t>(K), StateVec(dim, 0.0));
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < i; ++j) {
        const double g = coef(k, j);
        if (g != 0.0) axpy(g / dci, pass.F[static_cast<std::size_t>(j)], R[static_cast<std::size_t>(k)]);
      }
    }
    const double theta0 = cx.t + m.c[static_cast<std::size_t>(i - 1)] * cx.H;
    const double thetaF = cx.t + m.c[static_cast<std::size_t>(i)] * cx.H;
    const double width = dci * cx.H;
    const Rhs& ff = cx.ivp.f_fast;
    Rhs forced = [&](double th, std::span<const double> v, std::span<double> o) {
      ff(th, v, o);
      const double tau = (th - theta0) / width;
      for (std::size_t d = 0; d < dim; ++d) {
        double acc = R[static_cast<std::size_t>(K - 1)][d];
        for (int k = K - 2; k >= 0; --k) acc = acc * tau + R[static_cast<std::size_t>(k)][d];
        o[d] += acc;
      }
    };
    const int msub = substeps_for(dci, cx.M);
    auto res = subcycle(cx.table, forced, theta0, thetaF, v0, msub, prop, cx.opts.norm);
    pass.fast += res.n_evals;
    if (res.failed) return false;
    out = std::move(res.y_final);
    if (err_mode == StageErr::lasa) {
      pass.stage_err.push_back(res.local_err_sum);
    } else if (err_mode == StageErr::sa) {
      auto alt = subcycle(cx.table, forced, theta0, thetaF, v0, msub, Propagate::embedded, cx.opts.norm);
      pass.fast += alt.n_evals;
      if (alt.failed) return false;
      pass.stage_err.push_back(err_norm_diff(out, alt.y_final, out, cx.opts.norm));
    }
    return all_finite(out);
  }

  // algebraic stage: Y_i = v0 + H sum_j gbar_j F_j (+ H gbar_i f_slow(Y_i))
  auto gbar = [&](int j) {
    double g = 0.0;
    for (int k = 0; k < K; ++k) g += coef(k, j) / (k + 1);
    return g;
  };
  StateVec base(v0.begin(), v0.end());
  for (int j = 0; j < i; ++j) {
    const double g = gbar(j);
    if (g != 0.0) axpy(cx.H * g, pass.F[static_cast<std::size_t>(j)], base);
  }
  const double gii = gbar(i);
  if (gii == 0.0) {
    out = std::move(base);
    return all_finite(out);
  }
  const double ti = cx.t + m.c[static_cast<std::size_t>(i)] * cx.H;
  const double hg = cx.H * gii;
  StateVec fz(dim);
  Residual residual = [&](std::span<const double> z, std::span<double> r) {
    cx.ivp.f_slow(ti, z, fz);
    for (std::size_t d = 0; d < dim; ++d) r[d] = z[d] - base[d] - hg * fz[d];
  };
  NewtonStats st;
  auto z = newton_solve(residual, base, cx.opts.newton, &st);
  pass.solver += st.residual_evals;
  if (!z) return false;
  out = std::move(*z);
  return all_finite(out);
}

Pass run_pass(const StepContext& cx, std::span<const double> y, Propagate prop, StageErr err_mode) {
  const auto& m = cx.method;
  const std::size_t dim = y.size();
  Pass pass;
  pass.Y.assign(static_cast<std::size_t>(m.s), StateVec{});
  pass.F.assign(static_cast<std::size_t>(m.s), StateVec{});
  pass.Y[0].assign(y.begin(), y.end());
  for (int i = 0; i < m.s; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (i > 0) {
      RowFn row = [&m, i](int k, int j) { return m.G(k, i, j); };
      if (!solve_stage(cx, pass, i, row, pass.Y[ui - 1], prop, err_mode, pass.Y[ui])) {
        pass.failed = true;
        return pass;
      }
    }
    if (m.slow_needed[ui]) {
      pass.F[ui].assign(dim, 0.0);
      cx.ivp.f_slow(cx.t + m.c[ui] * cx.H, pass.Y[ui], pass.F[ui]);
      ++pass.slow;
      if (!all_finite(pass.F[ui])) {
        pass.failed = true;
        return pass;
      }
    }
  }
  return pass;
}

}  // namespace

MRIStepResult mri_step(const MRIMethod& method, const EmbeddedRKTable& fast_table, const SplitIVP& ivp, double t,
                       std::span<const double> y, double H, int M, const FastErrorStrategy& strategy,
                       const MRIStepOptions& opts) {
  if (!(H > 0.0)) throw std::invalid_argument("mri_step: H must be positive");
  if (M < 1) throw std::invalid_argument("mri_step: M must be >= 1");
  if (y.size() != ivp.dim) throw std::invalid_argument("mri_step: state dimension mismatch");

  const StepContext cx{method, fast_table, ivp, t, H, M, opts};
  MRIStepResult out;
  using K = FastErrorStrategy::Kind;
  const StageErr mode = strategy.kind == K::LASA ? StageErr::lasa : strategy.kind == K::SA ? StageErr::sa : StageErr::none;

  Pass main = run_pass(cx, y, Propagate::primary, mode);
  out.n_slow_evals = main.slow;
  out.n_fast_evals = main.fast;
  out.n_slow_solver_evals = main.solver;
  if (main.failed) {
    out.failed = true;
    return out;
  }
  const int last = method.s - 1;
  out.y_next = main.Y[static_cast<std::size_t>(last)];

  // slow embedding: re-solve the final stage from Y_{s-1} with the embedding row
  {
    RowFn row = [&method](int k, int j) { return method.G_embed(k, j); };
    StateVec yt;
    if (!solve_stage(cx, main, last, row, main.Y[static_cast<std::size_t>(last - 1)], Propagate::primary,
                     StageErr::none, yt)) {
      out.n_fast_evals = main.fast;
      out.n_slow_solver_evals = main.solver;
      out.failed = true;
      return out;
    }
    out.y_embedded = std::move(yt);
    out.n_fast_evals = main.fast;
    out.n_slow_solver_evals = main.solver;
  }
  out.eps_slow = err_norm_diff(out.y_next, out.y_embedded, out.y_next, opts.norm);

  if (strategy.kind == K::FS) {
    // independent pass with the embedded fast weights, chained on its own stages
    Pass alt = run_pass(cx, y, Propagate::embedded, StageErr::none);
    out.n_slow_evals += alt.slow;
    out.n_fast_evals += alt.fast;
    out.n_slow_solver_evals += alt.solver;
    if (alt.failed) {
      out.failed = true;
      return out;
    }
    out.eps_fast = err_norm_diff(out.y_next, alt.Y[static_cast<std::size_t>(last)], out.y_next, opts.norm);
  } else {
    out.stage_fast_errors = main.stage_err;
    out.eps_fast = aggregate_stage_errors(main.stage_err, strategy.aggregate);
  }
  if (!std::isfinite(out.eps_slow) || !std::isfinite(out.eps_fast)) out.failed = true;
  return out;
}

}  // namespace mri
