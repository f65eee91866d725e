#include "mri/rk_inner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mri/coeff_text.hpp"

namespace mri {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Stage sweep shared by rk_step and subcycle. K must hold stages*dim doubles;
// ystage holds dim doubles of scratch.
struct Sweep {
  const EmbeddedRKTable& table;
  const Rhs& f;
  const NewtonConfig* newton;
  std::vector<double> K;
  StateVec ystage;
  long evals = 0;

  Sweep(const EmbeddedRKTable& tab, const Rhs& rhs, const NewtonConfig* nc, std::size_t dim)
      : table(tab), f(rhs), newton(nc), K(static_cast<std::size_t>(tab.stages) * dim), ystage(dim) {}

  std::span<double> k(int i) {
    const std::size_t dim = ystage.size();
    return {K.data() + static_cast<std::size_t>(i) * dim, dim};
  }

  // Fills K; returns false when an implicit stage fails to converge.
  bool run(double t, std::span<const double> y, double h) {
    const std::size_t dim = y.size();
    for (int i = 0; i < table.stages; ++i) {
      copy_into(y, ystage);
      for (int j = 0; j < i; ++j) {
        const double aij = table.a(i, j);
        if (aij != 0.0) axpy(h * aij, k(j), ystage);
      }
      const double ti = t + table.c[static_cast<std::size_t>(i)] * h;
      const double aii = table.a(i, i);
      if (aii != 0.0) {
        if (newton == nullptr) {
          throw std::invalid_argument("rk_step: implicit table " + table.name + " needs a NewtonConfig");
        }
        const StateVec base = ystage;
        StateVec fz(dim);
        Residual res = [&](std::span<const double> z, std::span<double> out) {
          f(ti, z, fz);
          for (std::size_t d = 0; d < dim; ++d) out[d] = z[d] - base[d] - h * aii * fz[d];
        };
        NewtonStats st;
        auto z = newton_solve(res, base, *newton, &st);
        evals += st.residual_evals;
        if (!z) return false;
        copy_into(*z, ystage);
      }
      f(ti, ystage, k(i));
      ++evals;
    }
    return true;
  }

  void combine(std::span<const double> y, double h, const std::vector<double>& w, std::span<double> out) {
    copy_into(y, out);
    for (int i = 0; i < table.stages; ++i) {
      const double wi = w[static_cast<std::size_t>(i)];
      if (wi != 0.0) axpy(h * wi, k(i), out);
    }
  }
};

}  // namespace

std::optional<StateVec> newton_solve(const Residual& residual, StateVec guess, const NewtonConfig& cfg,
                                     NewtonStats* stats) {
  const auto n = static_cast<Eigen::Index>(guess.size());
  NewtonStats local;
  NewtonStats& st = stats ? *stats : local;
  StateVec z = std::move(guess);
  StateVec r(z.size()), rp(z.size()), zp(z.size());
  Eigen::MatrixXd J(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu;

  auto build_jacobian = [&]() -> bool {
    for (Eigen::Index j = 0; j < n; ++j) {
      zp = z;
      const double dz = cfg.fd_eps * (1.0 + std::abs(z[static_cast<std::size_t>(j)]));
      zp[static_cast<std::size_t>(j)] += dz;
      residual(zp, rp);
      ++st.residual_evals;
      for (Eigen::Index i = 0; i < n; ++i) {
        J(i, j) = (rp[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)]) / dz;
      }
    }
    ++st.jacobians;
    lu.compute(J);
    return lu.isInvertible();
  };

  residual(z, r);
  ++st.residual_evals;
  double rnorm = inf_norm(r);
  if (!all_finite(r)) return std::nullopt;
  if (rnorm <= cfg.rtol * (1.0 + inf_norm(z))) return z;
  if (!build_jacobian()) return std::nullopt;

  for (int it = 0; it < cfg.max_iters; ++it) {
    ++st.iterations;
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
    const Eigen::VectorXd dz = lu.solve(rv);
    for (Eigen::Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] -= dz(i);
    residual(z, r);
    ++st.residual_evals;
    if (!all_finite(r) || !all_finite(z)) return std::nullopt;
    const double next = inf_norm(r);
    if (next <= cfg.rtol * (1.0 + inf_norm(z))) return z;
    // The Jacobian is kept while the iteration contracts quickly.
    if (next > 0.25 * rnorm) {
      if (!build_jacobian()) return std::nullopt;
    }
    rnorm = next;
  }
  return std::nullopt;
}

RkStepResult rk_step(const EmbeddedRKTable& table, const Rhs& f, double t, std::span<const double> y,
                     double h, const NewtonConfig* newton) {
  if (!(h > 0.0)) throw std::invalid_argument("rk_step: h must be positive");
  Sweep sw(table, f, newton, y.size());
  RkStepResult res;
  const bool ok = sw.run(t, y, h);
  res.n_evals = sw.evals;
  if (!ok) {
    res.failed = true;
    return res;
  }
  res.y_next.resize(y.size());
  res.y_embedded.resize(y.size());
  sw.combine(y, h, table.b, res.y_next);
  sw.combine(y, h, table.b_hat, res.y_embedded);
  res.failed = !all_finite(res.y_next);
  return res;
}

SubcycleResult subcycle(const EmbeddedRKTable& table, const Rhs& f, double theta0, double thetaF,
                        std::span<const double> v0, int m, Propagate propagate, const ErrorNorm& norm) {
  if (!(thetaF > theta0)) throw std::invalid_argument("subcycle: empty interval");
  if (m < 1) throw std::invalid_argument("subcycle: m must be >= 1");
  const std::size_t dim = v0.size();
  static const NewtonConfig kDefaultNewton{};
  Sweep sw(table, f, table.is_explicit() ? nullptr : &kDefaultNewton, dim);
  SubcycleResult res;
  StateVec v(v0.begin(), v0.end());
  StateVec prim(dim), emb(dim);
  const double h = (thetaF - theta0) / m;
  for (int j = 0; j < m; ++j) {
    const double tj = theta0 + j * h;
    const double hj = (j == m - 1) ? thetaF - tj : h;
    if (!sw.run(tj, v, hj)) {
      res.failed = true;
      break;
    }
    sw.combine(v, hj, table.b, prim);
    sw.combine(v, hj, table.b_hat, emb);
    res.local_err_sum += err_norm_diff(prim, emb, prim, norm);
    v.swap(propagate == Propagate::primary ? prim : emb);
    if (!all_finite(v)) {
      res.failed = true;
      break;
    }
  }
  res.n_evals = sw.evals;
  res.y_final = std::move(v);
  return res;
}

std::vector<StateVec> integrate_adaptive(const Rhs& f, double t0, std::span<const double> y0,
                                         std::span<const double> outputs, const AdaptiveOptions& opts,
                                         AdaptiveStats* stats) {
  static const EmbeddedRKTable table = verner65();
  const std::size_t dim = y0.size();
  std::vector<StateVec> result;
  result.reserve(outputs.size());
  if (outputs.empty()) return result;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i] < t0 || (i > 0 && outputs[i] < outputs[i - 1])) {
      throw std::invalid_argument("integrate_adaptive: output times must be sorted and >= t0");
    }
  }
  Sweep sw(table, f, nullptr, dim);
  StateVec y(y0.begin(), y0.end()), y6(dim), y5(dim);
  double t = t0;
  const double span_len = outputs.back() - t0;
  double h = opts.h_init > 0.0 ? opts.h_init : std::max(1e-4 * span_len, 1e-12);
  AdaptiveStats local;
  AdaptiveStats& st = stats ? *stats : local;
  std::size_t next = 0;
  while (next < outputs.size() && outputs[next] == t) {
    result.push_back(y);
    ++next;
  }
  while (next < outputs.size()) {
    const double target = outputs[next];
    bool lands = false;
    double hs = h;
    if (t + hs >= target - 1e-14 * std::max(1.0, std::abs(target))) {
      hs = target - t;
      lands = true;
    }
    if (++st.steps > opts.max_steps) throw std::runtime_error("integrate_adaptive: too many steps");
    sw.run(t, y, hs);
    sw.combine(y, hs, table.b, y6);
    sw.combine(y, hs, table.b_hat, y5);
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y6[i]));
      err = std::max(err, std::abs(y6[i] - y5[i]) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;
    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -1.0 / 6.0), 0.2, 5.0);
    if (err <= 1.0) {
      t = lands ? target : t + hs;
      y.swap(y6);
      while (next < outputs.size() && outputs[next] <= t) {
        result.push_back(y);
        ++next;
      }
      h = lands ? std::max(h, hs * fac) : hs * fac;
    } else {
      ++st.rejected;
      h = hs * fac;
    }
    if (h < opts.h_min) throw std::runtime_error("integrate_adaptive: step size underflow");
  }
  st.evals += sw.evals;
  return result;
}

ReferenceCache::ReferenceCache(std::filesystem::path dir, std::string profile)
    : dir_(std::move(dir)), profile_(std::move(profile)) {}

std::filesystem::path ReferenceCache::path_for(std::string_view problem,
                                               std::span<const double> checkpoints) const {
  std::string bytes(checkpoints.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), checkpoints.data(), bytes.size());
  const auto h = coeff::hex64(coeff::fnv1a(bytes));
  return dir_ / (std::string(problem) + "__" + profile_ + "__" + h.substr(0, 12) + ".ref");
}

std::optional<std::vector<StateVec>> ReferenceCache::load(std::string_view problem,
                                                          std::span<const double> checkpoints) const {
  std::ifstream in(path_for(problem, checkpoints));
  if (!in) return std::nullopt;
  std::vector<StateVec> states;
  std::string line;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double t;
    if (!(ls >> t)) return std::nullopt;
    if (k >= checkpoints.size() || t != checkpoints[k]) return std::nullopt;
    StateVec y;
    double v;
    while (ls >> v) y.push_back(v);
    states.push_back(std::move(y));
    ++k;
  }
  if (states.size() != checkpoints.size()) return std::nullopt;
  return states;
}

void ReferenceCache::store(std::string_view problem, std::span<const double> checkpoints,
                           const std::vector<StateVec>& states) const {
  std::filesystem::create_directories(dir_);
  const auto final_path = path_for(problem, checkpoints);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << "# reference checkpoints: problem " << problem << ", profile " << profile_ << "\n";
    char buf[64];
    for (std::size_t k = 0; k < states.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", checkpoints[k]);
      out << buf;
      for (double v : states[k]) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
      }
      out << "\n";
    }
  }
  std::filesystem::rename(tmp, final_path);
}

std::vector<StateVec> reference_solve(const SplitIVP& ivp, std::span<const double> checkpoints,
                                      const ReferenceCache* cache, const AdaptiveOptions& opts) {
  if (cache) {
    if (auto hit = cache->load(ivp.name, checkpoints)) return *hit;
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < ivp.t0 || checkpoints[i] > ivp.tf || (i > 0 && checkpoints[i] < checkpoints[i - 1])) {
      throw std::invalid_argument("reference_solve: checkpoints must be sorted inside [t0, tf]");
    }
  }
  const std::size_t dim = ivp.dim;
  Rhs full = [&ivp, dim](double t, std::span<const double> y, std::span<double> out) {
    thread_local StateVec fast;
    fast.resize(dim);
    ivp.f_slow(t, y, out);
    ivp.f_fast(t, y, fast);
    for (std::size_t i = 0; i < dim; ++i) out[i] += fast[i];
  };
  auto states = integrate_adaptive(full, ivp.t0, ivp.y0, checkpoints, opts);
  if (cache) cache->store(ivp.name, checkpoints, states);
  return states;
}

}  // namespace mri
