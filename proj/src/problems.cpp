#include "mri/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mri {

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec bicoupling() {
  constexpr double a = 1, b = 20, g = 100, l = 5, p = 0.01;
  constexpr double den = a * l + b * g;
  ProblemSpec ps;
  ps.name = "bicoupling";
  ps.description = "nonlinear nonautonomous 3-component test, analytic";
  auto& ivp = ps.ivp;
  ivp.dim = 3;
  ivp.t0 = 0;
  ivp.tf = 1;
  ivp.y0 = {1 + a, b, den};
  ivp.f_slow = [](double, std::span<const double> y, std::span<double> o) {
    o[0] = g * y[1];
    o[1] = -g * y[0];
    o[2] = 0;
  };
  ivp.f_fast = [](double t, std::span<const double> y, std::span<double> o) {
    const double u = y[0], v = y[1], w = y[2];
    const double q1 = u - a * w / den - a * p * t / den;
    const double q2 = v - b * w / den - b * p * t / den;
    o[0] = -w - p * t;
    o[1] = 0;
    o[2] = -l * w - l * p * t - p * q1 * q1 - p * q2 * q2;
  };
  ivp.exact = [](double t) {
    return StateVec{std::cos(g * t) + a * std::exp(-l * t), -std::sin(g * t) + b * std::exp(-l * t),
                    den * std::exp(-l * t) - p * t};
  };
  ps.reference_source = ReferenceSource::analytic;
  return ps;
}

ProblemSpec brusselator() {
  constexpr double a = 1, b = 3.5, eps = 0.01;
  ProblemSpec ps;
  ps.name = "brusselator";
  ps.description = "stiff Brusselator ODE, eps = 0.01";
  auto& ivp = ps.ivp;
  ivp.dim = 3;
  ivp.t0 = 0;
  ivp.tf = 2;
  ivp.y0 = {1.2, 3.1, 3.0};
  ivp.f_slow = [](double, std::span<const double> y, std::span<double> o) {
    const double u = y[0], v = y[1], w = y[2];
    o[0] = a - (w + 1) * u + u * u * v;
    o[1] = u * w - u * u * v;
    o[2] = b / eps - u * w;
  };
  ivp.f_fast = [](double, std::span<const double> y, std::span<double> o) {
    o[0] = 0;
    o[1] = 0;
    o[2] = -y[2] / eps;
  };
  return ps;
}

ProblemSpec kaps() {
  constexpr double mu = 100;
  ProblemSpec ps;
  ps.name = "kaps";
  ps.description = "Kaps singular perturbation problem, mu = 100, analytic";
  auto& ivp = ps.ivp;
  ivp.dim = 2;
  ivp.t0 = 0;
  ivp.tf = 2;
  ivp.y0 = {1, 1};
  ivp.f_slow = [](double, std::span<const double> y, std::span<double> o) {
    o[0] = 0;
    o[1] = -y[1] * y[1] + y[0] - y[1];
  };
  ivp.f_fast = [](double, std::span<const double> y, std::span<double> o) {
    o[0] = -(mu + 2) * y[0] + mu * y[1] * y[1];
    o[1] = 0;
  };
  ivp.exact = [](double t) { return StateVec{std::exp(-2 * t), std::exp(-t)}; };
  ps.reference_source = ReferenceSource::analytic;
  return ps;
}

ProblemSpec kpr() {
  constexpr double ls = -1, lf = -10, alpha = 1, beta = 20, eps = 0.1;
  // Lambda
  constexpr double L00 = lf, L01 = (1 - eps) / alpha * (lf - ls);
  constexpr double L10 = -alpha * eps * (lf - ls), L11 = ls;
  ProblemSpec ps;
  ps.name = "kpr";
  ps.description = "KPR two-rate problem, analytic";
  auto& ivp = ps.ivp;
  ivp.dim = 2;
  ivp.t0 = 0;
  ivp.tf = 5 * pi / 2;
  ivp.y0 = {2, std::sqrt(3.0)};
  ivp.f_fast = [](double t, std::span<const double> y, std::span<double> o) {
    const double u = y[0], v = y[1];
    const double r1 = (-3 + u * u - std::cos(beta * t)) / (2 * u);
    const double r2 = (-2 + v * v - std::cos(t)) / (2 * v);
    o[0] = L00 * r1 + L01 * r2 - beta * std::sin(beta * t) / (2 * u);
    o[1] = 0;
  };
  ivp.f_slow = [](double t, std::span<const double> y, std::span<double> o) {
    const double u = y[0], v = y[1];
    const double r1 = (-3 + u * u - std::cos(beta * t)) / (2 * u);
    const double r2 = (-2 + v * v - std::cos(t)) / (2 * v);
    o[0] = 0;
    o[1] = L10 * r1 + L11 * r2 - std::sin(t) / (2 * v);
  };
  ivp.exact = [](double t) { return StateVec{std::sqrt(3 + std::cos(beta * t)), std::sqrt(2 + std::cos(t))}; };
  ps.reference_source = ReferenceSource::analytic;
  return ps;
}

ProblemSpec forced_vdp() {
  ProblemSpec ps;
  ps.name = "forced-vdp";
  ps.description = "forced Van der Pol oscillator";
  auto& ivp = ps.ivp;
  ivp.dim = 2;
  ivp.t0 = 0;
  ivp.tf = 25;
  ivp.y0 = {1.45, 0};
  ivp.f_slow = [](double, std::span<const double> y, std::span<double> o) {
    o[0] = y[1];
    o[1] = -y[0];
  };
  ivp.f_fast = [](double t, std::span<const double> y, std::span<double> o) {
    o[0] = 0;
    o[1] = -8.53 * (y[0] * y[0] - 1) * y[1] + 1.2 * std::sin(pi / 5 * t);
  };
  return ps;
}

// Layout [positions (n*d), velocities (n*d)]; positions' derivatives are slow,
// accelerations fast.
SplitIVP nbody(std::vector<double> masses, int d, StateVec p0, StateVec v0, double tf) {
  const std::size_t n = masses.size();
  const std::size_t nd = n * static_cast<std::size_t>(d);
  SplitIVP ivp;
  ivp.dim = 2 * nd;
  ivp.t0 = 0;
  ivp.tf = tf;
  ivp.y0 = p0;
  ivp.y0.insert(ivp.y0.end(), v0.begin(), v0.end());
  ivp.f_slow = [nd](double, std::span<const double> y, std::span<double> o) {
    for (std::size_t i = 0; i < nd; ++i) {
      o[i] = y[nd + i];
      o[nd + i] = 0;
    }
  };
  ivp.f_fast = [masses, d, n, nd](double, std::span<const double> y, std::span<double> o) {
    const auto ud = static_cast<std::size_t>(d);
    for (std::size_t i = 0; i < 2 * nd; ++i) o[i] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double r2 = 0;
        for (std::size_t k = 0; k < ud; ++k) {
          const double dx = y[j * ud + k] - y[i * ud + k];
          r2 += dx * dx;
        }
        const double inv = 1.0 / (r2 * std::sqrt(r2));
        for (std::size_t k = 0; k < ud; ++k) {
          const double dx = y[j * ud + k] - y[i * ud + k];
          o[nd + i * ud + k] += masses[j] * dx * inv;
          o[nd + j * ud + k] -= masses[i] * dx * inv;
        }
      }
    }
  };
  return ivp;
}

ProblemSpec pleiades() {
  ProblemSpec ps;
  ps.name = "pleiades";
  ps.description = "seven-body planar problem, m_i = i, G = 1";
  // masses m_i = i, G = 1 as in the classic definition of this test
  ps.ivp = nbody({1, 2, 3, 4, 5, 6, 7}, 2, {3, 3, 3, -3, -1, 2, -3, 0, 2, 0, -2, 4, 2, 4},
                 {0, 0, 0, 0, 0, 0, 0, -1.25, 0, 1, 1.75, 0, -1.5, 0}, 3.0);
  return ps;
}

ProblemSpec fourbody3d() {
  ProblemSpec ps;
  ps.name = "fourbody3d";
  ps.description = "four bodies in 3D from rest, unit masses, G = 1";
  // unit masses and G = 1 (not given in the problem statement; closest approach ~0.155)
  ps.ivp = nbody({1, 1, 1, 1}, 3, {0, 0, 0, 4, 3, 1, 3, -4, -2, 3, 4, 5}, StateVec(12, 0.0), 15.0);
  return ps;
}

ProblemSpec brusselator_1d() {
  ProblemSpec ps;
  ps.name = "brusselator-1d";
  ps.description = "1D reaction-diffusion Brusselator, eps = 0.001, nx = 101";
  ps.ivp = discretize_brusselator_1d(101);
  return ps;
}

}  // namespace

SplitIVP discretize_brusselator_1d(int nx) {
  if (nx < 3) throw std::invalid_argument("brusselator-1d: nx must be >= 3");
  constexpr double a = 1, b = 3.5, eps = 0.001;
  const auto n = static_cast<std::size_t>(nx);
  const double dx = 1.0 / (nx - 1);
  const double idx2 = 1.0 / (dx * dx);
  SplitIVP ivp;
  ivp.name = "brusselator-1d";
  ivp.dim = 3 * n;
  ivp.t0 = 0;
  ivp.tf = 2;
  ivp.y0.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 0.1 * std::sin(pi * static_cast<double>(i) * dx);
    ivp.y0[i] = 1.2 + s;
    ivp.y0[n + i] = 3.1 + s;
    ivp.y0[2 * n + i] = 3.0 + s;
  }
  ivp.f_slow = [n, idx2](double t, std::span<const double> y, std::span<double> o) {
    const double d = 0.006 + 0.005 * std::cos(pi * t);
    for (std::size_t c = 0; c < 3; ++c) {
      const double* yc = y.data() + c * n;
      double* oc = o.data() + c * n;
      oc[0] = 0;
      oc[n - 1] = 0;
      for (std::size_t i = 1; i + 1 < n; ++i) oc[i] = d * (yc[i - 1] - 2 * yc[i] + yc[i + 1]) * idx2;
    }
  };
  ivp.f_fast = [n](double t, std::span<const double> y, std::span<double> o) {
    const double r = 0.6 + 0.5 * std::cos(4 * pi * t);
    o[0] = o[n - 1] = o[n] = o[2 * n - 1] = o[2 * n] = o[3 * n - 1] = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double u = y[i], v = y[n + i], w = y[2 * n + i];
      o[i] = r * (a - (w + 1) * u + u * u * v);
      o[n + i] = r * (u * w - u * u * v);
      o[2 * n + i] = r * ((b - w) / eps - u * w);
    }
  };
  return ivp;
}

std::vector<double> make_checkpoints(double t0, double tf, int n) {
  std::vector<double> cp;
  for (int k = 1; k <= n; ++k) cp.push_back(k == n ? tf : t0 + k * (tf - t0) / n);
  return cp;
}

std::vector<std::string> problem_names() {
  return {"bicoupling", "brusselator", "kaps", "kpr", "forced-vdp", "pleiades", "fourbody3d", "brusselator-1d"};
}

ProblemSpec make_problem(std::string_view name) {
  ProblemSpec ps;
  if (name == "bicoupling") ps = bicoupling();
  else if (name == "brusselator") ps = brusselator();
  else if (name == "kaps") ps = kaps();
  else if (name == "kpr") ps = kpr();
  else if (name == "forced-vdp") ps = forced_vdp();
  else if (name == "pleiades") ps = pleiades();
  else if (name == "fourbody3d") ps = fourbody3d();
  else if (name == "brusselator-1d") ps = brusselator_1d();
  else throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
  ps.ivp.name = ps.name;
  ps.checkpoints = make_checkpoints(ps.ivp.t0, ps.ivp.tf);
  ps.ivp.validate();
  return ps;
}

std::vector<StateVec> reference_states(const ProblemSpec& prob, const ReferenceCache* cache) {
  if (prob.reference_source == ReferenceSource::analytic && prob.ivp.exact) {
    std::vector<StateVec> out;
    for (double t : prob.checkpoints) out.push_back((*prob.ivp.exact)(t));
    return out;
  }
  return reference_solve(prob.ivp, prob.checkpoints, cache);
}

}  // namespace mri
