#pragma once

// Shared helpers for the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mri/ode_core.hpp"

namespace testsupport {

// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Full right-hand sides written straight from the problem statements, kept
// apart from the library's split implementations.
inline mri::StateVec full_rhs_oracle(const std::string& name, double t, std::span<const double> y) {
  using std::cos, std::sin, std::sqrt;
  const double pi = std::numbers::pi;
  if (name == "bicoupling") {
    const double a = 1, b = 20, g = 100, l = 5, p = 0.01;
    const double u = y[0], v = y[1], w = y[2], den = a * l + b * g;
    const double A = u - a * w / den - a * p * t / den;
    const double B = v - b * w / den - b * p * t / den;
    return {g * v - w - p * t, -g * u, -l * w - l * p * t - p * A * A - p * B * B};
  }
  if (name == "brusselator") {
    const double a = 1, b = 3.5, e = 0.01, u = y[0], v = y[1], w = y[2];
    return {a - (w + 1) * u + u * u * v, u * w - u * u * v, (b - w) / e - u * w};
  }
  if (name == "kaps") {
    const double mu = 100, u = y[0], v = y[1];
    return {-(mu + 2) * u + mu * v * v, -v * v + u - v};
  }
  if (name == "kpr") {
    const double ls = -1, lf = -10, al = 1, be = 20, ep = 0.1, u = y[0], v = y[1];
    const double g1 = (-3 + u * u - cos(be * t)) / (2 * u), g2 = (-2 + v * v - cos(t)) / (2 * v);
    const double L11 = lf, L12 = (1 - ep) / al * (lf - ls), L21 = -al * ep * (lf - ls), L22 = ls;
    return {L11 * g1 + L12 * g2 - be * sin(be * t) / (2 * u), L21 * g1 + L22 * g2 - sin(t) / (2 * v)};
  }
  if (name == "forced-vdp") {
    const double u = y[0], v = y[1];
    return {v, -u - 8.53 * (u * u - 1) * v + 1.2 * sin(pi / 5 * t)};
  }
  if (name == "pleiades" || name == "fourbody3d") {
    const std::size_t d = name == "pleiades" ? 2 : 3;
    const std::size_t nb = y.size() / (2 * d);
    mri::StateVec f(y.size(), 0.0);
    for (std::size_t i = 0; i < nb * d; ++i) f[i] = y[nb * d + i];
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        if (i == j) continue;
        const double mj = name == "pleiades" ? static_cast<double>(j + 1) : 1.0;
        double r2 = 0;
        for (std::size_t k = 0; k < d; ++k) r2 += std::pow(y[j * d + k] - y[i * d + k], 2);
        for (std::size_t k = 0; k < d; ++k) f[nb * d + i * d + k] += mj * (y[j * d + k] - y[i * d + k]) / (r2 * sqrt(r2));
      }
    }
    return f;
  }
  if (name == "brusselator-1d") {
    const std::size_t n = y.size() / 3;
    const double dx = 1.0 / static_cast<double>(n - 1), a = 1, b = 3.5, e = 0.001;
    const double d = 0.006 + 0.005 * cos(pi * t), r = 0.6 + 0.5 * cos(4 * pi * t);
    mri::StateVec f(y.size(), 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double u = y[i], v = y[n + i], w = y[2 * n + i];
      auto lap = [&](std::size_t o) { return (y[o + i - 1] - 2 * y[o + i] + y[o + i + 1]) / (dx * dx); };
      f[i] = d * lap(0) + r * (a - (w + 1) * u + u * u * v);
      f[n + i] = d * lap(n) + r * (u * w - u * u * v);
      f[2 * n + i] = d * lap(2 * n) + r * ((b - w) / e - u * w);
    }
    return f;
  }
  return {};
}

}  // namespace testsupport
