#include "mri/ode_core.hpp"

#include <cmath>
#include <stdexcept>

namespace mri {

void SplitIVP::validate() const {
  if (dim == 0) throw std::invalid_argument(name + ": dimension must be positive");
  if (y0.size() != dim) throw std::invalid_argument(name + ": y0 has wrong dimension");
  if (!(t0 < tf)) throw std::invalid_argument(name + ": requires t0 < tf");
  if (!f_slow || !f_fast) throw std::invalid_argument(name + ": missing right-hand side");
}

StateVec rhs_full(const SplitIVP& ivp, double t, std::span<const double> y) {
  if (y.size() != ivp.dim) {
    throw std::invalid_argument("rhs_full: state has dimension " + std::to_string(y.size()) +
                                ", problem " + ivp.name + " expects " + std::to_string(ivp.dim));
  }
  StateVec out(ivp.dim);
  StateVec fast(ivp.dim);
  ivp.f_slow(t, y, out);
  ivp.f_fast(t, y, fast);
  for (std::size_t i = 0; i < ivp.dim; ++i) out[i] += fast[i];
  return out;
}

double err_norm(std::span<const double> e, std::span<const double> y_ref, const ErrorNorm& norm) {
  double m = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double r = std::abs(e[i]) / (std::abs(y_ref[i]) + norm.floor);
    if (r > m || std::isnan(r)) m = r;
  }
  return m;
}

double err_norm_diff(std::span<const double> a, std::span<const double> b,
                     std::span<const double> y_ref, const ErrorNorm& norm) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = std::abs(a[i] - b[i]) / (std::abs(y_ref[i]) + norm.floor);
    if (r > m || std::isnan(r)) m = r;
  }
  return m;
}

bool all_finite(std::span<const double> y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace mri
