#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mri {

using StateVec = std::vector<double>;

/// Right-hand side callback: writes f(t, y) into `out` (same length as `y`).
/// Callbacks must be pure; the solvers call them from worker threads.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> out)>;

using ExactSolution = std::function<StateVec(double t)>;

/// An initial-value problem y' = f_slow(t, y) + f_fast(t, y).
struct SplitIVP {
  std::string name;
  std::size_t dim = 0;
  Rhs f_slow;
  Rhs f_fast;
  double t0 = 0.0;
  double tf = 1.0;
  StateVec y0;
  std::optional<ExactSolution> exact;

  /// Throws std::invalid_argument when the fields are inconsistent.
  void validate() const;
};

/// Componentwise relative max norm: max_i |e_i| / (|y_ref,i| + floor).
struct ErrorNorm {
  double floor = 1e-8;
};

StateVec rhs_full(const SplitIVP& ivp, double t, std::span<const double> y);

double err_norm(std::span<const double> e, std::span<const double> y_ref, const ErrorNorm& norm = {});

/// err_norm of (a - b) without materializing the difference.
double err_norm_diff(std::span<const double> a, std::span<const double> b,
                     std::span<const double> y_ref, const ErrorNorm& norm = {});

bool all_finite(std::span<const double> y);

// Bulk vector helpers. Sizes must agree; they are not checked in release builds.

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> y) {
  for (double& v : y) v *= a;
}

inline void copy_into(std::span<const double> src, std::span<double> dst) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i];
}

inline StateVec difference(std::span<const double> a, std::span<const double> b) {
  StateVec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

/// Wraps an Rhs and counts how many times it has been called.
class CountingRhs {
 public:
  explicit CountingRhs(Rhs f) : f_(std::move(f)) {}

  void operator()(double t, std::span<const double> y, std::span<double> out) {
    ++count_;
    f_(t, y, out);
  }

  [[nodiscard]] long count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  Rhs f_;
  long count_ = 0;
};

}  // namespace mri
