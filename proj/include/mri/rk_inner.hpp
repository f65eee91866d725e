#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mri/ode_core.hpp"

namespace mri {

/// Butcher tableau with primary (b) and embedded (b_hat) weights.
struct EmbeddedRKTable {
  std::string name;
  int stages = 0;
  std::vector<double> A;  // row-major, stages x stages
  std::vector<double> b;
  std::vector<double> b_hat;
  std::vector<double> c;
  int order_p = 0;
  int order_phat = 0;

  [[nodiscard]] double a(int i, int j) const { return A[static_cast<std::size_t>(i * stages + j)]; }
  [[nodiscard]] bool is_explicit() const;
  /// Checks row-sum consistency and weight normalization; throws on violation.
  void validate(double tol = 1e-14) const;
};

EmbeddedRKTable heun_euler();
EmbeddedRKTable bogacki_shampine();
EmbeddedRKTable zonneveld();
/// Verner's 1978 6(5) pair (8 stages), used for reference solutions.
EmbeddedRKTable verner65();

/// Looks up "heun-euler", "bogacki-shampine", "zonneveld" or "verner65".
EmbeddedRKTable rk_table_by_name(std::string_view name);

/// Raw embedded coefficient text for a bundled table (schema in docs/formats.md).
std::string_view rk_table_source(std::string_view name);

struct NewtonConfig {
  int max_iters = 30;
  double rtol = 1e-10;
  double fd_eps = 1e-8;
};

using Residual = std::function<void(std::span<const double> z, std::span<double> out)>;

struct NewtonStats {
  long residual_evals = 0;
  int iterations = 0;
  int jacobians = 0;
};

/// Solves residual(z) = 0 with a dense finite-difference Jacobian. Returns
/// nullopt when the Jacobian is singular or the iteration limit is hit.
std::optional<StateVec> newton_solve(const Residual& residual, StateVec guess,
                                     const NewtonConfig& cfg = {}, NewtonStats* stats = nullptr);

struct RkStepResult {
  StateVec y_next;
  StateVec y_embedded;
  long n_evals = 0;
  bool failed = false;
};

/// One step of an embedded RK pair; both solutions share the stage sweep.
/// Diagonally implicit tables need `newton`.
RkStepResult rk_step(const EmbeddedRKTable& table, const Rhs& f, double t,
                     std::span<const double> y, double h, const NewtonConfig* newton = nullptr);

enum class Propagate { primary, embedded };

struct SubcycleResult {
  StateVec y_final;
  double local_err_sum = 0.0;
  long n_evals = 0;
  bool failed = false;
};

/// Takes m equal steps from theta0 to thetaF (the last one lands exactly on
/// thetaF). local_err_sum accumulates err_norm(v_j - vhat_j, v_j) per step.
/// `propagate` selects which weights carry the solution forward.
SubcycleResult subcycle(const EmbeddedRKTable& table, const Rhs& f, double theta0, double thetaF,
                        std::span<const double> v0, int m, Propagate propagate = Propagate::primary,
                        const ErrorNorm& norm = {});

struct AdaptiveOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_init = 0.0;  // 0 selects an automatic first step
  double h_min = 1e-14;
  long max_steps = 50'000'000;
};

struct AdaptiveStats {
  long steps = 0;
  long rejected = 0;
  long evals = 0;
};

/// Integrates y' = f with the Verner 6(5) pair, landing exactly on every
/// output time (sorted, >= t0). Throws std::runtime_error on step underflow.
std::vector<StateVec> integrate_adaptive(const Rhs& f, double t0, std::span<const double> y0,
                                         std::span<const double> outputs,
                                         const AdaptiveOptions& opts = {},
                                         AdaptiveStats* stats = nullptr);

/// Disk cache for reference checkpoints: one file per (problem, profile).
class ReferenceCache {
 public:
  explicit ReferenceCache(std::filesystem::path dir, std::string profile = "rk65-1e-12");

  [[nodiscard]] std::filesystem::path path_for(std::string_view problem,
                                               std::span<const double> checkpoints) const;
  [[nodiscard]] std::optional<std::vector<StateVec>> load(std::string_view problem,
                                                          std::span<const double> checkpoints) const;
  void store(std::string_view problem, std::span<const double> checkpoints,
             const std::vector<StateVec>& states) const;

 private:
  std::filesystem::path dir_;
  std::string profile_;
};

/// Tight-tolerance solution of the full RHS at each checkpoint. When `cache`
/// is given, results are read from / written to it.
std::vector<StateVec> reference_solve(const SplitIVP& ivp, std::span<const double> checkpoints,
                                      const ReferenceCache* cache = nullptr,
                                      const AdaptiveOptions& opts = {});

}  // namespace mri
