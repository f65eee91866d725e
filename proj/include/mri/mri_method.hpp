#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mri/fast_error.hpp"
#include "mri/ode_core.hpp"
#include "mri/rk_inner.hpp"

namespace mri {

enum class StageKind {
  trivial,             // Y_1 = y_n
  fast_ivp,            // forced fast IVP over a stage interval of width dc*H
  implicit_algebraic,  // dc = 0, DIRK-type slow stage solved by Newton
  explicit_algebraic,  // dc = 0, explicit slow update
};

std::string_view to_string(StageKind k);

/// MRI-GARK coupling table. Stage i (0-based, i >= 1) solves
///   v' = f_fast(theta, v) + (1/dc_i) sum_j sum_k G^k_ij tau^k f_slow(t + c_j H, Y_j)
/// over theta in [t + c_{i-1} H, t + c_i H], tau = (theta - theta_0) / (dc_i H).
/// Stages with dc_i = 0 reduce to Y_i = Y_{i-1} + H sum_j gbar_ij f_slow(Y_j).
struct MRIMethod {
  std::string name;
  int s = 0;
  std::vector<double> dc;                        // stage width increments, dc[0] = 0
  std::vector<double> c;                         // cumulative abscissae
  std::vector<std::vector<double>> gamma;        // gamma[k]: row-major s x s
  std::vector<std::vector<double>> gamma_embed;  // gamma_embed[k]: length s
  int order_P = 0;
  int order_Phat = 0;
  std::vector<StageKind> kind;
  std::vector<bool> slow_needed;                 // f_slow(Y_j) is referenced somewhere

  [[nodiscard]] int num_gamma() const { return static_cast<int>(gamma.size()); }
  [[nodiscard]] double G(int k, int i, int j) const {
    return gamma[static_cast<std::size_t>(k)][static_cast<std::size_t>(i * s + j)];
  }
  [[nodiscard]] double G_embed(int k, int j) const {
    return gamma_embed[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  }
  /// Integrated coupling coefficient sum_k G^k_ij / (k + 1).
  [[nodiscard]] double gbar(int i, int j) const;
  [[nodiscard]] double gbar_embed(int j) const;
  [[nodiscard]] int count_stages(StageKind k) const;
};

/// Bundled methods: ERK33, ERK45a, IRK21a, ESDIRK34a (prefix "MRI-GARK-" optional).
MRIMethod load_method(std::string_view name);
std::string_view mri_method_source(std::string_view name);
/// Parses a coupling table in the text schema of docs/formats.md and checks
/// its consistency conditions.
MRIMethod parse_method(std::string_view text);
std::vector<std::string> method_names();

struct MRIStepOptions {
  ErrorNorm norm{};
  NewtonConfig newton{};
};

struct MRIStepResult {
  StateVec y_next;
  StateVec y_embedded;
  double eps_slow = 0.0;
  double eps_fast = 0.0;
  long n_slow_evals = 0;
  long n_fast_evals = 0;
  long n_slow_solver_evals = 0;  // f_slow calls made inside Newton solves
  std::vector<double> stage_fast_errors;
  bool failed = false;
};

/// One MRI-GARK step of size H with multirate ratio M. Fast stages of width
/// dc_i*H take ceil(dc_i*M) substeps.
MRIStepResult mri_step(const MRIMethod& method, const EmbeddedRKTable& fast_table, const SplitIVP& ivp,
                       double t, std::span<const double> y, double H, int M,
                       const FastErrorStrategy& strategy, const MRIStepOptions& opts = {});

/// Number of substeps used for a stage of width dc with multirate ratio M.
int substeps_for(double dc, int M);

}  // namespace mri
