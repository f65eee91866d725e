#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mri/ode_core.hpp"
#include "mri/rk_inner.hpp"

namespace mri {

enum class ReferenceSource { analytic, cached_numerical };

struct ProblemSpec {
  std::string name;
  SplitIVP ivp;
  std::vector<double> checkpoints;  // t0 + k (tf - t0)/10, k = 1..10
  ReferenceSource reference_source = ReferenceSource::cached_numerical;
  std::string description;
};

/// bicoupling, brusselator, kaps, kpr, forced-vdp, pleiades, fourbody3d, brusselator-1d
ProblemSpec make_problem(std::string_view name);
std::vector<std::string> problem_names();

/// Method-of-lines Brusselator on a uniform mesh of nx nodes over [0,1],
/// blocked layout [u_0..u_{nx-1}, v_..., w_...]. Diffusion is slow, reaction fast.
SplitIVP discretize_brusselator_1d(int nx);

std::vector<double> make_checkpoints(double t0, double tf, int n = 10);

/// Reference states at the problem's checkpoints: closed form where available,
/// otherwise the cached tight-tolerance numerical solve.
std::vector<StateVec> reference_states(const ProblemSpec& prob, const ReferenceCache* cache = nullptr);

}  // namespace mri
