// Copyright 2026 The PrivGLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVGLM_DP_GD_HPP
#define PRIVGLM_DP_GD_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "privglm/errors.hpp"
#include "privglm/glm.hpp"
#include "privglm/mechanisms.hpp"
#include "privglm/rng.hpp"

namespace privglm {

// Iterates whose l2 norm exceeds this are treated as diverged; surfaces
// mis-scaled step sizes early.
inline constexpr double kDivergenceGuard = 1e6;

struct GdConfig {
  double step_size = 1.0;
  int iterations = 1;
  double truncation = 0.0;
  double noise_base = 0.0;  // B; 0 disables noise (non-private run)
  PrivacyBudget budget;
  ParamVector init;
  DesignBounds design_bounds;

  void validate() const {
    if (!(step_size > 0)) throw ContractError("GdConfig: step_size must be > 0");
    if (iterations < 1) throw ContractError("GdConfig: iterations must be >= 1");
    if (truncation < 0) throw ContractError("GdConfig: truncation must be >= 0");
    if (noise_base < 0) throw ContractError("GdConfig: noise_base must be >= 0");
    budget.validate();
    design_bounds.validate();
  }
};

struct FitResult {
  ParamVector estimate;
  std::vector<ParamVector> trace;  // iterations + 1 entries, trace[0] = init
  double per_iter_noise_std = 0.0;
  GdConfig config_used;
};

// Per-coordinate Gaussian standard deviation of one noisy gradient step:
// sigma^2 = (eta^0)^2 * 2 B^2 * d * log(2T/delta) / (n^2 (epsilon/T)^2).
// B = 0 disables noise regardless of the budget; B > 0 with an infinite
// epsilon also yields zero noise.
inline double gd_noise_std(const GdConfig& config, Eigen::Index n,
                           Eigen::Index d) {
  config.validate();
  if (config.noise_base == 0) return 0.0;
  if (std::isinf(config.budget.epsilon)) return 0.0;
  if (config.budget.delta <= 0)
    throw UnsupportedError(
        "gd_noise_std: Gaussian calibration requires delta > 0 when B > 0");
  const double t = static_cast<double>(config.iterations);
  const double variance = config.step_size * config.step_size * 2.0 *
                          config.noise_base * config.noise_base *
                          static_cast<double>(d) *
                          std::log(2.0 * t / config.budget.delta) /
                          (static_cast<double>(n) * static_cast<double>(n) *
                           (config.budget.epsilon / t) *
                           (config.budget.epsilon / t));
  return std::sqrt(variance);
}

// Noisy full-batch gradient descent: T iterations of
//   beta <- beta - eta^0 * clamped_gradient(beta) + w,
// with w i.i.d. Gaussian per coordinate at the gd_noise_std calibration.
// The run is (epsilon, delta)-differentially private when
// B >= 4 (R + c1) sigma_x under the l2 design bound. B = 0 reduces to plain
// deterministic gradient descent and is bit-reproducible regardless of seed.
inline FitResult fit_low_dim(const GlmFamily& family, const Dataset& data,
                             const GdConfig& config, RngStream rng) {
  config.validate();
  data.validate();
  if (config.init.size() != data.d())
    throw ContractError("fit_low_dim: init has dimension " +
                        std::to_string(config.init.size()) + ", data has " +
                        std::to_string(data.d()));

  const double noise_std = gd_noise_std(config, data.n(), data.d());

  FitResult result;
  result.config_used = config;
  result.per_iter_noise_std = noise_std;
  result.trace.reserve(static_cast<size_t>(config.iterations) + 1);

  ParamVector beta = config.init;
  result.trace.push_back(beta);
  for (int t = 0; t < config.iterations; ++t) {
    const Eigen::VectorXd grad =
        clamped_gradient(family, beta, data, config.truncation);
    beta -= config.step_size * grad;
    if (noise_std > 0) beta += gaussian_vector(noise_std, data.d(), rng);
    if (!beta.allFinite())
      throw DivergenceError("fit_low_dim: non-finite iterate", t);
    if (beta.norm() > kDivergenceGuard)
      throw DivergenceError("fit_low_dim: iterate norm exceeds guard", t);
    result.trace.push_back(beta);
  }
  result.estimate = beta;
  return result;
}

// Parameter recipe for fit_low_dim given curvature constants gamma (smoothness)
// and alpha (strong convexity over the relevant region):
//   eta^0 = 3/(4 gamma), T = ceil((2 gamma / alpha) log(9n)),
//   R = default_truncation, B = 4 (R + c1) sigma_x, init = 0.
// The defaults gamma = 1, alpha = 1/4 are reasonable for logistic designs
// with unit bounds; both constants exist only existentially in general.
inline GdConfig recommend_gd_config(const GlmFamily& family, Eigen::Index n,
                                    Eigen::Index d,
                                    const PrivacyBudget& budget,
                                    const DesignBounds& design_bounds,
                                    double gamma = 1.0, double alpha = 0.25) {
  if (n < 2) throw ContractError("recommend_gd_config: need n >= 2");
  if (!(gamma > 0) || !(alpha > 0) || alpha > gamma)
    throw ContractError("recommend_gd_config: need 0 < alpha <= gamma");
  budget.validate();
  design_bounds.validate();
  if (!std::isfinite(family.mean_fn_bound))
    throw UnsupportedError(
        "recommend_gd_config: family has unbounded mean function; supply an "
        "explicit truncation and noise scale instead");

  GdConfig config;
  config.step_size = 3.0 / (4.0 * gamma);
  config.iterations = static_cast<int>(std::ceil(
      (2.0 * gamma / alpha) * std::log(9.0 * static_cast<double>(n))));
  config.truncation = default_truncation(family, n);
  config.noise_base =
      4.0 * (config.truncation + family.mean_fn_bound) * design_bounds.sigma_x;
  config.budget = budget;
  config.init = ParamVector::Zero(d);
  config.design_bounds = design_bounds;
  return config;
}

}  // namespace privglm

#endif  // PRIVGLM_DP_GD_HPP
