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

#ifndef PRIVGLM_DP_IHT_HPP
#define PRIVGLM_DP_IHT_HPP

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "privglm/dp_gd.hpp"
#include "privglm/errors.hpp"
#include "privglm/glm.hpp"
#include "privglm/mechanisms.hpp"
#include "privglm/rng.hpp"

namespace privglm {

// Sparsity inflation constant of the theory-mode recipe (s = 4 c0 (g/a)^2 s*).
inline constexpr int kThresholdingConstant = 72;

struct IhtConfig {
  int sparsity = 1;  // s
  double step_size = 1.0;
  int iterations = 1;
  double truncation = 0.0;
  double noise_base = 0.0;  // B; 0 disables noise (exact IHT)
  PrivacyBudget budget;
  ParamVector init;
  DesignBounds design_bounds;
  // Coordinates never thresholded away (e.g. an intercept); they are kept in
  // every support on top of the s selected coordinates.
  std::vector<Eigen::Index> always_keep;

  void validate(Eigen::Index d) const {
    if (sparsity < 1 || sparsity > d)
      throw ContractError("IhtConfig: need 1 <= sparsity <= d");
    if (!(step_size > 0)) throw ContractError("IhtConfig: step_size must be > 0");
    if (iterations < 1) throw ContractError("IhtConfig: iterations must be >= 1");
    if (truncation < 0) throw ContractError("IhtConfig: truncation must be >= 0");
    if (noise_base < 0) throw ContractError("IhtConfig: noise_base must be >= 0");
    budget.validate();
    design_bounds.validate();
    if (init.size() != d)
      throw ContractError("IhtConfig: init has dimension " +
                          std::to_string(init.size()) + ", expected " +
                          std::to_string(d));
    const Eigen::Index nonzeros =
        (init.array() != 0.0).count();
    if (nonzeros > sparsity + static_cast<Eigen::Index>(always_keep.size()))
      throw ContractError("IhtConfig: init has more nonzeros than sparsity");
  }
};

struct SparseFitResult {
  ParamVector estimate;
  std::vector<std::vector<Eigen::Index>> support_trace;  // S^t per iteration
  std::vector<double> error_trace;  // filled by experiment runners
  IhtConfig config_used;
};

// Observer invoked after every iteration with (iteration index, iterate);
// iteration 0 reports the initial value.
using IterateObserver = std::function<void(int, const ParamVector&)>;

// Per-coordinate Laplace scale of the peeling call inside one iteration:
// each iteration runs the thresholding mechanism at budget
// (epsilon/T, delta/T) with sensitivity lambda = eta^0 B / n.
inline double iht_laplace_scale(const IhtConfig& config, Eigen::Index n) {
  if (config.noise_base == 0) return 0.0;
  if (std::isinf(config.budget.epsilon)) return 0.0;
  const double t = static_cast<double>(config.iterations);
  const PrivacyBudget per_iter{config.budget.epsilon / t,
                               config.budget.delta / t};
  const double lambda =
      config.step_size * config.noise_base / static_cast<double>(n);
  return noisy_ht_scale(lambda, config.sparsity, per_iter);
}

// Noisy iterative hard thresholding over an arbitrary average-loss gradient.
// Each of T iterations moves against gradient_fn and re-selects an s-sparse
// support with the peeling mechanism at budget (epsilon/T, delta/T) and
// sensitivity eta^0 B / n, where per_sample_linf_bound = B bounds
// ||grad l(theta; z) - grad l(theta; z')||_inf over adjacent single samples
// and n is the sample count behind the averaged gradient. B = 0 reproduces
// exact iterative hard thresholding.
inline SparseFitResult noisy_iht(
    const std::function<Eigen::VectorXd(const ParamVector&)>& gradient_fn,
    double per_sample_linf_bound, Eigen::Index n, Eigen::Index d,
    const IhtConfig& config, RngStream rng,
    const IterateObserver& observer = {}) {
  config.validate(d);
  if (per_sample_linf_bound < 0)
    throw ContractError("noisy_iht: per_sample_linf_bound must be >= 0");
  if (n < 1) throw ContractError("noisy_iht: need n >= 1");

  IhtConfig effective = config;
  effective.noise_base = per_sample_linf_bound;
  const double scale = iht_laplace_scale(effective, n);
  const double t_count = static_cast<double>(config.iterations);
  const PrivacyBudget per_iter{config.budget.epsilon / t_count,
                               config.budget.delta / t_count};
  const double lambda = scale > 0 ? config.step_size * per_sample_linf_bound /
                                        static_cast<double>(n)
                                  : 0.0;

  SparseFitResult result;
  result.config_used = effective;
  result.support_trace.reserve(static_cast<size_t>(config.iterations));

  ParamVector beta = config.init;
  if (observer) observer(0, beta);
  for (int t = 0; t < config.iterations; ++t) {
    const Eigen::VectorXd half_step =
        beta - config.step_size * gradient_fn(beta);
    RngStream iter_rng = rng.substream(static_cast<std::uint64_t>(t));
    auto [thresholded, trace] =
        noisy_hard_threshold(half_step, config.sparsity, per_iter, lambda,
                             iter_rng, config.always_keep);
    beta = std::move(thresholded);
    if (!beta.allFinite())
      throw DivergenceError("noisy_iht: non-finite iterate", t);
    if (beta.norm() > kDivergenceGuard)
      throw DivergenceError("noisy_iht: iterate norm exceeds guard", t);
    result.support_trace.push_back(std::move(trace.selected_support));
    if (observer) observer(t + 1, beta);
  }
  result.estimate = std::move(beta);
  return result;
}

// Sparse GLM estimation: each iteration takes a truncated-response gradient
// step on the average negative log-likelihood, then re-selects the support
// privately. The run is (epsilon, delta)-differentially private when
// B >= 4 (R + c1) sigma_x under the l-infinity design bound.
inline SparseFitResult fit_sparse_glm(const GlmFamily& family,
                                      const Dataset& data,
                                      const IhtConfig& config, RngStream rng,
                                      const IterateObserver& observer = {}) {
  data.validate();
  auto gradient_fn = [&](const ParamVector& beta) {
    return clamped_gradient(family, beta, data, config.truncation);
  };
  return noisy_iht(gradient_fn, config.noise_base, data.n(), data.d(), config,
                   rng, observer);
}

enum class IhtRecipe {
  // Theorem constants: s = 4 * 72 * (gamma/alpha)^2 * s*, eta^0 = 1/(2 gamma),
  // T = ceil((2 gamma / (rho alpha)) log(6 gamma n)). Impractically large s
  // for most real dimensions.
  theory,
  // Simulation-style settings: s = 2 s*, eta^0 = 1, caller-chosen T.
  practical,
};

// Parameter recipe for fit_sparse_glm. rho is the absolute contraction
// constant of the convergence analysis; it is never pinned numerically
// upstream, so theory mode takes it as an input. practical_iterations is the
// caller-chosen T for practical mode.
inline IhtConfig recommend_iht_config(
    const GlmFamily& family, Eigen::Index n, Eigen::Index d, int s_star,
    const PrivacyBudget& budget, const DesignBounds& design_bounds,
    double gamma = 1.0, double alpha = 0.25, double rho = 0.5,
    IhtRecipe recipe = IhtRecipe::practical, int practical_iterations = 50) {
  if (n < 2) throw ContractError("recommend_iht_config: need n >= 2");
  if (s_star < 1) throw ContractError("recommend_iht_config: need s_star >= 1");
  if (!(gamma > 0) || !(alpha > 0) || alpha > gamma)
    throw ContractError("recommend_iht_config: need 0 < alpha <= gamma");
  if (!(rho > 0) || rho >= 1)
    throw ContractError("recommend_iht_config: need rho in (0, 1)");
  budget.validate();
  design_bounds.validate();
  if (!std::isfinite(family.mean_fn_bound))
    throw UnsupportedError(
        "recommend_iht_config: family has unbounded mean function; supply an "
        "explicit truncation and noise scale instead");

  IhtConfig config;
  if (recipe == IhtRecipe::theory) {
    const double ratio = gamma / alpha;
    const double s_real = 4.0 * kThresholdingConstant * ratio * ratio *
                          static_cast<double>(s_star);
    if (s_real > static_cast<double>(d))
      throw ContractError(
          "recommend_iht_config: theory-mode sparsity " +
          std::to_string(static_cast<long long>(s_real)) + " exceeds d = " +
          std::to_string(d) + "; consider the practical recipe");
    config.sparsity = static_cast<int>(s_real);
    config.step_size = 1.0 / (2.0 * gamma);
    config.iterations = static_cast<int>(
        std::ceil((2.0 * gamma / (rho * alpha)) *
                  std::log(6.0 * gamma * static_cast<double>(n))));
  } else {
    if (2 * s_star > d)
      throw ContractError("recommend_iht_config: 2 s_star exceeds d");
    if (practical_iterations < 1)
      throw ContractError("recommend_iht_config: practical_iterations >= 1");
    config.sparsity = 2 * s_star;
    config.step_size = 1.0;
    config.iterations = practical_iterations;
  }
  config.truncation = default_truncation(family, n);
  config.noise_base =
      4.0 * (config.truncation + family.mean_fn_bound) * design_bounds.sigma_x;
  config.budget = budget;
  config.init = ParamVector::Zero(d);
  config.design_bounds = design_bounds;
  return config;
}

}  // namespace privglm

#endif  // PRIVGLM_DP_IHT_HPP
