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

#ifndef PRIVGLM_MECHANISMS_HPP
#define PRIVGLM_MECHANISMS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "privglm/errors.hpp"
#include "privglm/rng.hpp"

namespace privglm {

// An (epsilon, delta) differential privacy guarantee.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon > 0)) throw ContractError("PrivacyBudget: epsilon must be > 0");
    if (!(delta >= 0) || delta >= 1)
      throw ContractError("PrivacyBudget: delta must lie in [0, 1)");
  }
};

// Budget after running k copies of an (epsilon, delta) mechanism under basic
// composition: (k epsilon, k delta).
inline PrivacyBudget compose_basic(const PrivacyBudget& budget, int k) {
  budget.validate();
  if (k < 1) throw ContractError("compose_basic: k must be >= 1");
  return PrivacyBudget{k * budget.epsilon, k * budget.delta};
}

// Budget after k-fold advanced composition with slack delta_prime:
// (sqrt(2 k log(1/delta')) eps + k (e^eps - 1) eps, k delta + delta').
inline PrivacyBudget compose_advanced(const PrivacyBudget& budget, int k,
                                      double delta_prime) {
  budget.validate();
  if (k < 1) throw ContractError("compose_advanced: k must be >= 1");
  if (!(delta_prime > 0) || delta_prime >= 1)
    throw ContractError("compose_advanced: delta_prime must lie in (0, 1)");
  const double eps = budget.epsilon;
  const double eps_out =
      std::sqrt(2.0 * k * std::log(1.0 / delta_prime)) * eps +
      k * std::expm1(eps) * eps;
  return PrivacyBudget{eps_out, k * budget.delta + delta_prime};
}

// Diagnostics recorded by the peeling selection: the support in selection
// order, the sup-norm of each round's full selection-noise vector, and the
// output noise restricted to the support (aligned with selected_support).
struct ThresholdTrace {
  std::vector<Eigen::Index> selected_support;
  std::vector<double> selection_noise_linf;
  std::vector<double> output_noise;
};

// Per-coordinate Laplace scale used by the peeling mechanism:
// lambda * 2 sqrt(3 s log(1/delta)) / epsilon. lambda = 0 means no noise;
// otherwise delta must be positive for the calibration to exist.
inline double noisy_ht_scale(double lambda, int sparsity,
                             const PrivacyBudget& budget) {
  budget.validate();
  if (lambda < 0) throw ContractError("noisy_ht_scale: lambda must be >= 0");
  if (sparsity < 1) throw ContractError("noisy_ht_scale: sparsity must be >= 1");
  if (lambda == 0) return 0.0;
  if (budget.delta <= 0)
    throw UnsupportedError(
        "noisy_ht_scale: calibration requires delta > 0 when lambda > 0");
  return lambda * 2.0 *
         std::sqrt(3.0 * sparsity * std::log(1.0 / budget.delta)) /
         budget.epsilon;
}

// Differentially private top-s selection by peeling. Runs s rounds; round i
// draws a fresh length-d Laplace vector w_i and appends
// argmax_{j not in S} |v_j| + w_ij to S (ties broken towards the lowest
// index). The output is v restricted to S plus a final Laplace vector
// restricted to S. lambda is the per-coordinate sensitivity of v across
// adjacent datasets, supplied by the caller. With lambda = 0 the output is
// the exact top-s restriction of v.
//
// forced_support lists coordinates placed in S before any peeling round;
// they receive output noise but do not count towards s. Used to keep an
// intercept coordinate unconditionally in the support.
inline std::pair<Eigen::VectorXd, ThresholdTrace> noisy_hard_threshold(
    const Eigen::VectorXd& v, int sparsity, const PrivacyBudget& budget,
    double lambda, RngStream& rng,
    std::span<const Eigen::Index> forced_support = {}) {
  const Eigen::Index d = v.size();
  if (sparsity < 1 || sparsity > d)
    throw ContractError("noisy_hard_threshold: need 1 <= s <= d");
  const double scale = noisy_ht_scale(lambda, sparsity, budget);

  ThresholdTrace trace;
  std::vector<char> selected(static_cast<size_t>(d), 0);
  for (Eigen::Index j : forced_support) {
    if (j < 0 || j >= d)
      throw ContractError("noisy_hard_threshold: forced index out of range");
    if (!selected[static_cast<size_t>(j)]) {
      selected[static_cast<size_t>(j)] = 1;
      trace.selected_support.push_back(j);
    }
  }

  const Eigen::Index free_coords =
      d - static_cast<Eigen::Index>(trace.selected_support.size());
  const int rounds = static_cast<int>(
      std::min<Eigen::Index>(sparsity, free_coords));

  Eigen::VectorXd noise(d);
  for (int round = 0; round < rounds; ++round) {
    double noise_linf = 0.0;
    if (scale > 0) {
      noise = laplace_vector(scale, d, rng);
      noise_linf = noise.lpNorm<Eigen::Infinity>();
    } else {
      noise.setZero();
    }
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (selected[static_cast<size_t>(j)]) continue;
      const double score = std::abs(v[j]) + noise[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    selected[static_cast<size_t>(best)] = 1;
    trace.selected_support.push_back(best);
    trace.selection_noise_linf.push_back(noise_linf);
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  if (scale > 0) {
    const Eigen::VectorXd output_noise = laplace_vector(scale, d, rng);
    for (Eigen::Index j : trace.selected_support) {
      out[j] = v[j] + output_noise[j];
      trace.output_noise.push_back(output_noise[j]);
    }
  } else {
    for (Eigen::Index j : trace.selected_support) {
      out[j] = v[j];
      trace.output_noise.push_back(0.0);
    }
  }
  return {std::move(out), std::move(trace)};
}

}  // namespace privglm

#endif  // PRIVGLM_MECHANISMS_HPP
