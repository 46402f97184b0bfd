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

#ifndef PRIVGLM_SCORE_ATTACK_HPP
#define PRIVGLM_SCORE_ATTACK_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "privglm/errors.hpp"
#include "privglm/glm.hpp"
#include "privglm/rng.hpp"
#include "privglm/synthetic.hpp"

namespace privglm {

// GLM score of a single datum at the true parameter:
// (y - mean_fn(x' beta)) x / c(sigma). The membership statistic is the inner
// product of this score with (estimate - beta).
inline Eigen::VectorXd glm_score(const GlmFamily& family,
                                 const ParamVector& beta, double y,
                                 const Eigen::VectorXd& x) {
  if (x.size() != beta.size())
    throw ContractError("glm_score: dimension mismatch");
  return ((y - family.mean_fn(x.dot(beta))) / family.scale) * x;
}

inline double attack_value(const ParamVector& estimate,
                           const ParamVector& true_beta,
                           const Eigen::VectorXd& score) {
  if (estimate.size() != true_beta.size() || score.size() != true_beta.size())
    throw ContractError("attack_value: dimension mismatch");
  return (estimate - true_beta).dot(score);
}

// Attack value with the estimate/truth difference restricted to the support
// of the true parameter (coordinates where true_beta != 0).
inline double sparse_attack_value(const ParamVector& estimate,
                                  const ParamVector& true_beta,
                                  const Eigen::VectorXd& score) {
  if (estimate.size() != true_beta.size() || score.size() != true_beta.size())
    throw ContractError("sparse_attack_value: dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < true_beta.size(); ++j)
    if (true_beta[j] != 0.0) acc += (estimate[j] - true_beta[j]) * score[j];
  return acc;
}

// Monte Carlo summary of the attack statistic: the out-of-sample mean (zero
// for any estimator if the attack is sound) and the in-sample sum (equal to
// the sum of derivatives of the estimator's expectation if it is complete),
// each with its standard error over trials.
struct AttackReport {
  double mean_out = 0.0;
  double se_out = 0.0;
  double sum_in = 0.0;
  double se_sum_in = 0.0;
  Eigen::Index n = 0;
  int trials = 0;
};

using Estimator = std::function<ParamVector(const Dataset&, RngStream)>;
using BetaSampler = std::function<ParamVector(RngStream&)>;

namespace detail {

// Compensated (Kahan) accumulator; keeps report aggregation insensitive to
// summation order across parallel trial layouts.
class KahanSum {
 public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace detail

// Empirical soundness/completeness harness. Per trial: draw a true beta and a
// dataset; pick a uniform index i and an independent replacement datum; record
// the attack value of the held-out datum (y_i, x_i) against the estimate
// trained on the replaced dataset (soundness sample), and the sum of in-sample
// attack values against the estimate trained on the original dataset
// (completeness sample). Scores are always evaluated at the true beta.
inline AttackReport run_attack_experiment(const GlmFamily& family,
                                          const Estimator& estimator,
                                          Eigen::Index n, Eigen::Index d,
                                          const BetaSampler& beta_sampler,
                                          int trials, RngStream rng) {
  if (n < 2 || d < 1) throw ContractError("run_attack_experiment: need n >= 2, d >= 1");
  if (trials < 30)
    throw ContractError("run_attack_experiment: need trials >= 30");

  detail::KahanSum out_sum, out_sq, in_sum, in_sq;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream trial_rng = rng.substream(static_cast<std::uint64_t>(trial));
    RngStream beta_rng = trial_rng.substream(0);
    const ParamVector beta = beta_sampler(beta_rng);
    if (beta.size() != d)
      throw ContractError("run_attack_experiment: beta_sampler dimension");

    RngStream data_rng = trial_rng.substream(1);
    Dataset data = generate_glm_data(family, beta, n, data_rng);

    RngStream index_rng = trial_rng.substream(2);
    const Eigen::Index held_out = static_cast<Eigen::Index>(
        index_rng.uniform_index(static_cast<std::uint64_t>(n)));
    RngStream replacement_rng = trial_rng.substream(3);
    const Dataset replacement =
        generate_glm_data(family, beta, 1, replacement_rng);

    Dataset replaced = data;
    replaced.x.row(held_out) = replacement.x.row(0);
    replaced.y[held_out] = replacement.y[0];

    ParamVector est_without, est_with;
    try {
      est_without = estimator(replaced, trial_rng.substream(4));
      est_with = estimator(data, trial_rng.substream(5));
    } catch (const std::exception& e) {
      throw std::runtime_error("run_attack_experiment: estimator failed at "
                               "trial " +
                               std::to_string(trial) + ": " + e.what());
    }

    const Eigen::VectorXd held_out_score =
        glm_score(family, beta, data.y[held_out], data.x.row(held_out));
    const double a_out = attack_value(est_without, beta, held_out_score);

    Eigen::VectorXd total_score = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i)
      total_score += glm_score(family, beta, data.y[i], data.x.row(i));
    const double a_in = attack_value(est_with, beta, total_score);

    out_sum.add(a_out);
    out_sq.add(a_out * a_out);
    in_sum.add(a_in);
    in_sq.add(a_in * a_in);
  }

  const double t = static_cast<double>(trials);
  AttackReport report;
  report.n = n;
  report.trials = trials;
  report.mean_out = out_sum.value() / t;
  report.sum_in = in_sum.value() / t;
  const double var_out =
      std::max(0.0, (out_sq.value() - t * report.mean_out * report.mean_out) /
                        (t - 1.0));
  const double var_in =
      std::max(0.0, (in_sq.value() - t * report.sum_in * report.sum_in) /
                        (t - 1.0));
  report.se_out = std::sqrt(var_out / t);
  report.se_sum_in = std::sqrt(var_in / t);
  return report;
}

}  // namespace privglm

#endif  // PRIVGLM_SCORE_ATTACK_HPP
