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

#ifndef PRIVGLM_GLM_HPP
#define PRIVGLM_GLM_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "privglm/errors.hpp"

namespace privglm {

using ParamVector = Eigen::VectorXd;
// Design matrices are stored dense and row-major (row i is sample i).
using DesignMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FamilyKind { logistic, linear, poisson };

// A natural exponential family with identity sufficient statistic: the
// response density is h(y, sigma) exp((u * y - cumulant(u)) / scale) with
// natural parameter u = x' beta. mean_fn and variance_fn are the first and
// second derivatives of the cumulant; mean_fn_bound / variance_fn_bound are
// their sup-norm bounds (infinite when unbounded), and response_sup is the
// essential supremum of |y| (infinite when the response is unbounded).
struct GlmFamily {
  FamilyKind kind = FamilyKind::logistic;
  std::function<double(double)> cumulant;
  std::function<double(double)> mean_fn;
  std::function<double(double)> variance_fn;
  double scale = 1.0;               // c(sigma)
  double mean_fn_bound = kInf;      // sup |cumulant'|
  double variance_fn_bound = kInf;  // sup cumulant''
  double response_sup = kInf;       // ess sup |y|

  static GlmFamily logistic();
  static GlmFamily linear(double sigma);
  static GlmFamily poisson();
};

namespace detail {

// Numerically stable log(1 + e^u): u + log1p(e^-u) for u > 0, log1p(e^u)
// otherwise, so the exponent never overflows.
inline double log1pexp(double u) {
  return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

inline double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace detail

inline GlmFamily GlmFamily::logistic() {
  GlmFamily f;
  f.kind = FamilyKind::logistic;
  f.cumulant = detail::log1pexp;
  f.mean_fn = detail::sigmoid;
  f.variance_fn = [](double u) {
    return detail::sigmoid(u) * detail::sigmoid(-u);
  };
  f.scale = 1.0;
  f.mean_fn_bound = 1.0;
  f.variance_fn_bound = 0.25;
  f.response_sup = 1.0;
  return f;
}

inline GlmFamily GlmFamily::linear(double sigma) {
  if (!(sigma > 0)) throw ContractError("linear family: sigma must be > 0");
  GlmFamily f;
  f.kind = FamilyKind::linear;
  f.cumulant = [](double u) { return 0.5 * u * u; };
  f.mean_fn = [](double u) { return u; };
  f.variance_fn = [](double) { return 1.0; };
  f.scale = sigma * sigma;
  f.mean_fn_bound = kInf;
  f.variance_fn_bound = 1.0;
  f.response_sup = kInf;
  return f;
}

// Included for its loss machinery only: the unbounded cumulant derivatives
// violate the boundedness assumptions behind the default noise calibration,
// so truncation levels must be supplied explicitly by the caller.
inline GlmFamily GlmFamily::poisson() {
  GlmFamily f;
  f.kind = FamilyKind::poisson;
  f.cumulant = [](double u) { return std::exp(u); };
  f.mean_fn = [](double u) { return std::exp(u); };
  f.variance_fn = [](double u) { return std::exp(u); };
  f.scale = 1.0;
  f.mean_fn_bound = kInf;
  f.variance_fn_bound = kInf;
  f.response_sup = kInf;
  return f;
}

// An n x d design with the length-n response vector.
struct Dataset {
  DesignMatrix x;
  Eigen::VectorXd y;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }

  void validate() const {
    if (x.rows() < 1 || x.cols() < 1)
      throw ContractError("Dataset: need n >= 1 and d >= 1");
    if (y.size() != x.rows())
      throw ContractError("Dataset: response length " +
                          std::to_string(y.size()) + " != row count " +
                          std::to_string(x.rows()));
    if (!x.allFinite() || !y.allFinite())
      throw ContractError("Dataset: non-finite entries");
  }
};

// Almost-sure design bound: either ||x||_2 < sigma_x * sqrt(d) or
// ||x||_inf < sigma_x, depending on which norm the bound is stated in.
struct DesignBounds {
  enum class Norm { l2_sqrt_d, linf };
  double sigma_x = 1.0;
  Norm norm_kind = Norm::linf;

  void validate() const {
    if (!(sigma_x > 0)) throw ContractError("DesignBounds: sigma_x must be > 0");
  }
};

// Projection of t onto [-bound, bound].
inline double clamp(double t, double bound) {
  if (bound < 0) throw ContractError("clamp: bound must be >= 0");
  return std::min(std::max(t, -bound), bound);
}

// Average negative log-likelihood (up to the beta-free terms):
// (1/n) sum_i [cumulant(x_i' beta) - y_i * x_i' beta].
// Dataset well-formedness (finite entries, shape) is enforced where datasets
// are created or enter a fit; only dimensions are checked here.
inline double negative_log_likelihood(const GlmFamily& family,
                                      const ParamVector& beta,
                                      const Dataset& data) {
  if (beta.size() != data.d())
    throw ContractError("negative_log_likelihood: beta has dimension " +
                        std::to_string(beta.size()) + ", data has " +
                        std::to_string(data.d()));
  const Eigen::VectorXd u = data.x * beta;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    acc += family.cumulant(u[i]) - data.y[i] * u[i];
  return acc / static_cast<double>(data.n());
}

// Gradient of the truncated loss:
// (1/n) sum_i (mean_fn(x_i' beta) - clamp(y_i, truncation)) x_i.
// Equals the exact loss gradient whenever truncation >= max |y_i|.
inline Eigen::VectorXd clamped_gradient(const GlmFamily& family,
                                        const ParamVector& beta,
                                        const Dataset& data,
                                        double truncation) {
  if (beta.size() != data.d())
    throw ContractError("clamped_gradient: beta has dimension " +
                        std::to_string(beta.size()) + ", data has " +
                        std::to_string(data.d()));
  if (truncation < 0)
    throw ContractError("clamped_gradient: truncation must be >= 0");
  Eigen::VectorXd residual = data.x * beta;
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    residual[i] = family.mean_fn(residual[i]) - clamp(data.y[i], truncation);
  return (data.x.transpose() * residual) / static_cast<double>(data.n());
}

// Response truncation level min(response_sup, c1 + sqrt(2 c2 c(sigma) log n)),
// with an infinite member treated as absent. Families where both members are
// infinite need an explicit caller-supplied truncation instead.
inline double default_truncation(const GlmFamily& family, Eigen::Index n) {
  if (n < 2) throw ContractError("default_truncation: need n >= 2");
  double from_tail = kInf;
  if (std::isfinite(family.mean_fn_bound) &&
      std::isfinite(family.variance_fn_bound)) {
    from_tail = family.mean_fn_bound +
                std::sqrt(2.0 * family.variance_fn_bound * family.scale *
                          std::log(static_cast<double>(n)));
  }
  const double level = std::min(family.response_sup, from_tail);
  if (!std::isfinite(level))
    throw UnsupportedError(
        "default_truncation: family has unbounded response and unbounded "
        "cumulant derivatives; supply a truncation level explicitly");
  return level;
}

}  // namespace privglm

#endif  // PRIVGLM_GLM_HPP
