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

#ifndef PRIVGLM_SYNTHETIC_HPP
#define PRIVGLM_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "privglm/errors.hpp"
#include "privglm/glm.hpp"
#include "privglm/rng.hpp"

namespace privglm {

// Uniform draw from the unit sphere: a normalized standard Gaussian vector.
inline ParamVector sample_unit_sphere(Eigen::Index dim, RngStream& rng) {
  if (dim < 1) throw ContractError("sample_unit_sphere: need dim >= 1");
  ParamVector v(dim);
  double norm_sq = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.gaussian();
    norm_sq = v.squaredNorm();
  } while (norm_sq == 0.0);
  return v / std::sqrt(norm_sq);
}

// Dataset drawn at a given parameter vector: design entries i.i.d. uniform on
// (-1, 1), responses from the family's conditional law. Draws proceed row by
// row (d design uniforms, then the response draws), so two calls on identical
// streams share the same design and response uniforms regardless of beta:
// common random numbers for derivative estimation.
inline Dataset generate_glm_data(const GlmFamily& family,
                                 const ParamVector& beta, Eigen::Index n,
                                 RngStream& rng) {
  if (n < 1) throw ContractError("generate_glm_data: need n >= 1");
  const Eigen::Index d = beta.size();
  if (d < 1) throw ContractError("generate_glm_data: need d >= 1");
  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  const double response_sigma =
      family.kind == FamilyKind::linear ? std::sqrt(family.scale) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double u = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double entry = rng.uniform_symmetric();
      data.x(i, j) = entry;
      u += entry * beta[j];
    }
    switch (family.kind) {
      case FamilyKind::logistic:
        data.y[i] = rng.bernoulli(detail::sigmoid(u)) ? 1.0 : 0.0;
        break;
      case FamilyKind::linear:
        data.y[i] = u + response_sigma * rng.gaussian();
        break;
      default:
        throw UnsupportedError(
            "generate_glm_data: no response sampler for this family");
    }
  }
  return data;
}

// Recipe for one synthetic (dataset, truth) pair. A missing sparsity means a
// dense parameter drawn uniformly from the unit sphere; otherwise the
// parameter concatenates a unit-sphere draw on the first `sparsity`
// coordinates with zeros.
struct SyntheticSpec {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  std::optional<Eigen::Index> sparsity;
  GlmFamily family = GlmFamily::logistic();
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || d < 1) throw ContractError("SyntheticSpec: need n, d >= 1");
    if (sparsity && (*sparsity < 1 || *sparsity > d))
      throw ContractError("SyntheticSpec: need 1 <= sparsity <= d");
  }
};

// Stream ids reserved by the generator so repeated runs at the same seed are
// byte-identical.
inline constexpr std::uint64_t kBetaStream = 0x62657461;  // "beta"
inline constexpr std::uint64_t kDataStream = 0x64617461;  // "data"

inline std::pair<Dataset, ParamVector> generate_synthetic(
    const SyntheticSpec& spec) {
  spec.validate();
  RngStream beta_rng(spec.seed, kBetaStream);
  ParamVector beta = ParamVector::Zero(spec.d);
  if (spec.sparsity) {
    beta.head(*spec.sparsity) = sample_unit_sphere(*spec.sparsity, beta_rng);
  } else {
    beta = sample_unit_sphere(spec.d, beta_rng);
  }
  RngStream data_rng(spec.seed, kDataStream);
  Dataset data = generate_glm_data(spec.family, beta, spec.n, data_rng);
  return {std::move(data), std::move(beta)};
}

}  // namespace privglm

#endif  // PRIVGLM_SYNTHETIC_HPP
