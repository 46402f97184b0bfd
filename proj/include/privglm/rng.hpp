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

#ifndef PRIVGLM_RNG_HPP
#define PRIVGLM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "privglm/errors.hpp"

namespace privglm {

namespace detail {

// 64-bit finalizer (splitmix64); used to derive sub-stream identifiers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// A named, reproducible noise stream. Identical (seed, stream_id) pairs yield
// identical draw sequences; distinct stream_ids yield statistically
// independent sequences. A stream value is cheap to copy; the engine state
// lives inside, so a single stream must not be shared across concurrent
// callers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Fresh stream keyed by (this stream, key); used to hand independent noise
  // to per-iteration or per-trial work without consuming this stream.
  RngStream substream(std::uint64_t key) const {
    return RngStream(seed_, detail::mix64(stream_id_ ^ detail::mix64(key)));
  }

  // Uniform draw in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform draw in (-1, 1).
  double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

  // Inverse-CDF Laplace draw with the given scale.
  double laplace(double scale) {
    const double t = uniform() - 0.5;
    const double mag = -std::log1p(-2.0 * std::abs(t));
    return t < 0 ? -scale * mag : scale * mag;
  }

  // Box-Muller standard normal; consumes exactly two uniforms per draw.
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound == 0) throw ContractError("uniform_index: bound must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// dim independent Laplace(scale) draws; scale 0 returns the zero vector
// without consuming randomness.
inline Eigen::VectorXd laplace_vector(double scale, Eigen::Index dim,
                                      RngStream& rng) {
  if (scale < 0) throw ContractError("laplace_vector: scale must be >= 0");
  if (scale == 0) return Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = rng.laplace(scale);
  return out;
}

// dim independent N(0, std_dev^2) draws; std_dev 0 returns the zero vector
// without consuming randomness.
inline Eigen::VectorXd gaussian_vector(double std_dev, Eigen::Index dim,
                                       RngStream& rng) {
  if (std_dev < 0) throw ContractError("gaussian_vector: std_dev must be >= 0");
  if (std_dev == 0) return Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = std_dev * rng.gaussian();
  return out;
}

}  // namespace privglm

#endif  // PRIVGLM_RNG_HPP
