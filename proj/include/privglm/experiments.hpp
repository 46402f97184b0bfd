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

#ifndef PRIVGLM_EXPERIMENTS_HPP
#define PRIVGLM_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "privglm/csv.hpp"
#include "privglm/dp_gd.hpp"
#include "privglm/dp_iht.hpp"
#include "privglm/errors.hpp"
#include "privglm/glm.hpp"
#include "privglm/synthetic.hpp"

namespace privglm {

inline constexpr const char* kArtifactVersion = "0.1.0";

// One point of a log-error trajectory: log ||beta^t - beta*||_2^2 at a given
// iteration of one seeded run.
struct TrajectoryRecord {
  int iteration = 0;
  double log_sq_error = 0.0;
  std::uint64_t seed = 0;
  std::string config_label;
};

// Squared error floored before the log so records stay finite even at exact
// recovery.
inline double log_sq_error_of(const ParamVector& iterate,
                              const ParamVector& truth) {
  const double err = (iterate - truth).squaredNorm();
  return std::log(std::max(err, 1e-300));
}

// Which estimator a trajectory run drives and at what settings. An infinite
// epsilon is the non-private sentinel: the noise scale B is forced to zero.
struct TrajectoryEstimatorConfig {
  enum class Kind { low_dim, sparse };
  Kind kind = Kind::low_dim;
  double epsilon = kInf;
  double delta = 0.0;
  double step_size = 1.0;
  int iterations = 50;
  int sparsity = 1;  // sparse runs only; total selected support size
  std::optional<double> truncation;
  double sigma_x = 1.0;
};

struct TrajectoryResult {
  std::vector<TrajectoryRecord> records;
  std::vector<std::uint64_t> failed_seeds;  // diverged runs, recorded not thrown
};

namespace detail {

inline double noise_base_for(const GlmFamily& family, double truncation,
                             double sigma_x, double epsilon) {
  if (std::isinf(epsilon)) return 0.0;
  if (!std::isfinite(family.mean_fn_bound))
    throw UnsupportedError(
        "private runs need a family with bounded mean function");
  return 4.0 * (truncation + family.mean_fn_bound) * sigma_x;
}

}  // namespace detail

// Runs the requested estimator once per seed on fresh synthetic data and
// emits log ||beta^t - beta*||^2 for every iterate. Divergent runs become
// failed-seed entries rather than exceptions.
inline TrajectoryResult run_trajectory(const SyntheticSpec& base,
                                       const TrajectoryEstimatorConfig& cfg,
                                       std::span<const std::uint64_t> seeds,
                                       const std::string& config_label) {
  TrajectoryResult result;
  for (const std::uint64_t seed : seeds) {
    SyntheticSpec spec = base;
    spec.seed = seed;
    auto [data, truth] = generate_synthetic(spec);

    const double truncation = cfg.truncation
                                  ? *cfg.truncation
                                  : default_truncation(spec.family, spec.n);
    const double noise_base = detail::noise_base_for(spec.family, truncation,
                                                     cfg.sigma_x, cfg.epsilon);
    const PrivacyBudget budget{cfg.epsilon, cfg.delta};
    const DesignBounds bounds{cfg.sigma_x, DesignBounds::Norm::linf};
    RngStream fit_rng(seed, 0x666974);  // "fit"

    std::vector<TrajectoryRecord> run_records;
    auto record = [&](int iteration, const ParamVector& iterate) {
      run_records.push_back(TrajectoryRecord{
          iteration, log_sq_error_of(iterate, truth), seed, config_label});
    };

    try {
      if (cfg.kind == TrajectoryEstimatorConfig::Kind::low_dim) {
        GdConfig gd;
        gd.step_size = cfg.step_size;
        gd.iterations = cfg.iterations;
        gd.truncation = truncation;
        gd.noise_base = noise_base;
        gd.budget = budget;
        gd.init = ParamVector::Zero(spec.d);
        gd.design_bounds =
            DesignBounds{cfg.sigma_x, DesignBounds::Norm::l2_sqrt_d};
        const FitResult fit = fit_low_dim(spec.family, data, gd, fit_rng);
        for (size_t t = 0; t < fit.trace.size(); ++t)
          record(static_cast<int>(t), fit.trace[t]);
      } else {
        IhtConfig iht;
        iht.sparsity = cfg.sparsity;
        iht.step_size = cfg.step_size;
        iht.iterations = cfg.iterations;
        iht.truncation = truncation;
        iht.noise_base = noise_base;
        iht.budget = budget;
        iht.init = ParamVector::Zero(spec.d);
        iht.design_bounds = bounds;
        fit_sparse_glm(spec.family, data, iht, fit_rng, record);
      }
      result.records.insert(result.records.end(), run_records.begin(),
                            run_records.end());
    } catch (const DivergenceError&) {
      result.failed_seeds.push_back(seed);
    }
  }
  return result;
}

// Fraction of test labels misclassified by the linear rule 1{x' beta > 0}
// (ties resolve to class 0). Defined for the logistic family only.
inline double evaluate_misclassification(const GlmFamily& family,
                                         const ParamVector& estimate,
                                         const Dataset& test) {
  if (family.kind != FamilyKind::logistic)
    throw UnsupportedError(
        "evaluate_misclassification: only the logistic family is supported");
  test.validate();
  if (estimate.size() != test.d())
    throw ContractError("evaluate_misclassification: dimension mismatch");
  const Eigen::VectorXd margin = test.x * estimate;
  Eigen::Index mistakes = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const double predicted = margin[i] > 0 ? 1.0 : 0.0;
    if (predicted != test.y[i]) ++mistakes;
  }
  return static_cast<double>(mistakes) / static_cast<double>(test.n());
}

struct SplitSetting {
  int sparsity = 1;
  double epsilon = kInf;
  double delta = 0.0;
};

struct SplitOptions {
  int iterations = 50;
  double step_size = 0.5;
  double sigma_x = 1.0;
  // Strict-fidelity switch: when true the intercept competes in hard
  // thresholding like any other coordinate instead of being always kept.
  bool threshold_intercept = false;
};

// Mean and standard error of misclassification over repeated random splits
// at one (s, epsilon, delta) setting.
struct ClassificationReport {
  double misclassification_rate = 0.0;
  double std_error = 0.0;
  SplitSetting settings;
  int repetitions = 0;
};

// Repeated half/half split evaluation of the sparse private fit on a binary
// dataset. A constant-one intercept column is appended before fitting and,
// unless opts.threshold_intercept is set, is exempt from thresholding.
inline std::vector<ClassificationReport> run_split_experiment(
    const Dataset& data, std::span<const SplitSetting> settings,
    int repetitions, RngStream rng, const SplitOptions& opts = {}) {
  data.validate();
  if (data.n() < 2) throw ContractError("run_split_experiment: need n >= 2");
  if (repetitions < 1)
    throw ContractError("run_split_experiment: need repetitions >= 1");
  const GlmFamily family = GlmFamily::logistic();
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.d();
  const Eigen::Index n_train = n / 2;
  const Eigen::Index n_test = n - n_train;

  std::vector<ClassificationReport> reports;
  reports.reserve(settings.size());
  for (size_t which = 0; which < settings.size(); ++which) {
    const SplitSetting& setting = settings[which];
    std::vector<double> rates;
    rates.reserve(static_cast<size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
      RngStream rep_rng =
          rng.substream(which * 1000003ULL + static_cast<std::uint64_t>(rep));

      std::vector<Eigen::Index> order(static_cast<size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(
            rep_rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      }

      Dataset train, test;
      train.x.resize(n_train, d + 1);
      train.y.resize(n_train);
      test.x.resize(n_test, d + 1);
      test.y.resize(n_test);
      for (Eigen::Index i = 0; i < n_train; ++i) {
        train.x.block(i, 0, 1, d) = data.x.row(order[static_cast<size_t>(i)]);
        train.x(i, d) = 1.0;
        train.y[i] = data.y[order[static_cast<size_t>(i)]];
      }
      for (Eigen::Index i = 0; i < n_test; ++i) {
        const Eigen::Index src = order[static_cast<size_t>(n_train + i)];
        test.x.block(i, 0, 1, d) = data.x.row(src);
        test.x(i, d) = 1.0;
        test.y[i] = data.y[src];
      }

      IhtConfig config;
      config.sparsity = setting.sparsity;
      config.step_size = opts.step_size;
      config.iterations = opts.iterations;
      config.truncation = default_truncation(family, n_train);
      config.noise_base = detail::noise_base_for(
          family, config.truncation, opts.sigma_x, setting.epsilon);
      config.budget = PrivacyBudget{setting.epsilon, setting.delta};
      config.init = ParamVector::Zero(d + 1);
      config.design_bounds = DesignBounds{opts.sigma_x, DesignBounds::Norm::linf};
      if (!opts.threshold_intercept) config.always_keep = {d};

      const SparseFitResult fit =
          fit_sparse_glm(family, train, config, rep_rng.substream(7));
      rates.push_back(evaluate_misclassification(family, fit.estimate, test));
    }

    ClassificationReport report;
    report.settings = setting;
    report.repetitions = repetitions;
    double mean = 0.0;
    for (const double r : rates) mean += r;
    mean /= static_cast<double>(repetitions);
    double var = 0.0;
    for (const double r : rates) var += (r - mean) * (r - mean);
    var = repetitions > 1 ? var / static_cast<double>(repetitions - 1) : 0.0;
    report.misclassification_rate = mean;
    report.std_error = std::sqrt(var / static_cast<double>(repetitions));
    reports.push_back(report);
  }
  return reports;
}

// Plot-ready persistence: one record per row.
inline void write_trajectory_csv(const std::string& path,
                                 std::span<const TrajectoryRecord> records) {
  std::ofstream out(path);
  if (!out) throw DataError("write_trajectory_csv: cannot open '" + path + "'");
  out << "config_label,seed,iteration,log_sq_error\n";
  out.precision(17);
  for (const TrajectoryRecord& record : records)
    out << record.config_label << ',' << record.seed << ','
        << record.iteration << ',' << record.log_sq_error << "\n";
  if (!out)
    throw DataError("write_trajectory_csv: write failed for '" + path + "'");
}

// The manifest is written after all result files; its presence marks a
// completed run.
inline void write_manifest(const std::string& path,
                           const nlohmann::json& manifest) {
  std::ofstream out(path);
  if (!out) throw DataError("write_manifest: cannot open '" + path + "'");
  out << manifest.dump(2) << "\n";
  if (!out) throw DataError("write_manifest: write failed for '" + path + "'");
}

// FNV-1a content hash used to fingerprint run inputs inside manifests.
inline std::string content_hash(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buffer);
}

}  // namespace privglm

#endif  // PRIVGLM_EXPERIMENTS_HPP
