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

#include "privglm/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

namespace privglm {
namespace {

TEST(GenerateSyntheticTest, UnitSphereNormalization) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SyntheticSpec spec;
    spec.n = 1;
    spec.d = 1 + static_cast<Eigen::Index>(seed % 16);
    spec.seed = seed;
    auto [data, beta] = generate_synthetic(spec);
    EXPECT_NEAR(beta.norm(), 1.0, 1e-12);
  }
}

TEST(GenerateSyntheticTest, DesignAndResponseRanges) {
  SyntheticSpec spec;
  spec.n = 500;
  spec.d = 8;
  spec.seed = 4;
  auto [data, beta] = generate_synthetic(spec);
  EXPECT_LT(data.x.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < data.n(); ++i)
    EXPECT_TRUE(data.y[i] == 0.0 || data.y[i] == 1.0);
}

TEST(GenerateSyntheticTest, SparseTruthOnLeadingCoordinates) {
  SyntheticSpec spec;
  spec.n = 10;
  spec.d = 100;
  spec.sparsity = 10;
  spec.seed = 5;
  auto [data, beta] = generate_synthetic(spec);
  int nonzeros = 0;
  for (Eigen::Index j = 0; j < 100; ++j) {
    if (beta[j] != 0.0) {
      ++nonzeros;
      EXPECT_LT(j, 10);
    }
  }
  EXPECT_EQ(nonzeros, 10);
  EXPECT_NEAR(beta.norm(), 1.0, 1e-12);
}

TEST(GenerateSyntheticTest, SeedDeterminism) {
  SyntheticSpec spec;
  spec.n = 64;
  spec.d = 9;
  spec.seed = 123;
  auto [data_a, beta_a] = generate_synthetic(spec);
  auto [data_b, beta_b] = generate_synthetic(spec);
  EXPECT_EQ(beta_a, beta_b);
  EXPECT_EQ(data_a.x, data_b.x);
  EXPECT_EQ(data_a.y, data_b.y);

  spec.seed = 124;
  auto [data_c, beta_c] = generate_synthetic(spec);
  EXPECT_NE(beta_a, beta_c);
}

TEST(GenerateSyntheticTest, LinearFamilyResponses) {
  SyntheticSpec spec;
  spec.n = 2000;
  spec.d = 3;
  spec.seed = 8;
  spec.family = GlmFamily::linear(0.5);
  auto [data, beta] = generate_synthetic(spec);
  const Eigen::VectorXd residual = data.y - data.x * beta;
  const double variance = residual.squaredNorm() / 2000.0;
  EXPECT_NEAR(variance, 0.25, 0.05);
}

TEST(RunTrajectoryTest, NonPrivateLogisticDescendsMonotonically) {
  SyntheticSpec spec;
  spec.n = 20000;
  spec.d = 5;
  TrajectoryEstimatorConfig cfg;
  cfg.kind = TrajectoryEstimatorConfig::Kind::low_dim;
  cfg.epsilon = kInf;
  cfg.iterations = 15;
  const std::uint64_t seeds[] = {1, 2, 3};
  const TrajectoryResult result = run_trajectory(spec, cfg, seeds, "inf-run");
  EXPECT_TRUE(result.failed_seeds.empty());
  ASSERT_EQ(result.records.size(), 3u * 16u);
  for (int s = 0; s < 3; ++s) {
    for (int t = 1; t <= 15; ++t) {
      const TrajectoryRecord& prev = result.records[s * 16 + t - 1];
      const TrajectoryRecord& curr = result.records[s * 16 + t];
      EXPECT_EQ(curr.iteration, t);
      if (t >= 2)
        EXPECT_LE(curr.log_sq_error, prev.log_sq_error + 1e-12)
            << "seed " << s << " t " << t;
    }
  }
}

TEST(RunTrajectoryTest, DivergenceBecomesFailedSeed) {
  SyntheticSpec spec;
  spec.n = 100;
  spec.d = 2;
  spec.family = GlmFamily::linear(1.0);
  TrajectoryEstimatorConfig cfg;
  cfg.kind = TrajectoryEstimatorConfig::Kind::low_dim;
  cfg.epsilon = kInf;
  cfg.iterations = 400;
  cfg.step_size = 1e5;
  cfg.truncation = 100.0;
  const std::uint64_t seeds[] = {1, 2};
  const TrajectoryResult result = run_trajectory(spec, cfg, seeds, "diverge");
  EXPECT_EQ(result.failed_seeds.size(), 2u);
}

TEST(RunTrajectoryTest, SparsePrivateRunEmitsAllIterations) {
  SyntheticSpec spec;
  spec.n = 2000;
  spec.d = 100;
  spec.sparsity = 5;
  TrajectoryEstimatorConfig cfg;
  cfg.kind = TrajectoryEstimatorConfig::Kind::sparse;
  cfg.epsilon = 2.0;
  cfg.delta = 1.0 / 4000.0;
  cfg.iterations = 10;
  cfg.sparsity = 10;
  const std::uint64_t seeds[] = {11};
  const TrajectoryResult result = run_trajectory(spec, cfg, seeds, "sparse");
  EXPECT_TRUE(result.failed_seeds.empty());
  ASSERT_EQ(result.records.size(), 11u);
  EXPECT_EQ(result.records.front().iteration, 0);
  EXPECT_EQ(result.records.back().iteration, 10);
  EXPECT_EQ(result.records.front().config_label, "sparse");
  for (const TrajectoryRecord& record : result.records)
    EXPECT_TRUE(std::isfinite(record.log_sq_error));
}

TEST(EvaluateMisclassificationTest, PerfectSeparatorScoresZero) {
  Dataset test;
  test.x.resize(4, 2);
  test.x << 1.0, 0.2, 2.0, -0.3, -1.0, 0.4, -2.0, 0.1;
  test.y.resize(4);
  test.y << 1.0, 1.0, 0.0, 0.0;
  ParamVector beta(2);
  beta << 5.0, 0.0;
  EXPECT_EQ(
      evaluate_misclassification(GlmFamily::logistic(), beta, test), 0.0);
}

TEST(EvaluateMisclassificationTest, ZeroVectorPredictsClassZero) {
  Dataset test;
  test.x.resize(4, 1);
  test.x << 1.0, -1.0, 2.0, 0.5;
  test.y.resize(4);
  test.y << 1.0, 0.0, 0.0, 1.0;  // half the labels are 1
  EXPECT_EQ(evaluate_misclassification(GlmFamily::logistic(),
                                       ParamVector::Zero(1), test),
            0.5);
}

TEST(EvaluateMisclassificationTest, NonLogisticRejected) {
  Dataset test;
  test.x.resize(1, 1);
  test.x << 1.0;
  test.y.resize(1);
  test.y << 0.0;
  EXPECT_THROW(evaluate_misclassification(GlmFamily::linear(1.0),
                                          ParamVector::Zero(1), test),
               UnsupportedError);
}

Dataset separable_dataset(Eigen::Index n) {
  Dataset data;
  data.x.resize(n, 2);
  data.y.resize(n);
  RngStream rng(7, 7);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    data.x(i, 0) = sign * (0.5 + 0.5 * rng.uniform());
    data.x(i, 1) = rng.uniform_symmetric();
    data.y[i] = sign > 0 ? 1.0 : 0.0;
  }
  return data;
}

TEST(RunSplitExperimentTest, SeparableDataNonPrivateIsPerfect) {
  const Dataset data = separable_dataset(60);
  const SplitSetting settings[] = {{1, kInf, 0.0}};
  const auto reports =
      run_split_experiment(data, settings, 1, RngStream(3, 3));
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].misclassification_rate, 0.0);
  EXPECT_EQ(reports[0].repetitions, 1);
}

TEST(RunSplitExperimentTest, OneReportPerSetting) {
  const Dataset data = separable_dataset(40);
  const SplitSetting settings[] = {
      {1, kInf, 0.0}, {2, 2.0, 1e-3}, {1, 1.0, 1e-3}};
  SplitOptions opts;
  opts.iterations = 10;
  const auto reports =
      run_split_experiment(data, settings, 2, RngStream(4, 4), opts);
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& report : reports) {
    EXPECT_GE(report.misclassification_rate, 0.0);
    EXPECT_LE(report.misclassification_rate, 1.0);
    EXPECT_EQ(report.repetitions, 2);
  }
  EXPECT_EQ(reports[1].settings.sparsity, 2);
  EXPECT_EQ(reports[2].settings.epsilon, 1.0);
}

TEST(RunSplitExperimentTest, StrictThresholdingFlagRuns) {
  const Dataset data = separable_dataset(40);
  const SplitSetting settings[] = {{1, kInf, 0.0}};
  SplitOptions opts;
  opts.iterations = 10;
  opts.threshold_intercept = true;
  const auto reports =
      run_split_experiment(data, settings, 1, RngStream(5, 5), opts);
  ASSERT_EQ(reports.size(), 1u);
}

TEST(PersistenceTest, TrajectoryCsvFormat) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("privglm_exp_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "traj.csv").string();
  const TrajectoryRecord records[] = {
      {0, -0.5, 42, "cell_a"},
      {1, -1.25, 42, "cell_a"},
  };
  write_trajectory_csv(path, records);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "config_label,seed,iteration,log_sq_error");
  std::getline(in, line);
  EXPECT_EQ(line, "cell_a,42,0,-0.5");
  std::getline(in, line);
  EXPECT_EQ(line, "cell_a,42,1,-1.25");
  std::filesystem::remove_all(dir);
}

TEST(PersistenceTest, ManifestRoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("privglm_man_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "manifest.json").string();
  nlohmann::json manifest;
  manifest["command"] = "simulate";
  manifest["seeds"] = {1, 2, 3};
  manifest["artifact_version"] = kArtifactVersion;
  write_manifest(path, manifest);
  std::ifstream in(path);
  const nlohmann::json parsed = nlohmann::json::parse(in);
  EXPECT_EQ(parsed.at("command"), "simulate");
  EXPECT_EQ(parsed.at("seeds").size(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(PersistenceTest, ContentHashIsStable) {
  EXPECT_EQ(content_hash("abc"), content_hash("abc"));
  EXPECT_NE(content_hash("abc"), content_hash("abd"));
  EXPECT_EQ(content_hash("abc").size(), 16u);
}

}  // namespace
}  // namespace privglm
