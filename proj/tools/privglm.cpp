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

// Command-line front end: `simulate` reproduces the synthetic trajectory
// grids, `fit` runs one estimator over a CSV dataset, and `attack` runs the
// score-attack soundness/completeness harness. Machine-readable results go to
// files; stdout carries human-readable summaries only.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "privglm/privglm.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitData = 4;

std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PRIVGLM_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

double parse_epsilon(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF")
    return privglm::kInf;
  size_t consumed = 0;
  const double value = std::stod(text, &consumed);
  if (consumed != text.size() || !(value > 0))
    throw privglm::ContractError("--epsilon must be a positive number or 'inf'");
  return value;
}

privglm::GlmFamily parse_family(const std::string& name, double sigma) {
  if (name == "logistic") return privglm::GlmFamily::logistic();
  if (name == "linear") return privglm::GlmFamily::linear(sigma);
  if (name == "poisson") return privglm::GlmFamily::poisson();
  throw privglm::ContractError("unknown family '" + name + "'");
}

// delta entries may be a number or one of the n-dependent spellings used in
// the simulation protocol.
double resolve_delta(const json& value, Eigen::Index n) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    if (text == "1/(2n)") return 1.0 / (2.0 * static_cast<double>(n));
    if (text == "1/n^2")
      return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  }
  throw privglm::ContractError(
      "delta must be a number, \"1/(2n)\" or \"1/n^2\"");
}

std::vector<double> epsilon_list(const json& value) {
  std::vector<double> out;
  const json items = value.is_array() ? value : json::array({value});
  for (const json& item : items) {
    if (item.is_string())
      out.push_back(parse_epsilon(item.get<std::string>()));
    else
      out.push_back(item.get<double>());
  }
  for (const double eps : out)
    if (!(eps > 0))
      throw privglm::ContractError("epsilon values must be positive");
  return out;
}

template <typename T>
std::vector<T> number_list(const json& value) {
  if (value.is_array()) return value.get<std::vector<T>>();
  return {value.get<T>()};
}

std::vector<std::uint64_t> seed_list(const json& value) {
  if (value.is_array()) return value.get<std::vector<std::uint64_t>>();
  if (value.is_object()) {
    const auto count = value.at("count").get<std::uint64_t>();
    const auto base = value.value("base", std::uint64_t{1});
    std::vector<std::uint64_t> seeds(count);
    for (std::uint64_t i = 0; i < count; ++i) seeds[i] = base + i;
    return seeds;
  }
  throw privglm::ContractError(
      "seeds must be an array or {\"count\": k, \"base\": b}");
}

std::string format_epsilon(double eps) {
  if (std::isinf(eps)) return "inf";
  std::string text = std::to_string(eps);
  while (text.size() > 1 && text.back() == '0') text.pop_back();
  if (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

struct SimulateCell {
  privglm::SyntheticSpec spec;
  privglm::TrajectoryEstimatorConfig estimator;
  std::string label;
};

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 int jobs, bool full) {
  std::ifstream config_file(config_path);
  if (!config_file)
    throw privglm::DataError("cannot open config '" + config_path + "'");
  json config = json::parse(config_file);  // parse_error escapes as usage
  if (full && config.contains("full"))
    for (const auto& [key, value] : config.at("full").items())
      config[key] = value;

  const std::string kind = config.at("kind").get<std::string>();
  const bool sparse = kind == "sparse-traj";
  if (!sparse && kind != "lowdim-traj")
    throw privglm::ContractError("kind must be lowdim-traj or sparse-traj");
  const std::string label_prefix = config.value("label", kind);
  const privglm::GlmFamily family =
      parse_family(config.value("family", std::string("logistic")),
                   config.value("sigma", 1.0));

  const std::vector<Eigen::Index> n_grid =
      number_list<Eigen::Index>(config.at("n"));
  const std::vector<Eigen::Index> d_grid =
      number_list<Eigen::Index>(config.at("d"));
  const std::vector<int> s_star_grid =
      sparse ? number_list<int>(config.at("s_star")) : std::vector<int>{0};
  const int sparsity_factor = config.value("sparsity_factor", 2);
  const std::vector<double> eps_grid = epsilon_list(config.at("epsilon"));
  const std::vector<std::uint64_t> seeds = seed_list(config.at("seeds"));
  const int iterations = config.value("iterations", 50);
  const double step_size = config.value("step_size", 1.0);
  const double sigma_x = config.value("sigma_x", 1.0);

  std::vector<SimulateCell> cells;
  for (const Eigen::Index n : n_grid)
    for (const Eigen::Index d : d_grid)
      for (const int s_star : s_star_grid)
        for (const double eps : eps_grid) {
          SimulateCell cell;
          cell.spec.n = n;
          cell.spec.d = d;
          cell.spec.family = family;
          if (sparse) cell.spec.sparsity = s_star;
          cell.estimator.kind =
              sparse ? privglm::TrajectoryEstimatorConfig::Kind::sparse
                     : privglm::TrajectoryEstimatorConfig::Kind::low_dim;
          cell.estimator.epsilon = eps;
          cell.estimator.delta =
              std::isinf(eps) ? 0.0 : resolve_delta(config.at("delta"), n);
          cell.estimator.step_size = step_size;
          cell.estimator.iterations = iterations;
          cell.estimator.sigma_x = sigma_x;
          if (config.contains("truncation"))
            cell.estimator.truncation = config.at("truncation").get<double>();
          if (sparse) cell.estimator.sparsity = sparsity_factor * s_star;
          cell.label = label_prefix + ":n=" + std::to_string(n) +
                       ",d=" + std::to_string(d) +
                       (sparse ? ",s*=" + std::to_string(s_star) : "") +
                       ",eps=" + format_epsilon(eps);
          cells.push_back(std::move(cell));
        }

  std::filesystem::create_directories(out_dir);
  const std::string started_at = timestamp_utc();

  std::vector<privglm::TrajectoryResult> results(cells.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= cells.size()) return;
      const SimulateCell& cell = cells[index];
      results[index] = privglm::run_trajectory(cell.spec, cell.estimator,
                                               seeds, cell.label);
      std::lock_guard<std::mutex> guard(log_mutex);
      std::cout << "cell " << cell.label << ": "
                << seeds.size() - results[index].failed_seeds.size() << "/"
                << seeds.size() << " seeds completed\n";
    }
  };
  const int thread_count =
      std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::vector<privglm::TrajectoryRecord> records;
  bool any_cell_fully_failed = false;
  for (size_t i = 0; i < cells.size(); ++i) {
    records.insert(records.end(), results[i].records.begin(),
                   results[i].records.end());
    if (results[i].failed_seeds.size() == seeds.size()) {
      any_cell_fully_failed = true;
      std::cout << "cell " << cells[i].label << ": all seeds diverged\n";
    }
  }

  const std::string csv_path = out_dir + "/trajectories.csv";
  privglm::write_trajectory_csv(csv_path, records);

  json manifest;
  manifest["command"] = "simulate";
  manifest["config_path"] = config_path;
  manifest["config"] = config;
  manifest["config_hash"] = privglm::content_hash(config.dump());
  manifest["spec"] = {{"kind", kind}, {"cells", cells.size()}};
  manifest["seeds"] = seeds;
  manifest["output_dir"] = out_dir;
  manifest["started_at"] = started_at;
  manifest["artifact_version"] = privglm::kArtifactVersion;
  privglm::write_manifest(out_dir + "/manifest.json", manifest);

  std::cout << "wrote " << records.size() << " trajectory rows to " << csv_path
            << "\n";
  return any_cell_fully_failed ? kExitDivergence : kExitOk;
}

int run_fit(const std::string& data_path, const std::string& label_column,
            const std::string& family_name, double sigma,
            const std::string& estimator, const std::string& epsilon_text,
            double delta, std::optional<int> sparsity, int iterations,
            double step_size, std::optional<double> truncation, double sigma_x,
            std::uint64_t seed, const std::string& out_dir) {
  const double epsilon = parse_epsilon(epsilon_text);
  if (estimator != "gd" && estimator != "iht")
    throw privglm::ContractError("--estimator must be gd or iht");
  if (estimator == "iht" && !sparsity)
    throw privglm::ContractError("--sparsity is required with --estimator iht");
  if (!std::isinf(epsilon) && delta <= 0)
    throw privglm::ContractError(
        "--delta must be positive for a private run (epsilon < inf)");

  const privglm::GlmFamily family = parse_family(family_name, sigma);
  const privglm::Dataset data = privglm::load_csv(data_path, label_column);
  const double resolved_truncation =
      truncation ? *truncation : privglm::default_truncation(family, data.n());
  const double noise_base =
      std::isinf(epsilon)
          ? 0.0
          : 4.0 * (resolved_truncation + family.mean_fn_bound) * sigma_x;
  if (!std::isfinite(noise_base))
    throw privglm::UnsupportedError(
        "private fits require a family with bounded mean function");
  const privglm::PrivacyBudget budget{epsilon,
                                      std::isinf(epsilon) ? 0.0 : delta};

  std::filesystem::create_directories(out_dir);
  const std::string started_at = timestamp_utc();
  privglm::RngStream rng(seed, 0x666974);

  privglm::ParamVector estimate;
  if (estimator == "gd") {
    privglm::GdConfig config;
    config.step_size = step_size;
    config.iterations = iterations;
    config.truncation = resolved_truncation;
    config.noise_base = noise_base;
    config.budget = budget;
    config.init = privglm::ParamVector::Zero(data.d());
    config.design_bounds = {sigma_x, privglm::DesignBounds::Norm::l2_sqrt_d};
    estimate = privglm::fit_low_dim(family, data, config, rng).estimate;
  } else {
    privglm::IhtConfig config;
    config.sparsity = *sparsity;
    config.step_size = step_size;
    config.iterations = iterations;
    config.truncation = resolved_truncation;
    config.noise_base = noise_base;
    config.budget = budget;
    config.init = privglm::ParamVector::Zero(data.d());
    config.design_bounds = {sigma_x, privglm::DesignBounds::Norm::linf};
    estimate = privglm::fit_sparse_glm(family, data, config, rng).estimate;
  }

  const std::string estimate_path = out_dir + "/estimate.csv";
  {
    std::ofstream out(estimate_path);
    if (!out)
      throw privglm::DataError("cannot open '" + estimate_path + "'");
    out << "index,value\n";
    out.precision(17);
    for (Eigen::Index j = 0; j < estimate.size(); ++j)
      out << j << ',' << estimate[j] << "\n";
  }

  json manifest;
  manifest["command"] = "fit";
  manifest["config_path"] = data_path;
  manifest["config"] = {{"estimator", estimator},
                        {"family", family_name},
                        {"epsilon", epsilon_text},
                        {"delta", delta},
                        {"iterations", iterations},
                        {"step_size", step_size},
                        {"truncation", resolved_truncation},
                        {"sigma_x", sigma_x},
                        {"sparsity", sparsity ? json(*sparsity) : json()}};
  manifest["spec"] = {{"n", data.n()}, {"d", data.d()}};
  manifest["seed"] = seed;
  manifest["seeds"] = json::array({seed});
  manifest["output_dir"] = out_dir;
  manifest["started_at"] = started_at;
  manifest["artifact_version"] = privglm::kArtifactVersion;
  privglm::write_manifest(out_dir + "/manifest.json", manifest);

  const double loss =
      privglm::negative_log_likelihood(family, estimate, data);
  std::cout << "final loss: " << loss << "\n";
  std::cout << "estimate written to " << estimate_path << "\n";
  return kExitOk;
}

int run_attack(const std::string& family_name, Eigen::Index n, Eigen::Index d,
               int trials, const std::string& estimator_name,
               const std::string& epsilon_text, double delta, int iterations,
               double step_size, std::uint64_t seed,
               const std::string& out_dir) {
  const privglm::GlmFamily family = parse_family(family_name, 1.0);
  if (trials < 1) throw privglm::ContractError("--trials must be >= 1");

  const double truncation = privglm::default_truncation(family, n);
  privglm::Estimator estimator;
  if (estimator_name == "constant") {
    estimator = [d](const privglm::Dataset&, privglm::RngStream) {
      return privglm::ParamVector::Zero(d);
    };
  } else if (estimator_name == "gd" || estimator_name == "dp-gd") {
    const bool is_private = estimator_name == "dp-gd";
    const double epsilon = is_private ? parse_epsilon(epsilon_text) : privglm::kInf;
    const double used_delta =
        is_private ? (delta > 0 ? delta : 1.0 / (2.0 * static_cast<double>(n)))
                   : 0.0;
    privglm::GdConfig config;
    config.step_size = step_size;
    config.iterations = iterations;
    config.truncation = truncation;
    config.noise_base =
        is_private ? 4.0 * (truncation + family.mean_fn_bound) : 0.0;
    config.budget = {is_private ? epsilon : privglm::kInf, used_delta};
    config.init = privglm::ParamVector::Zero(d);
    config.design_bounds = {1.0, privglm::DesignBounds::Norm::l2_sqrt_d};
    estimator = [family, config](const privglm::Dataset& data,
                                 privglm::RngStream rng) {
      return privglm::fit_low_dim(family, data, config, rng).estimate;
    };
  } else {
    throw privglm::ContractError(
        "--estimator must be constant, gd, or dp-gd");
  }

  privglm::BetaSampler beta_sampler = [d](privglm::RngStream& rng) {
    return privglm::sample_unit_sphere(d, rng);
  };

  std::filesystem::create_directories(out_dir);
  const std::string started_at = timestamp_utc();
  const privglm::AttackReport report = privglm::run_attack_experiment(
      family, estimator, n, d, beta_sampler, trials,
      privglm::RngStream(seed, 0x61746b));

  json report_json = {{"mean_out", report.mean_out},
                      {"se_out", report.se_out},
                      {"sum_in", report.sum_in},
                      {"se_sum_in", report.se_sum_in},
                      {"n", report.n},
                      {"trials", report.trials}};
  {
    std::ofstream out(out_dir + "/attack_report.json");
    if (!out)
      throw privglm::DataError("cannot open '" + out_dir +
                               "/attack_report.json'");
    out << report_json.dump(2) << "\n";
  }

  json manifest;
  manifest["command"] = "attack";
  manifest["config_path"] = "";
  manifest["config"] = {{"family", family_name},
                        {"estimator", estimator_name},
                        {"epsilon", epsilon_text},
                        {"delta", delta},
                        {"iterations", iterations},
                        {"step_size", step_size},
                        {"trials", trials}};
  manifest["spec"] = {{"n", n}, {"d", d}};
  manifest["seed"] = seed;
  manifest["seeds"] = json::array({seed});
  manifest["output_dir"] = out_dir;
  manifest["started_at"] = started_at;
  manifest["artifact_version"] = privglm::kArtifactVersion;
  privglm::write_manifest(out_dir + "/manifest.json", manifest);

  std::cout << "soundness: mean_out = " << report.mean_out
            << " (se " << report.se_out << ")\n";
  std::cout << "completeness: sum_in = " << report.sum_in << " (se "
            << report.se_sum_in << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private GLM estimation toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Run a synthetic trajectory grid from a JSON config");
  std::string sim_config, sim_out;
  int sim_jobs = 1;
  bool sim_full = false;
  simulate->add_option("--config", sim_config, "JSON experiment config")
      ->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--jobs", sim_jobs, "Concurrent grid cells")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--full", sim_full,
                     "Apply the config's full-scale overrides");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit one estimator on a CSV dataset");
  std::string fit_data, fit_label = "y", fit_family = "logistic";
  std::string fit_estimator, fit_epsilon;
  double fit_sigma = 1.0, fit_delta = 0.0, fit_step = 1.0, fit_sigma_x = 1.0;
  std::optional<int> fit_sparsity;
  std::optional<double> fit_truncation;
  int fit_iterations = 50;
  std::uint64_t fit_seed = default_seed();
  fit->add_option("--data", fit_data, "Dataset CSV path")->required();
  fit->add_option("--label", fit_label, "Label column name");
  fit->add_option("--family", fit_family, "logistic | linear | poisson");
  fit->add_option("--sigma", fit_sigma, "Linear-family noise level");
  fit->add_option("--estimator", fit_estimator, "gd | iht")->required();
  fit->add_option("--epsilon", fit_epsilon, "Privacy epsilon or 'inf'")
      ->required();
  fit->add_option("--delta", fit_delta, "Privacy delta");
  fit->add_option("--sparsity", fit_sparsity, "Support size (iht)");
  fit->add_option("--iterations", fit_iterations, "Iteration count");
  fit->add_option("--step-size", fit_step, "Step size");
  fit->add_option("--truncation", fit_truncation, "Response truncation level");
  fit->add_option("--sigma-x", fit_sigma_x, "Design bound sigma_x");
  fit->add_option("--seed", fit_seed, "Noise seed")->envname("PRIVGLM_SEED");
  std::string fit_out;
  fit->add_option("--out", fit_out, "Output directory")->required();

  // attack
  auto* attack = app.add_subcommand(
      "attack", "Score-attack soundness/completeness harness");
  std::string atk_family = "logistic", atk_estimator = "gd",
              atk_epsilon = "0.1";
  Eigen::Index atk_n = 500, atk_d = 5;
  int atk_trials = 200, atk_iterations = 100;
  double atk_delta = 0.0, atk_step = 1.0;
  std::uint64_t atk_seed = default_seed();
  std::string atk_out;
  attack->add_option("--family", atk_family, "Model family");
  attack->add_option("--n", atk_n, "Sample size per trial");
  attack->add_option("--d", atk_d, "Dimension");
  attack->add_option("--trials", atk_trials, "Monte Carlo trials");
  attack->add_option("--estimator", atk_estimator, "constant | gd | dp-gd");
  attack->add_option("--epsilon", atk_epsilon, "Epsilon for dp-gd");
  attack->add_option("--delta", atk_delta, "Delta for dp-gd (default 1/(2n))");
  attack->add_option("--iterations", atk_iterations, "GD iterations");
  attack->add_option("--step-size", atk_step, "GD step size");
  attack->add_option("--seed", atk_seed, "Seed")->envname("PRIVGLM_SEED");
  attack->add_option("--out", atk_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed())
      return run_simulate(sim_config, sim_out, sim_jobs, sim_full);
    if (fit->parsed())
      return run_fit(fit_data, fit_label, fit_family, fit_sigma, fit_estimator,
                     fit_epsilon, fit_delta, fit_sparsity, fit_iterations,
                     fit_step, fit_truncation, fit_sigma_x, fit_seed, fit_out);
    if (attack->parsed())
      return run_attack(atk_family, atk_n, atk_d, atk_trials, atk_estimator,
                        atk_epsilon, atk_delta, atk_iterations, atk_step,
                        atk_seed, atk_out);
  } catch (const privglm::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const privglm::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const privglm::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const privglm::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
