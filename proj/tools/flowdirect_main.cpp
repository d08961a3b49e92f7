#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "flowdirect/persistence.hpp"

namespace fd = flowdirect;
namespace cli = flowdirect::cli;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string model;
  int steps = 50;
  double eta = 0.7;
  std::uint64_t seed = 0;
  std::string mode = "practical";
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool wants_model = true) {
  if (wants_model) {
    cmd->add_option("--model", f.model, "flow model spec: gauss:<means>:<sigma> | mixfile:<path>")
        ->required();
  }
  cmd->add_option("--T", f.steps, "sampler steps")->check(CLI::PositiveNumber);
  cmd->add_option("--eta", f.eta, "stochastic sampler noise level (0 = Euler ODE)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "base RNG seed");
  cmd->add_option("--mode", f.mode, "guidance mode: exact | practical");
  const char* env_out = std::getenv("FLOWDIRECT_OUT");
  if (env_out != nullptr) f.out = env_out;
  auto* out = cmd->add_option("--out", f.out, "output directory (env FLOWDIRECT_OUT)");
  if (env_out == nullptr) out->required();
}

fd::SamplerConfig sampler_from(const CommonFlags& f) {
  fd::SamplerConfig cfg;
  cfg.steps = f.steps;
  cfg.eta = f.eta;
  cfg.seed = f.seed;
  return cfg;
}

std::vector<std::pair<std::string, std::string>> common_settings(const CommonFlags& f) {
  return {{"model", f.model},        {"T", std::to_string(f.steps)},
          {"eta", std::to_string(f.eta)}, {"mode", f.mode},
          {"out", f.out}};
}

// Plain deterministic guided sampling used by reuse/compose/demo. Trajectory
// streams are derived exactly like the optimizer's, with iteration tag 0.
std::vector<fd::Point> sample_guided(const fd::FlowModel& model, const fd::GuidanceField* field,
                                     const fd::SamplerConfig& cfg, int count) {
  std::vector<fd::Point> out(count);
  for (int i = 0; i < count; ++i) {
    fd::RngStream init = fd::RngStream::derive(cfg.seed, 0x696e6974ull, 0, i);
    fd::RngStream noise = fd::RngStream::derive(cfg.seed, 0x7364656eull, 0, i);
    out[i] = fd::integrate(model, field, cfg, init.normal_point(model.dim()), noise,
                           static_cast<std::uint64_t>(i));
  }
  return out;
}

int cmd_optimize(const CommonFlags& f, const std::string& reward_spec, int L, int N, int threads) {
  const std::string started = cli::timestamp_now();
  fd::GaussianMixtureModel model(cli::parse_model_spec(f.model));
  std::unique_ptr<fd::RewardFn> reward = cli::parse_reward_spec(reward_spec);
  fd::CountingReward counting(*reward);

  fd::OptimizerConfig cfg;
  cfg.iterations = L;
  cfg.batch = N;
  cfg.sampler = sampler_from(f);
  cfg.mode = cli::parse_mode(f.mode);
  cfg.seed = f.seed;
  cfg.threads = threads;
  cfg.checkpoint_path = (fs::path(f.out) / "dataset.partial.txt").string();

  const fd::RunResult result = fd::run(model, counting, cfg, [](int l, double mean, double best) {
    std::printf("iter %d: mean_reward=%.6g best_reward=%.6g\n", l, mean, best);
  });

  const fs::path out(f.out);
  cli::write_metrics_csv((out / "metrics.csv").string(), result.state.metrics);
  cli::write_samples_csv((out / "samples.csv").string(), result.final_samples);
  fd::save_datasets(result.state.datasets, (out / "dataset.txt").string(),
                    reward->description());

  cli::ManifestInfo info;
  info.command = "optimize";
  info.settings = common_settings(f);
  info.settings.emplace_back("reward", reward_spec);
  info.settings.emplace_back("L", std::to_string(L));
  info.settings.emplace_back("N", std::to_string(N));
  info.settings.emplace_back("reward_evaluations", std::to_string(counting.count()));
  info.seed = f.seed;
  info.started_at = started;
  info.finished_at = cli::timestamp_now();
  info.artifacts = {"metrics.csv", "samples.csv", "dataset.txt"};
  cli::write_manifest((out / "manifest.json").string(), info);

  const fd::IterationMetrics& last = result.state.metrics.back();
  const fd::Moments m = fd::moment_stats(result.final_samples);
  std::printf("final: mean_reward=%.6g best_reward=%.6g evaluations=%lld\n", last.mean_reward,
              last.best_reward, static_cast<long long>(counting.count()));
  std::printf("final batch mean:");
  for (double c : m.mean) std::printf(" %.6g", c);
  std::printf("\n");
  return 0;
}

int cmd_reuse(const CommonFlags& f, const std::string& data_path, double alpha, int samples) {
  const std::string started = cli::timestamp_now();
  fd::GaussianMixtureModel model(cli::parse_model_spec(f.model));
  const fd::Dataset all = fd::merge_datasets(fd::load_datasets(data_path));

  // No reward evaluations may happen in a reuse run; the counter proves it.
  fd::LinearReward unused(fd::Point(model.dim(), 0.0));
  fd::CountingReward counting(unused);

  const fd::ReuseField field(all, alpha, cli::parse_mode(f.mode), f.seed, &model);
  const std::vector<fd::Point> out_samples =
      sample_guided(model, &field, sampler_from(f), samples);

  if (counting.count() != 0) {
    throw std::runtime_error("reuse: reward was evaluated " + std::to_string(counting.count()) +
                             " times; expected 0");
  }

  const fs::path out(f.out);
  cli::write_samples_csv((out / "samples.csv").string(), out_samples);
  cli::write_report_csv((out / "report.csv").string(), out_samples, nullptr, counting.count());

  cli::ManifestInfo info;
  info.command = "reuse";
  info.settings = common_settings(f);
  info.settings.emplace_back("data", data_path);
  info.settings.emplace_back("alpha", std::to_string(alpha));
  info.settings.emplace_back("samples", std::to_string(samples));
  info.settings.emplace_back("reward_evaluations", std::to_string(counting.count()));
  info.seed = f.seed;
  info.started_at = started;
  info.finished_at = cli::timestamp_now();
  info.artifacts = {"samples.csv", "report.csv"};
  cli::write_manifest((out / "manifest.json").string(), info);

  const fd::Moments m = fd::moment_stats(out_samples);
  std::printf("reuse: %d samples, 0 reward evaluations, mean:", samples);
  for (double c : m.mean) std::printf(" %.6g", c);
  std::printf("\n");
  return 0;
}

int cmd_compose(const CommonFlags& f, const std::vector<std::string>& data_paths,
                const std::string& alphas_csv, int sweep, int samples) {
  const std::string started = cli::timestamp_now();
  fd::GaussianMixtureModel model(cli::parse_model_spec(f.model));
  const fd::Mode mode = cli::parse_mode(f.mode);

  std::vector<fd::Dataset> all;
  for (const std::string& p : data_paths) all.push_back(fd::merge_datasets(fd::load_datasets(p)));
  for (const fd::Dataset& ds : all) {
    if (ds.dim() != all.front().dim()) {
      throw std::runtime_error("compose: datasets disagree on dimension");
    }
  }
  const std::vector<double> alphas = cli::parse_csv_numbers(alphas_csv);
  if (alphas.size() != all.size()) {
    throw std::runtime_error("compose: need one alpha per dataset");
  }

  // Weight settings: either the single given vector, or a sweep along
  // (1-s, s) * sum(alphas) for two datasets.
  std::vector<std::vector<double>> settings;
  if (sweep <= 1) {
    settings.push_back(alphas);
  } else {
    if (all.size() != 2) throw std::runtime_error("compose: --sweep requires exactly 2 datasets");
    const double total = alphas[0] + alphas[1];
    for (int i = 0; i < sweep; ++i) {
      const double s = static_cast<double>(i) / (sweep - 1);
      settings.push_back({(1.0 - s) * total, s * total});
    }
  }

  const fs::path out(f.out);
  std::vector<std::string> artifacts;
  std::ofstream settings_csv;
  fs::create_directories(out);
  settings_csv.open(out / "settings.csv", std::ios::trunc);
  settings_csv << "setting";
  for (std::size_t k = 0; k < all.size(); ++k) settings_csv << ",alpha_" << (k + 1);
  settings_csv << "\n";

  for (std::size_t si = 0; si < settings.size(); ++si) {
    std::vector<std::shared_ptr<const fd::GuidanceField>> children;
    for (std::size_t k = 0; k < all.size(); ++k) {
      children.push_back(std::make_shared<fd::ReuseField>(all[k], settings[si][k], mode,
                                                          fd::mix_seed(f.seed, k), &model));
    }
    const fd::CompositeField field(std::move(children));
    const std::vector<fd::Point> out_samples =
        sample_guided(model, &field, sampler_from(f), samples);
    const std::string name = "samples_" + std::to_string(si) + ".csv";
    cli::write_samples_csv((out / name).string(), out_samples);
    artifacts.push_back(name);
    settings_csv << si;
    for (double a : settings[si]) settings_csv << "," << a;
    settings_csv << "\n";
    const fd::Moments m = fd::moment_stats(out_samples);
    std::printf("setting %zu: mean:", si);
    for (double c : m.mean) std::printf(" %.6g", c);
    std::printf("\n");
  }
  artifacts.push_back("settings.csv");

  cli::ManifestInfo info;
  info.command = "compose";
  info.settings = common_settings(f);
  for (std::size_t k = 0; k < data_paths.size(); ++k) {
    info.settings.emplace_back("data_" + std::to_string(k + 1), data_paths[k]);
  }
  info.settings.emplace_back("alphas", alphas_csv);
  info.settings.emplace_back("sweep", std::to_string(sweep));
  info.settings.emplace_back("samples", std::to_string(samples));
  info.seed = f.seed;
  info.started_at = started;
  info.finished_at = cli::timestamp_now();
  info.artifacts = artifacts;
  cli::write_manifest((out / "manifest.json").string(), info);
  return 0;
}

int cmd_baseline(const CommonFlags& f, const std::string& baseline,
                 const std::string& reward_spec, std::int64_t budget, int particles,
                 int resample_times, double lambda, int top_k) {
  const std::string started = cli::timestamp_now();
  fd::GaussianMixtureModel model(cli::parse_model_spec(f.model));
  std::unique_ptr<fd::RewardFn> reward = cli::parse_reward_spec(reward_spec);
  fd::CountingReward counting(*reward);
  const fs::path out(f.out);

  std::vector<std::string> artifacts = {"curve.csv", "report.csv", "samples.csv"};
  if (baseline == "bestofn") {
    const fd::BestOfNResult r = fd::best_of_n(model, counting, budget, sampler_from(f), top_k);
    cli::write_curve_csv((out / "curve.csv").string(), r.curve);
    cli::write_samples_csv((out / "samples.csv").string(), r.top);
    cli::write_report_csv((out / "report.csv").string(), r.top, &r.top_rewards, counting.count());
    std::printf("bestofn: best_reward=%.6g evaluations=%lld\n", r.top_rewards.front(),
                static_cast<long long>(counting.count()));
  } else if (baseline == "fk") {
    fd::FkConfig fk;
    fk.particles = particles;
    fk.resample_times = resample_times;
    fk.lambda = lambda;
    const std::vector<fd::Point> particles_out = fd::fk_resample(model, counting, fk,
                                                                 sampler_from(f));
    const std::vector<double> rewards = counting.evaluate(particles_out);
    double best = rewards.front();
    for (double r : rewards) best = std::max(best, r);
    fd::RewardCurve curve = {{counting.count(), best}};
    cli::write_curve_csv((out / "curve.csv").string(), curve);
    cli::write_samples_csv((out / "samples.csv").string(), particles_out);
    cli::write_report_csv((out / "report.csv").string(), particles_out, &rewards,
                          counting.count());
    std::printf("fk: best_reward=%.6g evaluations=%lld\n", best,
                static_cast<long long>(counting.count()));
  } else {
    throw CLI::ValidationError("--baseline must be 'bestofn' or 'fk'");
  }

  cli::ManifestInfo info;
  info.command = "baseline";
  info.settings = common_settings(f);
  info.settings.emplace_back("baseline", baseline);
  info.settings.emplace_back("reward", reward_spec);
  info.settings.emplace_back("budget", std::to_string(budget));
  info.settings.emplace_back("K", std::to_string(particles));
  info.settings.emplace_back("R", std::to_string(resample_times));
  info.settings.emplace_back("lambda", std::to_string(lambda));
  info.settings.emplace_back("reward_evaluations", std::to_string(counting.count()));
  info.seed = f.seed;
  info.started_at = started;
  info.finished_at = cli::timestamp_now();
  info.artifacts = artifacts;
  cli::write_manifest((out / "manifest.json").string(), info);
  return 0;
}

int cmd_demo(const CommonFlags& f, const std::string& base_spec,
             const std::vector<std::string>& target_specs, int ndata, int samples) {
  const std::string started = cli::timestamp_now();
  const fd::GaussianMixture base_mixture = cli::parse_model_spec(base_spec);
  fd::GaussianMixtureModel model(base_mixture);
  const fd::Mode mode = cli::parse_mode(f.mode);
  const fs::path out(f.out);
  std::vector<std::string> artifacts;

  fd::RngStream base_rng = fd::RngStream::derive(f.seed, 0xda7aull, 0);
  const std::vector<fd::Point> base_points = base_mixture.sample(ndata, base_rng);
  const fd::Dataset base_data =
      fd::make_dataset(base_points, std::vector<double>(base_points.size(), 0.0), 0);
  cli::write_samples_csv((out / "base_data.csv").string(), base_points);
  artifacts.push_back("base_data.csv");

  std::vector<std::shared_ptr<const fd::GuidanceField>> fields;
  for (std::size_t k = 0; k < target_specs.size(); ++k) {
    const fd::GaussianMixture target_mixture = cli::parse_model_spec(target_specs[k]);
    if (target_mixture.dim() != base_mixture.dim()) {
      throw std::runtime_error("demo: target dimension does not match base");
    }
    fd::RngStream target_rng = fd::RngStream::derive(f.seed, 0xda7bull, k);
    const std::vector<fd::Point> target_points = target_mixture.sample(ndata, target_rng);
    const fd::Dataset target_data =
        fd::make_dataset(target_points, std::vector<double>(target_points.size(), 0.0), 0);
    cli::write_samples_csv((out / ("target_" + std::to_string(k) + "_data.csv")).string(),
                           target_points);
    artifacts.push_back("target_" + std::to_string(k) + "_data.csv");

    auto field = std::make_shared<fd::DataContrastField>(base_data, target_data, mode,
                                                         fd::mix_seed(f.seed, k), &model);
    const std::vector<fd::Point> guided = sample_guided(model, field.get(), sampler_from(f),
                                                        samples);
    cli::write_samples_csv((out / ("guided_" + std::to_string(k) + ".csv")).string(), guided);
    artifacts.push_back("guided_" + std::to_string(k) + ".csv");
    const fd::Moments m = fd::moment_stats(guided);
    std::printf("target %zu guided mean:", k);
    for (double c : m.mean) std::printf(" %.6g", c);
    std::printf("\n");
    fields.push_back(std::move(field));
  }

  if (fields.size() > 1) {
    const fd::CompositeField composite(fields);
    const std::vector<fd::Point> guided = sample_guided(model, &composite, sampler_from(f),
                                                        samples);
    cli::write_samples_csv((out / "guided_composite.csv").string(), guided);
    artifacts.push_back("guided_composite.csv");
    const fd::Moments m = fd::moment_stats(guided);
    std::printf("composite guided mean:");
    for (double c : m.mean) std::printf(" %.6g", c);
    std::printf("\n");
  }

  cli::ManifestInfo info;
  info.command = "demo";
  info.settings = common_settings(f);
  info.settings.emplace_back("base", base_spec);
  for (std::size_t k = 0; k < target_specs.size(); ++k) {
    info.settings.emplace_back("target_" + std::to_string(k + 1), target_specs[k]);
  }
  info.settings.emplace_back("ndata", std::to_string(ndata));
  info.settings.emplace_back("samples", std::to_string(samples));
  info.seed = f.seed;
  info.started_at = started;
  info.finished_at = cli::timestamp_now();
  info.artifacts = artifacts;
  cli::write_manifest((out / "manifest.json").string(), info);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowdirect: reward-guided flow sampling with persistent guidance fields"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonFlags opt_f, reuse_f, compose_f, base_f, demo_f;

  auto* optimize = app.add_subcommand("optimize", "iterative reward-guided optimization");
  std::string opt_reward;
  int opt_L = 10, opt_N = 16, opt_threads = 1;
  add_common(optimize, opt_f);
  optimize->add_option("--reward", opt_reward, "reward spec: linear:<a> | negsq:<t>:<s> | cmd:<c>")
      ->required();
  optimize->add_option("--L", opt_L, "optimization iterations")->check(CLI::PositiveNumber);
  optimize->add_option("--N", opt_N, "batch size per iteration")->check(CLI::PositiveNumber);
  optimize->add_option("--threads", opt_threads, "trajectory parallelism")
      ->check(CLI::PositiveNumber);

  auto* reuse = app.add_subcommand("reuse", "sample with a stored guidance dataset, no rewards");
  std::string reuse_data;
  double reuse_alpha = 1.0;
  int reuse_samples = 256;
  add_common(reuse, reuse_f);
  reuse->add_option("--data", reuse_data, "dataset file from an optimize run")->required();
  reuse->add_option("--alpha", reuse_alpha, "guidance strength")->check(CLI::NonNegativeNumber);
  reuse->add_option("--samples", reuse_samples, "sample count")->check(CLI::PositiveNumber);

  auto* compose = app.add_subcommand("compose", "combine stored guidance fields");
  std::vector<std::string> compose_data;
  std::string compose_alphas = "1";
  int compose_sweep = 0, compose_samples = 256;
  add_common(compose, compose_f);
  compose->add_option("--data", compose_data, "dataset files (repeat)")->required()
      ->expected(-1);
  compose->add_option("--alphas", compose_alphas, "comma-separated weights, one per dataset");
  compose->add_option("--sweep", compose_sweep, "emit this many settings along the weight path");
  compose->add_option("--samples", compose_samples, "sample count per setting")
      ->check(CLI::PositiveNumber);

  auto* baseline = app.add_subcommand("baseline", "budget-matched baselines");
  std::string base_name, base_reward;
  std::int64_t base_budget = 1600;
  int base_K = 16, base_R = 5, base_top = 16;
  double base_lambda = 1.0;
  add_common(baseline, base_f);
  baseline->add_option("--baseline", base_name, "bestofn | fk")->required();
  baseline->add_option("--reward", base_reward, "reward spec")->required();
  baseline->add_option("--budget", base_budget, "reward evaluation budget")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--K", base_K, "fk particle count")->check(CLI::PositiveNumber);
  baseline->add_option("--R", base_R, "fk resampling times")->check(CLI::PositiveNumber);
  baseline->add_option("--lambda", base_lambda, "fk selection strength");
  baseline->add_option("--top", base_top, "bestofn: top samples to keep")
      ->check(CLI::PositiveNumber);

  auto* demo = app.add_subcommand("demo", "steer a base mixture toward target mixtures");
  std::string demo_base;
  std::vector<std::string> demo_targets;
  int demo_ndata = 64, demo_samples = 256;
  add_common(demo, demo_f, /*wants_model=*/false);
  demo->add_option("--base", demo_base, "base mixture spec")->required();
  demo->add_option("--target", demo_targets, "target mixture spec (repeat)")->required()
      ->expected(-1);
  demo->add_option("--ndata", demo_ndata, "points per dataset")->check(CLI::PositiveNumber);
  demo->add_option("--samples", demo_samples, "guided sample count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt_f, opt_reward, opt_L, opt_N, opt_threads);
    if (reuse->parsed()) return cmd_reuse(reuse_f, reuse_data, reuse_alpha, reuse_samples);
    if (compose->parsed()) {
      return cmd_compose(compose_f, compose_data, compose_alphas, compose_sweep, compose_samples);
    }
    if (baseline->parsed()) {
      return cmd_baseline(base_f, base_name, base_reward, base_budget, base_K, base_R,
                          base_lambda, base_top);
    }
    if (demo->parsed()) return cmd_demo(demo_f, demo_base, demo_targets, demo_ndata, demo_samples);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
