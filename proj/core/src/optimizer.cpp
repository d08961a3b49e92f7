#include "flowdirect/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "flowdirect/persistence.hpp"

namespace flowdirect {

namespace {

// Stream salts so the init, sampler-noise and kernel-noise streams never
// collide for the same (seed, iteration, trajectory).
constexpr std::uint64_t kInitSalt = 0x696e6974ull;       // "init"
constexpr std::uint64_t kSdeSalt = 0x7364656eull;        // "sden"
constexpr std::uint64_t kFieldSalt = 0x666c6473ull;      // "flds"

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Point> generate_batch(const FlowModel& model, const GuidanceField* field,
                                  const OptimizerConfig& cfg, int iteration) {
  std::vector<Point> batch(cfg.batch);
  parallel_for(cfg.batch, cfg.threads, [&](int i) {
    RngStream init = RngStream::derive(cfg.seed, kInitSalt, iteration, i);
    RngStream noise = RngStream::derive(cfg.seed, kSdeSalt, iteration, i);
    Point x0 = init.normal_point(model.dim());
    try {
      batch[i] = integrate(model, field, cfg.sampler, std::move(x0), noise,
                           static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      throw std::runtime_error("optimizer: iteration " + std::to_string(iteration) +
                               ", trajectory " + std::to_string(i) + ": " + e.what());
    }
  });
  return batch;
}

IterationMetrics summarize(int iteration, std::int64_t evaluations,
                           const std::vector<Point>& batch, const std::vector<double>& rewards) {
  IterationMetrics m;
  m.iteration = iteration;
  m.evaluations = evaluations;
  m.best_reward = *std::max_element(rewards.begin(), rewards.end());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  m.mean_reward = sum / static_cast<double>(rewards.size());
  m.mean_coords.assign(batch.front().size(), 0.0);
  for (const Point& x : batch) axpy(1.0 / static_cast<double>(batch.size()), x, m.mean_coords);
  return m;
}

}  // namespace

std::shared_ptr<const GuidanceField> accumulated_field(const std::vector<Dataset>& datasets,
                                                       Mode mode, std::uint64_t seed,
                                                       const FlowModel& model) {
  if (datasets.empty()) return std::make_shared<ZeroField>(model.dim());
  const std::vector<Dataset> standardized = standardize_rewards(datasets);
  std::vector<std::shared_ptr<const GuidanceField>> children;
  children.reserve(standardized.size());
  for (std::size_t j = 0; j < standardized.size(); ++j) {
    children.push_back(std::make_shared<RewardTiltField>(standardized[j], mode,
                                                         mix_seed(seed, j), &model));
  }
  return std::make_shared<CompositeField>(std::move(children));
}

RunResult run(const FlowModel& model, RewardFn& reward, const OptimizerConfig& cfg,
              const ProgressFn& progress) {
  if (cfg.iterations < 1) throw std::invalid_argument("optimizer: iterations must be >= 1");
  if (cfg.batch < 1) throw std::invalid_argument("optimizer: batch must be >= 1");

  RunResult result;
  std::int64_t evaluations = 0;
  for (int l = 0; l < cfg.iterations; ++l) {
    const auto field = accumulated_field(result.state.datasets, cfg.mode,
                                         mix_seed(cfg.seed, mix_seed(kFieldSalt, l)), model);
    const std::vector<Point> batch = generate_batch(model, field.get(), cfg, l);

    std::vector<double> rewards;
    try {
      rewards = reward.evaluate(batch);
    } catch (const std::exception& e) {
      if (!cfg.checkpoint_path.empty() && !result.state.datasets.empty()) {
        save_datasets(result.state.datasets, cfg.checkpoint_path, reward.description());
      }
      throw std::runtime_error("optimizer: reward evaluation failed at iteration " +
                               std::to_string(l) + ": " + e.what());
    }
    if (rewards.size() != batch.size()) {
      throw std::runtime_error("optimizer: reward returned wrong batch size");
    }
    evaluations += static_cast<std::int64_t>(batch.size());

    result.state.datasets.push_back(make_dataset(batch, rewards, l));
    const IterationMetrics m = summarize(l, evaluations, batch, rewards);
    result.state.metrics.push_back(m);
    if (progress) progress(l, m.mean_reward, m.best_reward);
  }

  // Final target batch under the full telescoping field; costs no evaluations.
  const auto field = accumulated_field(result.state.datasets, cfg.mode,
                                       mix_seed(cfg.seed, mix_seed(kFieldSalt, cfg.iterations)),
                                       model);
  result.final_samples = generate_batch(model, field.get(), cfg, cfg.iterations);
  return result;
}

}  // namespace flowdirect
