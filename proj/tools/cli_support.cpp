#include "cli_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace flowdirect::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::vector<double> parse_csv_numbers(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty number in list: '" + csv + "'");
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("malformed number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

GaussianMixture parse_model_spec(const std::string& spec) {
  if (spec.rfind("gauss:", 0) == 0) {
    const std::string rest = spec.substr(6);
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("model spec 'gauss:<means>:<sigma>' expected, got '" + spec +
                                  "'");
    }
    Point mean = parse_csv_numbers(rest.substr(0, colon));
    const double sigma = std::stod(rest.substr(colon + 1));
    return GaussianMixture::single(std::move(mean), sigma);
  }
  if (spec.rfind("mixfile:", 0) == 0) {
    return load_mixture(spec.substr(8));
  }
  throw std::invalid_argument("unknown model spec '" + spec +
                              "' (expected gauss:<means>:<sigma> or mixfile:<path>)");
}

std::unique_ptr<RewardFn> parse_reward_spec(const std::string& spec) {
  if (spec.rfind("linear:", 0) == 0) {
    return std::make_unique<LinearReward>(parse_csv_numbers(spec.substr(7)));
  }
  if (spec.rfind("negsq:", 0) == 0) {
    const std::string rest = spec.substr(6);
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("reward spec 'negsq:<target>:<scale>' expected");
    }
    return std::make_unique<NegSquaredReward>(parse_csv_numbers(rest.substr(0, colon)),
                                              std::stod(rest.substr(colon + 1)));
  }
  if (spec.rfind("cmd:", 0) == 0) {
    return std::make_unique<CommandReward>(spec.substr(4));
  }
  throw std::invalid_argument("unknown reward spec '" + spec + "'");
}

Mode parse_mode(const std::string& mode) {
  if (mode == "exact") return Mode::exact;
  if (mode == "practical") return Mode::practical;
  throw std::invalid_argument("mode must be 'exact' or 'practical', got '" + mode + "'");
}

void write_samples_csv(const std::string& path, const std::vector<Point>& samples) {
  std::ofstream out = open_out(path);
  if (samples.empty()) throw std::invalid_argument("write_samples_csv: no samples");
  const std::size_t d = samples.front().size();
  for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << "x_" << (i + 1);
  out << "\n";
  for (const Point& x : samples) {
    for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << fmt(x[i]);
    out << "\n";
  }
}

void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& metrics) {
  std::ofstream out = open_out(path);
  if (metrics.empty()) throw std::invalid_argument("write_metrics_csv: no metrics");
  const std::size_t d = metrics.front().mean_coords.size();
  out << "iter,evals,mean_reward,best_reward";
  for (std::size_t i = 0; i < d; ++i) out << ",mean_coord_" << (i + 1);
  out << "\n";
  for (const IterationMetrics& m : metrics) {
    out << m.iteration << "," << m.evaluations << "," << fmt(m.mean_reward) << ","
        << fmt(m.best_reward);
    for (double c : m.mean_coords) out << "," << fmt(c);
    out << "\n";
  }
}

void write_curve_csv(const std::string& path, const RewardCurve& curve) {
  std::ofstream out = open_out(path);
  out << "evals,best_reward\n";
  for (const auto& [evals, best] : curve) out << evals << "," << fmt(best) << "\n";
}

void write_report_csv(const std::string& path, const std::vector<Point>& samples,
                      const std::vector<double>* rewards, std::int64_t evaluations) {
  const Moments m = moment_stats(samples);
  std::ofstream out = open_out(path);
  const std::size_t d = m.mean.size();
  out << "count,evals";
  for (std::size_t i = 0; i < d; ++i) out << ",mean_" << (i + 1);
  for (std::size_t i = 0; i < d; ++i) out << ",var_" << (i + 1);
  if (rewards != nullptr) out << ",mean_reward,best_reward";
  out << "\n";
  out << m.count << "," << evaluations;
  for (std::size_t i = 0; i < d; ++i) out << "," << fmt(m.mean[i]);
  for (std::size_t i = 0; i < d; ++i) out << "," << fmt(m.covariance[i * d + i]);
  if (rewards != nullptr) {
    double sum = 0.0, best = -std::numeric_limits<double>::infinity();
    for (double r : *rewards) {
      sum += r;
      best = std::max(best, r);
    }
    out << "," << fmt(sum / static_cast<double>(rewards->size())) << "," << fmt(best);
  }
  out << "\n";
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const ManifestInfo& info) {
  nlohmann::json j;
  j["tool"] = "flowdirect";
  j["version"] = "0.1.0";
  j["command"] = info.command;
  j["seed"] = info.seed;
  j["started_at"] = info.started_at;
  j["finished_at"] = info.finished_at;
  nlohmann::json settings = nlohmann::json::object();
  for (const auto& [k, v] : info.settings) settings[k] = v;
  j["settings"] = settings;
  j["artifacts"] = info.artifacts;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace flowdirect::cli
