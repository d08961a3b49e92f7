#include "flowdirect/rewards.hpp"

#include <unistd.h>

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flowdirect {

namespace fs = std::filesystem;

LinearReward::LinearReward(Point a) : a_(std::move(a)) {
  if (!all_finite(a_)) throw std::invalid_argument("LinearReward: non-finite direction");
}

std::vector<double> LinearReward::evaluate(const std::vector<Point>& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Point& x : batch) out.push_back(dot(a_, x));
  return out;
}

std::string LinearReward::description() const {
  std::ostringstream ss;
  ss << "linear:";
  for (std::size_t i = 0; i < a_.size(); ++i) ss << (i ? "," : "") << a_[i];
  return ss.str();
}

NegSquaredReward::NegSquaredReward(Point target, double scale)
    : target_(std::move(target)), scale_(scale) {
  if (!(scale_ > 0.0)) throw std::invalid_argument("NegSquaredReward: scale must be > 0");
  if (!all_finite(target_)) throw std::invalid_argument("NegSquaredReward: non-finite target");
}

std::vector<double> NegSquaredReward::evaluate(const std::vector<Point>& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Point& x : batch) out.push_back(-scale_ * squared_distance(x, target_));
  return out;
}

std::string NegSquaredReward::description() const {
  std::ostringstream ss;
  ss << "negsq:";
  for (std::size_t i = 0; i < target_.size(); ++i) ss << (i ? "," : "") << target_[i];
  ss << ":" << scale_;
  return ss.str();
}

CommandReward::CommandReward(std::string command, std::string scratch_root)
    : command_(std::move(command)), scratch_root_(std::move(scratch_root)) {
  if (command_.empty()) throw std::invalid_argument("CommandReward: empty command");
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::vector<double> CommandReward::evaluate(const std::vector<Point>& batch) {
  const fs::path root =
      scratch_root_.empty() ? fs::temp_directory_path() : fs::path(scratch_root_);
  char dirname[64];
  std::snprintf(dirname, sizeof(dirname), "flowdirect-reward-%d-%" PRIu64,
                static_cast<int>(::getpid()), call_count_++);
  const fs::path dir = root / dirname;
  fs::create_directories(dir);
  const fs::path batch_path = dir / "batch.txt";
  const fs::path rewards_path = dir / "rewards.txt";

  {
    std::ofstream out(batch_path);
    for (const Point& x : batch) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x[i]);
        out << (i ? " " : "") << buf;
      }
      out << "\n";
    }
    if (!out) throw std::runtime_error("CommandReward: failed to write " + batch_path.string());
  }

  std::string cmd = command_;
  replace_all(cmd, "{batch}", batch_path.string());
  replace_all(cmd, "{rewards}", rewards_path.string());
  const std::string shell = "cd '" + dir.string() + "' && (" + cmd + ")";
  const int rc = std::system(shell.c_str());
  if (rc != 0) {
    throw std::runtime_error("CommandReward: command failed with status " + std::to_string(rc) +
                             ": " + cmd);
  }

  std::ifstream in(rewards_path);
  if (!in) throw std::runtime_error("CommandReward: missing output file " + rewards_path.string());
  std::vector<double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v = 0.0;
    if (!(ss >> v) || !std::isfinite(v)) {
      throw std::runtime_error("CommandReward: malformed reward at " + rewards_path.string() +
                               ":" + std::to_string(line_no));
    }
    out.push_back(v);
  }
  if (out.size() != batch.size()) {
    throw std::runtime_error("CommandReward: expected " + std::to_string(batch.size()) +
                             " rewards, got " + std::to_string(out.size()));
  }
  fs::remove_all(dir);
  return out;
}

std::string CommandReward::description() const { return "cmd:" + command_; }

}  // namespace flowdirect
