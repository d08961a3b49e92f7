#include "flowdirect/persistence.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace flowdirect {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormatTag = "flowdirect-dataset";
constexpr const char* kVersion = "v1";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_datasets(const std::vector<Dataset>& sets, const std::string& path,
                   const std::string& reward_description) {
  if (sets.empty()) throw std::invalid_argument("save_datasets: empty collection");
  std::size_t dim = 0;
  for (const Dataset& ds : sets) {
    if (ds.empty()) continue;
    if (dim == 0) dim = ds.dim();
    if (ds.dim() != dim) {
      throw std::invalid_argument("save_datasets: datasets disagree on dimension");
    }
  }
  if (dim == 0) throw std::invalid_argument("save_datasets: no samples to save");

  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("save_datasets: cannot open " + tmp.string());
    out << kFormatTag << " " << kVersion << " dim=" << dim << " reward=\"" << reward_description
        << "\"\n";
    for (const Dataset& ds : sets) {
      for (const LabeledSample& s : ds.samples()) {
        out << s.iteration << " " << format_double(s.reward);
        for (double c : s.x1) out << " " << format_double(c);
        out << "\n";
      }
    }
    out.flush();
    if (!out) {
      fs::remove(tmp);
      throw std::runtime_error("save_datasets: write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

namespace {

struct Header {
  std::size_t dim = 0;
  std::string reward;
};

Header parse_header(const std::string& line, const std::string& path) {
  std::istringstream ss(line);
  std::string tag, version;
  ss >> tag >> version;
  if (tag != kFormatTag) {
    throw std::runtime_error("load_datasets: " + path + ":1: not a dataset file");
  }
  if (version != kVersion) {
    throw std::runtime_error("load_datasets: " + path + ":1: unsupported version '" + version +
                             "'");
  }
  std::string field;
  Header h;
  bool have_dim = false;
  if (ss >> field && field.rfind("dim=", 0) == 0) {
    h.dim = std::stoul(field.substr(4));
    have_dim = true;
  }
  if (!have_dim || h.dim == 0) {
    throw std::runtime_error("load_datasets: " + path + ":1: missing dim field");
  }
  const std::size_t q1 = line.find('"');
  const std::size_t q2 = line.rfind('"');
  if (q1 == std::string::npos || q2 <= q1) {
    throw std::runtime_error("load_datasets: " + path + ":1: missing reward description");
  }
  h.reward = line.substr(q1 + 1, q2 - q1 - 1);
  return h;
}

}  // namespace

std::vector<Dataset> load_datasets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_datasets: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_datasets: " + path + ": empty file");
  const Header header = parse_header(line, path);

  std::map<int, std::vector<LabeledSample>> groups;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    LabeledSample s;
    if (!(ss >> s.iteration >> s.reward)) {
      throw std::runtime_error("load_datasets: " + path + ":" + std::to_string(line_no) +
                               ": malformed record");
    }
    s.x1.resize(header.dim);
    for (std::size_t i = 0; i < header.dim; ++i) {
      if (!(ss >> s.x1[i])) {
        throw std::runtime_error("load_datasets: " + path + ":" + std::to_string(line_no) +
                                 ": expected " + std::to_string(header.dim) + " coordinates");
      }
    }
    double extra = 0.0;
    if (ss >> extra) {
      throw std::runtime_error("load_datasets: " + path + ":" + std::to_string(line_no) +
                               ": too many fields");
    }
    if (!std::isfinite(s.reward) || !all_finite(s.x1)) {
      throw std::runtime_error("load_datasets: " + path + ":" + std::to_string(line_no) +
                               ": non-finite value");
    }
    if (s.iteration < 0) {
      throw std::runtime_error("load_datasets: " + path + ":" + std::to_string(line_no) +
                               ": negative iteration");
    }
    groups[s.iteration].push_back(std::move(s));
  }
  if (groups.empty()) {
    throw std::runtime_error("load_datasets: " + path + ": no samples");
  }
  std::vector<Dataset> out;
  out.reserve(groups.size());
  for (auto& [iter, samples] : groups) out.push_back(Dataset(std::move(samples)));
  return out;
}

std::string dataset_file_reward_description(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset_file_reward_description: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("dataset_file_reward_description: " + path + ": empty file");
  }
  return parse_header(line, path).reward;
}

}  // namespace flowdirect
