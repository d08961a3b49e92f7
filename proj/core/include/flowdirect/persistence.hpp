#pragma once

#include <string>
#include <vector>

#include "flowdirect/dataset.hpp"

namespace flowdirect {

// Writes the labeled datasets as a line-delimited text file:
//   flowdirect-dataset v1 dim=<D> reward="<desc>"
//   <iter> <r> <x_1> ... <x_D>
// Numbers carry 17 significant digits so doubles round-trip exactly. The file
// is written to a temporary sibling and atomically renamed into place.
void save_datasets(const std::vector<Dataset>& sets, const std::string& path,
                   const std::string& reward_description);

// Loads a dataset file and regroups the samples by iteration index, ascending.
// Normalization statistics are never stored; callers recompute them. Throws
// std::runtime_error with the offending line number on malformed input.
std::vector<Dataset> load_datasets(const std::string& path);

// Reward description recorded in the header of a dataset file.
std::string dataset_file_reward_description(const std::string& path);

}  // namespace flowdirect
