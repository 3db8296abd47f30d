#pragma once

#include <string>
#include <vector>

#include "satbridge/oracle.hpp"

namespace satbridge {

// On-disk labeled dataset: one WCNF file per instance plus labels.jsonl
// ({"file", "labels" (0/1 string), "source", "proven"} per line).
void save_labeled(const std::string& dir, const std::vector<LabeledInstance>& instances);
std::vector<LabeledInstance> load_labeled(const std::string& dir, bool polarity_edges = true);

}  // namespace satbridge
