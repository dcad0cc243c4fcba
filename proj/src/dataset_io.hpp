#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace uwbnov {

// On-disk range log. Line-oriented structured text:
//   #%uwbnov-dataset 1
//   #%meta {...}            one-line JSON provenance blob, layout included
//   #%columns t,r0,...,truth_x,truth_y
//   <one record per line, 9 decimal places, "nan" for a missing reading>
// The meta blob always carries the layout (anchors + tag height) and its
// fingerprint; truth columns are present only when every record has truth.
struct DatasetFile {
  int format_version = 1;
  nlohmann::json meta;
  AnchorLayout layout;
  std::vector<RangeSample> samples;
  bool has_truth = false;
};

nlohmann::json layout_to_json(const AnchorLayout& layout);
AnchorLayout layout_from_json(const nlohmann::json& j);

void save_dataset(const DatasetFile& file, const std::string& path);
DatasetFile load_dataset(const std::string& path);

}  // namespace uwbnov
