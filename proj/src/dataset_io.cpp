#include "dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "errors.hpp"

namespace uwbnov {
namespace {

constexpr const char* kMagic = "#%uwbnov-dataset";

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

std::string expected_columns(std::size_t n_anchors, bool has_truth) {
  std::string cols = "t";
  for (std::size_t i = 0; i < n_anchors; ++i) cols += ",r" + std::to_string(i);
  if (has_truth) cols += ",truth_x,truth_y";
  return cols;
}

double parse_value(const std::string& tok, const char* what, std::size_t line_no) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw DataError(std::string("bad ") + what + " value '" + tok + "' on line " +
                    std::to_string(line_no));
  }
  return v;
}

}  // namespace

nlohmann::json layout_to_json(const AnchorLayout& layout) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const Anchor& a : layout.anchors()) {
    anchors.push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}, {"z", a.z}});
  }
  return {{"tag_height", layout.tag_height()}, {"anchors", anchors}};
}

AnchorLayout layout_from_json(const nlohmann::json& j) {
  try {
    std::vector<Anchor> anchors;
    for (const auto& a : j.at("anchors")) {
      anchors.push_back(Anchor{a.at("id").get<int>(), a.at("x").get<double>(),
                               a.at("y").get<double>(), a.at("z").get<double>()});
    }
    return AnchorLayout(anchors, j.at("tag_height").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed layout description: ") + e.what());
  }
}

void save_dataset(const DatasetFile& file, const std::string& path) {
  if (file.format_version != 1) {
    throw ConfigError("unsupported dataset format version " +
                      std::to_string(file.format_version));
  }
  const std::size_t n = file.layout.size();
  double prev_t = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < file.samples.size(); ++k) {
    const RangeSample& s = file.samples[k];
    if (s.ranges.size() != n) {
      throw DataError("sample " + std::to_string(k) + " width disagrees with the layout");
    }
    if (!(s.t >= prev_t)) {
      throw DataError("timestamps decrease at sample " + std::to_string(k));
    }
    prev_t = s.t;
    if (file.has_truth && !s.truth) {
      throw DataError("sample " + std::to_string(k) + " lacks truth in a truth-bearing file");
    }
  }

  nlohmann::json meta = file.meta;
  meta["layout"] = layout_to_json(file.layout);
  meta["layout_fingerprint"] = file.layout.fingerprint();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kMagic << " " << file.format_version << "\n";
  out << "#%meta " << meta.dump() << "\n";
  out << "#%columns " << expected_columns(n, file.has_truth) << "\n";
  for (const RangeSample& s : file.samples) {
    out << fmt9(s.t);
    for (double r : s.ranges) out << " " << fmt9(r);
    if (file.has_truth) out << " " << fmt9(s.truth->x) << " " << fmt9(s.truth->y);
    out << "\n";
  }
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

DatasetFile load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  DatasetFile file;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  {
    std::istringstream ss(line);
    std::string magic;
    int version = -1;
    ss >> magic >> version;
    if (magic != kMagic || ss.fail()) throw DataError(path + ": not a range dataset");
    if (version != 1) {
      throw DataError(path + ": unsupported format version " + std::to_string(version));
    }
    file.format_version = version;
  }

  if (!std::getline(in, line) || line.rfind("#%meta ", 0) != 0) {
    throw DataError(path + ": missing meta header");
  }
  ++line_no;
  try {
    file.meta = nlohmann::json::parse(line.substr(7));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad meta JSON: " + e.what());
  }
  if (!file.meta.contains("layout")) throw DataError(path + ": meta lacks the layout");
  file.layout = layout_from_json(file.meta["layout"]);
  if (file.meta.value("layout_fingerprint", file.layout.fingerprint()) !=
      file.layout.fingerprint()) {
    throw DataError(path + ": layout fingerprint does not match the stored layout");
  }

  if (!std::getline(in, line) || line.rfind("#%columns ", 0) != 0) {
    throw DataError(path + ": missing columns header");
  }
  ++line_no;
  const std::string cols = line.substr(10);
  const std::size_t n = file.layout.size();
  if (cols == expected_columns(n, true)) {
    file.has_truth = true;
  } else if (cols == expected_columns(n, false)) {
    file.has_truth = false;
  } else {
    throw DataError(path + ": column set '" + cols + "' does not match the layout");
  }

  const std::size_t tokens_expected = 1 + n + (file.has_truth ? 2 : 0);
  double prev_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ss >> tok) toks.push_back(tok);
    if (toks.size() != tokens_expected) {
      throw DataError(path + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(toks.size()) + " fields, expected " +
                      std::to_string(tokens_expected));
    }
    RangeSample s;
    s.t = parse_value(toks[0], "timestamp", line_no);
    if (std::isnan(s.t) || !(s.t >= prev_t)) {
      throw DataError(path + ": timestamps decrease on line " + std::to_string(line_no));
    }
    prev_t = s.t;
    s.ranges.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = parse_value(toks[1 + i], "range", line_no);
      if (!std::isnan(r) && !(r > 0.0)) {
        throw DataError(path + ": non-positive range on line " + std::to_string(line_no));
      }
      s.ranges[i] = r;
    }
    if (file.has_truth) {
      Pose2D truth;
      truth.x = parse_value(toks[1 + n], "truth", line_no);
      truth.y = parse_value(toks[2 + n], "truth", line_no);
      if (std::isnan(truth.x) || std::isnan(truth.y)) {
        throw DataError(path + ": non-finite truth on line " + std::to_string(line_no));
      }
      s.truth = truth;
    }
    file.samples.push_back(std::move(s));
  }
  return file;
}

}  // namespace uwbnov
