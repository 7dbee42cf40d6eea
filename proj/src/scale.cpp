#include "viodet/scale.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace viodet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_bound(const std::string& field, int line_no, const std::string& source) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != field.size() || !std::isfinite(value)) {
    throw ScaleDbError(source + ":" + std::to_string(line_no) + ": bad numeric field '" + field +
                       "'");
  }
  return value;
}

double median_of(std::vector<double>& values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (n % 2 == 0) {
    const auto lower = std::max_element(values.begin(), values.begin() + mid);
    m = (m + *lower) / 2.0;
  }
  return m;
}

}  // namespace

ScaleDatabase ScaleDatabase::load_csv(std::istream& in, const std::string& source_name) {
  ScaleDatabase db;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(content);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(trim(field));
    }
    if (!saw_header) {
      if (fields != std::vector<std::string>{"category", "min_w", "max_w", "min_h", "max_h"}) {
        throw ScaleDbError(source_name + ":" + std::to_string(line_no) +
                           ": expected header 'category,min_w,max_w,min_h,max_h'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 5 || fields[0].empty()) {
      throw ScaleDbError(source_name + ":" + std::to_string(line_no) + ": malformed row '" +
                         content + "'");
    }
    ScaleEntry entry;
    entry.category = fields[0];
    entry.min_w = parse_bound(fields[1], line_no, source_name);
    entry.max_w = parse_bound(fields[2], line_no, source_name);
    entry.min_h = parse_bound(fields[3], line_no, source_name);
    entry.max_h = parse_bound(fields[4], line_no, source_name);
    if (entry.min_w <= 0.0 || entry.min_h <= 0.0 || entry.min_w > entry.max_w ||
        entry.min_h > entry.max_h) {
      throw ScaleDbError(source_name + ":" + std::to_string(line_no) + ": row '" + entry.category +
                         "' violates 0 < min <= max");
    }
    if (!db.rows_.emplace(entry.category, entry).second) {
      throw ScaleDbError(source_name + ":" + std::to_string(line_no) + ": duplicate category '" +
                         entry.category + "'");
    }
  }
  if (!saw_header) {
    throw ScaleDbError(source_name + ": empty scale database");
  }
  return db;
}

ScaleDatabase ScaleDatabase::load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScaleDbError("cannot open scale database '" + path + "'");
  }
  return load_csv(in, path);
}

void ScaleDatabase::bind_categories(const std::map<int, std::string>& id_to_name) {
  std::map<int, const ScaleEntry*> by_label;
  for (const auto& [id, name] : id_to_name) {
    const auto it = rows_.find(name);
    if (it == rows_.end()) {
      throw ScaleDbError("scale database has no row for category '" + name + "' (label " +
                         std::to_string(id) + ")");
    }
    by_label[id] = &it->second;
  }
  bound_ = id_to_name;
  by_label_ = std::move(by_label);
}

const ScaleEntry& ScaleDatabase::entry(int label) const {
  const auto it = by_label_.find(label);
  if (it == by_label_.end()) {
    throw UnknownCategoryError("unknown category label " + std::to_string(label));
  }
  return *it->second;
}

const ScaleEntry* ScaleDatabase::find_by_name(const std::string& category) const {
  const auto it = rows_.find(category);
  return it == rows_.end() ? nullptr : &it->second;
}

double ScaleDatabase::max_fuse_radius() const {
  double radius = 0.0;
  for (const auto& [name, entry] : rows_) {
    radius = std::max(radius, entry.fuse_radius());
  }
  return radius;
}

std::optional<ScaleEstimate> estimate_object_scale(const Detection& det, const CameraFrame& frame,
                                                   double bbox_frame_roll) {
  return estimate_object_scale(det.bbox, frame.points, frame.pose, frame.intrinsics,
                               bbox_frame_roll);
}

std::optional<ScaleEstimate> estimate_object_scale(const BBox& bbox,
                                                   const std::vector<Vec3>& world_points,
                                                   const Pose& pose, const CameraIntrinsics& intr,
                                                   double bbox_frame_roll) {
  std::vector<double> xs, ys, zs;
  for (const Vec3& p : world_points) {
    const auto projected = project_point(p, pose, intr);
    if (!projected) {
      continue;
    }
    ImagePoint ip = *projected;
    if (bbox_frame_roll != 0.0) {
      ip = rotate_image_point(ip, bbox_frame_roll, intr, RollDirection::ToCorrected);
    }
    if (ip.u > bbox.x && ip.u < bbox.x2() && ip.v > bbox.y && ip.v < bbox.y2()) {
      xs.push_back(p.x());
      ys.push_back(p.y());
      zs.push_back(p.z());
    }
  }
  if (xs.size() < static_cast<std::size_t>(min_points_for_estimate)) {
    return std::nullopt;
  }
  ScaleEstimate est;
  est.loc = Vec3(median_of(xs), median_of(ys), median_of(zs));
  est.n_points = static_cast<int>(xs.size());
  est.distance_m = std::clamp((pose.camera_position() - est.loc).norm(), min_estimate_distance,
                              max_estimate_distance);
  est.width_m = bbox.w / intr.fx * est.distance_m;
  est.height_m = bbox.h / intr.fy * est.distance_m;
  return est;
}

bool scale_within_bounds(const ScaleEstimate& est, const ScaleEntry& entry) {
  return entry.min_w <= est.width_m && est.width_m <= entry.max_w && entry.min_h <= est.height_m &&
         est.height_m <= entry.max_h;
}

double scale_filter_prob(const std::optional<ScaleEstimate>& est, int label,
                         const ScaleDatabase& db) {
  const ScaleEntry& entry = db.entry(label);
  if (!est) {
    return 1.0;
  }
  return scale_within_bounds(*est, entry) ? 1.0 : 0.5;
}

int scale_bucket(double distance_m) {
  return static_cast<int>(std::lround(std::log2(distance_m)));
}

}  // namespace viodet
