#pragma once

#include "viodet/geometry.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace viodet {

/// Per-category real-world extent bounds, meters. Horizontal bounds cover
/// the full range of 2D widths an object can present from any viewpoint.
struct ScaleEntry {
  std::string category;
  double min_w = 0.0, max_w = 0.0;
  double min_h = 0.0, max_h = 0.0;

  double fuse_radius() const { return std::max(max_w, max_h); }
  double create_radius() const { return std::min(min_w, min_h); }
};

class ScaleDbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownCategoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Category scale bounds loaded from CSV (`category,min_w,max_w,min_h,max_h`,
/// meters). Rows are keyed by category name; numeric label ids become usable
/// after bind_categories() joins them against a session's id->name
/// dictionary. Immutable once bound.
class ScaleDatabase {
 public:
  static ScaleDatabase load_csv(std::istream& in, const std::string& source_name = "<stream>");
  static ScaleDatabase load_csv_file(const std::string& path);

  /// Joins label ids to rows. Every dictionary category must have a row;
  /// a missing row throws ScaleDbError naming the category.
  void bind_categories(const std::map<int, std::string>& id_to_name);

  bool has_category(int label) const { return by_label_.count(label) > 0; }
  const ScaleEntry& entry(int label) const;
  const ScaleEntry* find_by_name(const std::string& category) const;

  double fuse_radius(int label) const { return entry(label).fuse_radius(); }
  double create_radius(int label) const { return entry(label).create_radius(); }

  /// Largest fuse radius over all rows; used as the map grid cell size.
  double max_fuse_radius() const;

  const std::map<std::string, ScaleEntry>& rows() const { return rows_; }
  const std::map<int, std::string>& bound_categories() const { return bound_; }

 private:
  std::map<std::string, ScaleEntry> rows_;
  std::map<int, std::string> bound_;
  std::map<int, const ScaleEntry*> by_label_;
};

struct ScaleEstimate {
  double width_m = 0.0;     // estimated horizontal extent
  double height_m = 0.0;    // estimated vertical extent
  double distance_m = 0.0;  // camera-to-median distance, clamped
  Vec3 loc = Vec3::Zero();  // coordinate-wise median of in-box points, world
  int n_points = 0;
};

inline constexpr int min_points_for_estimate = 3;
inline constexpr double min_estimate_distance = 0.1;   // meters
inline constexpr double max_estimate_distance = 50.0;  // meters

/// Projects the frame's sparse points, keeps those strictly inside the
/// detection box, and derives real-world extents from the box size and the
/// camera distance to the coordinate-wise median of the kept points.
/// `bbox_frame_roll` is the original->corrected roll of the frame the box
/// lives in (0 when the box is in the original image frame); projections are
/// rotated into that frame before the inside test. Returns nullopt when
/// fewer than `min_points_for_estimate` points fall inside the box.
std::optional<ScaleEstimate> estimate_object_scale(const Detection& det, const CameraFrame& frame,
                                                   double bbox_frame_roll = 0.0);

/// Same estimate over an explicit point set (used by the simulator when
/// frames are still under construction).
std::optional<ScaleEstimate> estimate_object_scale(const BBox& bbox,
                                                   const std::vector<Vec3>& world_points,
                                                   const Pose& pose, const CameraIntrinsics& intr,
                                                   double bbox_frame_roll = 0.0);

/// 1 when both estimated extents fall inside the category bounds (inclusive),
/// 0.5 otherwise. A missing estimate is neutral (1).
double scale_filter_prob(const std::optional<ScaleEstimate>& est, int label,
                         const ScaleDatabase& db);

/// Checks an estimate directly against a row's bounds.
bool scale_within_bounds(const ScaleEstimate& est, const ScaleEntry& entry);

/// Distance bucket: round(log2(d)), halves away from zero.
int scale_bucket(double distance_m);

}  // namespace viodet
