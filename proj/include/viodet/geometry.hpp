#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace viodet {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// World-from-camera rigid transform. `translation` is the camera origin
/// expressed in world coordinates. The camera looks along +z, image x points
/// right and image y points down.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 to_world(const Vec3& p_camera) const { return rotation * p_camera + translation; }
  Vec3 to_camera(const Vec3& p_world) const {
    return rotation.conjugate() * (p_world - translation);
  }
  const Vec3& camera_position() const { return translation; }
};

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;  // focal lengths, pixels
  double cx = 0.0, cy = 0.0;  // principal point, pixels
  int width = 0, height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && cx > 0.0 && cx < width && cy > 0.0 && cy < height;
  }
};

/// Axis-aligned box in pixels; image origin top-left, x right, y down.
struct BBox {
  double x = 0.0, y = 0.0;  // top-left corner
  double w = 0.0, h = 0.0;

  double area() const { return w * h; }
  double x2() const { return x + w; }
  double y2() const { return y + h; }
};

struct Detection {
  int label = -1;
  double prob = 0.0;  // detector probability, (0, 1]
  BBox bbox;
};

enum class DetectionFrame { Original, Corrected };

/// Labeled reference box. Always stored in the original image frame.
struct GroundTruthBox {
  int label = -1;
  BBox bbox;
};

struct CameraFrame {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;  // seconds
  CameraIntrinsics intrinsics;
  Pose pose;
  Vec3 gravity = Vec3(0.0, 1.0, 0.0);  // unit, camera coordinates
  std::vector<Vec3> points;            // sparse world points, meters
  std::vector<Detection> detections;
  DetectionFrame detection_frame = DetectionFrame::Original;
  std::vector<GroundTruthBox> ground_truth;  // optional
};

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

struct OrientationCorrection {
  double roll = 0.0;  // radians, (-pi, pi]
  bool degenerate = false;
};

enum class RollDirection { ToCorrected, ToOriginal };

/// Thrown by transform_bbox when the transformed box no longer intersects the
/// image bounds.
class EmptyBoxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double projection_z_near = 0.05;        // meters
inline constexpr double degenerate_gravity_norm = 0.1;   // in-plane fraction

/// Pinhole projection of a world point. Returns nullopt when the point lies
/// at or behind the z_near plane; points projecting outside the image bounds
/// are still returned (callers clip).
std::optional<ImagePoint> project_point(const Vec3& p_world, const Pose& pose,
                                        const CameraIntrinsics& intr);

/// In-plane camera roll from the gravity direction in camera coordinates.
/// roll = atan2(g_x, g_y); rotating image content by -roll about the
/// principal point makes gravity point along +y (image down). When the
/// in-plane gravity component is below `degenerate_gravity_norm` the result
/// is flagged degenerate and the caller substitutes the previous frame's
/// roll (0 on the first frame).
OrientationCorrection roll_from_gravity(const Vec3& gravity);

/// Rotates an image point about the principal point. ToCorrected applies the
/// original->corrected rotation for the given roll, ToOriginal its inverse.
ImagePoint rotate_image_point(const ImagePoint& p, double roll, const CameraIntrinsics& intr,
                              RollDirection direction);

/// Rotates the four corners of `bbox` about the principal point by the roll
/// (sign per `direction`) and returns the axis-aligned hull of the rotated
/// corners. Round trips grow the box (hull of a hull); with roll = 0 this is
/// the exact identity.
BBox transform_bbox(const BBox& bbox, double roll, const CameraIntrinsics& intr,
                    RollDirection direction);

/// arccos of the clamped dot product, in degrees in [0, 180]. Inputs must be
/// unit vectors.
double angular_difference_deg(const Vec3& a, const Vec3& b);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace viodet
