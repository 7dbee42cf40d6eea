#include "viodet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace viodet {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::optional<ImagePoint> project_point(const Vec3& p_world, const Pose& pose,
                                        const CameraIntrinsics& intr) {
  const Vec3 pc = pose.to_camera(p_world);
  if (pc.z() <= projection_z_near) {
    return std::nullopt;
  }
  return ImagePoint{intr.fx * pc.x() / pc.z() + intr.cx, intr.fy * pc.y() / pc.z() + intr.cy};
}

OrientationCorrection roll_from_gravity(const Vec3& gravity) {
  const double norm = gravity.norm();
  if (std::abs(norm - 1.0) > 1e-3) {
    throw std::invalid_argument("roll_from_gravity: gravity must be unit-norm, got |g|=" +
                                std::to_string(norm));
  }
  const double in_plane = std::hypot(gravity.x(), gravity.y());
  if (in_plane < degenerate_gravity_norm) {
    return OrientationCorrection{0.0, true};
  }
  double roll = std::atan2(gravity.x(), gravity.y());
  if (roll <= -std::numbers::pi) {
    roll = std::numbers::pi;
  }
  return OrientationCorrection{roll, false};
}

ImagePoint rotate_image_point(const ImagePoint& p, double roll, const CameraIntrinsics& intr,
                              RollDirection direction) {
  const double angle = direction == RollDirection::ToCorrected ? roll : -roll;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double dx = p.u - intr.cx;
  const double dy = p.v - intr.cy;
  return ImagePoint{intr.cx + c * dx - s * dy, intr.cy + s * dx + c * dy};
}

BBox transform_bbox(const BBox& bbox, double roll, const CameraIntrinsics& intr,
                    RollDirection direction) {
  const ImagePoint corners[4] = {
      {bbox.x, bbox.y}, {bbox.x2(), bbox.y}, {bbox.x, bbox.y2()}, {bbox.x2(), bbox.y2()}};
  double min_u = std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  double max_u = -std::numeric_limits<double>::infinity();
  double max_v = -std::numeric_limits<double>::infinity();
  for (const ImagePoint& corner : corners) {
    const ImagePoint r = rotate_image_point(corner, roll, intr, direction);
    min_u = std::min(min_u, r.u);
    min_v = std::min(min_v, r.v);
    max_u = std::max(max_u, r.u);
    max_v = std::max(max_v, r.v);
  }
  const BBox out{min_u, min_v, max_u - min_u, max_v - min_v};
  const bool overlaps = out.x < intr.width && out.x2() > 0.0 && out.y < intr.height &&
                        out.y2() > 0.0;
  if (!overlaps) {
    throw EmptyBoxError("transform_bbox: transformed box lies fully outside the image");
  }
  return out;
}

double angular_difference_deg(const Vec3& a, const Vec3& b) {
  const double dot = std::clamp(a.dot(b), -1.0, 1.0);
  return rad_to_deg(std::acos(dot));
}

}  // namespace viodet
