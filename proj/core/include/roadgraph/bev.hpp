#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "roadgraph/dataset.hpp"

namespace roadgraph {

using Homography = std::array<double, 9>;  // row-major, h33 = 1

struct PixelPoint {
  double u = 0, v = 0;
};

// Ego-relative ground position in feet: x lateral (+right), y longitudinal
// (+ahead).
struct GroundPoint {
  double x = 0, y = 0;
};

// Solves the 8-unknown direct linear system so that each image point maps
// onto its ground point. Throws DegenerateCalibration on a singular system
// or when three image points are collinear.
Homography fit_homography(const std::array<PixelPoint, 4>& image_points,
                          const std::array<GroundPoint, 4>& ground_points);

GroundPoint apply_homography(const Homography& h, PixelPoint p);
Homography invert_homography(const Homography& h);

// Inverse-perspective calibration. Image points are ordered near-left,
// near-right, far-right, far-left. The homography maps them onto the BEV
// rectangle corners (0, L), (W, L), (W, 0), (0, 0), i.e. BEV y grows toward
// the camera like image rows do. The ego sits on the near edge at the BEV
// column of `ego_anchor_px`.
class BevCalibration {
 public:
  BevCalibration(const std::array<PixelPoint, 4>& image_points, double width_ft,
                 double length_ft, double ego_anchor_px);
  // Anchor defaults to the midpoint of the near edge.
  BevCalibration(const std::array<PixelPoint, 4>& image_points, double width_ft,
                 double length_ft);

  static BevCalibration load(const std::filesystem::path& path);

  const Homography& homography() const { return h_; }
  const std::array<PixelPoint, 4>& image_points() const { return image_points_; }
  double width_ft() const { return width_; }
  double length_ft() const { return length_; }
  double ego_anchor_px() const { return anchor_px_; }
  double ego_anchor_bev_x() const { return anchor_bev_x_; }

  bool contains(PixelPoint p) const;
  // BEV coordinates to ego-relative ground coordinates, and back.
  GroundPoint to_ground(GroundPoint bev) const;
  PixelPoint to_pixel(GroundPoint ground) const;

 private:
  std::array<PixelPoint, 4> image_points_;
  double width_;
  double length_;
  double anchor_px_;
  Homography h_;
  Homography h_inv_;
  double anchor_bev_x_ = 0;
};

struct ProjectedDetection {
  GroundPoint ground;
  bool outside_region = false;
};

// Projects the bottom-center pixel of the box. Throws OutOfCalibratedRegion
// for contact points outside the calibrated quadrilateral unless `force`.
ProjectedDetection project_detection(const Detection& det, const BevCalibration& cal,
                                     bool force = false);

}  // namespace roadgraph
