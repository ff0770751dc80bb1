#include "roadgraph/bev.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "json.hpp"
#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

double cross(PixelPoint o, PixelPoint a, PixelPoint b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

void check_not_collinear(const std::array<PixelPoint, 4>& pts) {
  double scale = 0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p.u), std::abs(p.v)});
  const double tol = 1e-12 * std::max(1.0, scale * scale);
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (int c = b + 1; c < 4; ++c) {
        if (std::abs(cross(pts[a], pts[b], pts[c])) <= tol) {
          raise(ErrorCode::kDegenerateCalibration, "three calibration points are collinear");
        }
      }
    }
  }
}

// Dense Gaussian elimination with partial pivoting on an n x n system.
template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N + 1>, N> m) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-12) {
      raise(ErrorCode::kDegenerateCalibration, "homography system is singular");
    }
    std::swap(m[col], m[pivot]);
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= N; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = 0; i < N; ++i) x[i] = m[i][N] / m[i][i];
  return x;
}

}  // namespace

Homography fit_homography(const std::array<PixelPoint, 4>& image_points,
                          const std::array<GroundPoint, 4>& ground_points) {
  check_not_collinear(image_points);
  std::array<std::array<double, 9>, 8> system{};
  for (int i = 0; i < 4; ++i) {
    const auto [u, v] = image_points[i];
    const auto [x, y] = ground_points[i];
    system[2 * i] = {u, v, 1, 0, 0, 0, -u * x, -v * x, x};
    system[2 * i + 1] = {0, 0, 0, u, v, 1, -u * y, -v * y, y};
  }
  const auto h = solve_dense<8>(system);
  return {h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};
}

GroundPoint apply_homography(const Homography& h, PixelPoint p) {
  const double w = h[6] * p.u + h[7] * p.v + h[8];
  return {(h[0] * p.u + h[1] * p.v + h[2]) / w, (h[3] * p.u + h[4] * p.v + h[5]) / w};
}

Homography invert_homography(const Homography& h) {
  const double a = h[0], b = h[1], c = h[2];
  const double d = h[3], e = h[4], f = h[5];
  const double g = h[6], k = h[7], l = h[8];
  const double det = a * (e * l - f * k) - b * (d * l - f * g) + c * (d * k - e * g);
  if (std::abs(det) < 1e-15) raise(ErrorCode::kDegenerateCalibration, "homography is not invertible");
  Homography inv = {(e * l - f * k), -(b * l - c * k), (b * f - c * e),
                    -(d * l - f * g), (a * l - c * g), -(a * f - c * d),
                    (d * k - e * g), -(a * k - b * g), (a * e - b * d)};
  const double norm = inv[8];
  for (auto& x : inv) x /= norm;
  return inv;
}

BevCalibration::BevCalibration(const std::array<PixelPoint, 4>& image_points, double width_ft,
                               double length_ft, double ego_anchor_px)
    : image_points_(image_points),
      width_(width_ft),
      length_(length_ft),
      anchor_px_(ego_anchor_px) {
  if (!(width_ft > 0) || !(length_ft > 0)) {
    raise(ErrorCode::kDegenerateCalibration, "ground rectangle must have positive size");
  }
  h_ = fit_homography(image_points, {GroundPoint{0, length_ft}, GroundPoint{width_ft, length_ft},
                                     GroundPoint{width_ft, 0}, GroundPoint{0, 0}});
  h_inv_ = invert_homography(h_);
  const auto& nl = image_points_[0];
  const auto& nr = image_points_[1];
  const double t = (anchor_px_ - nl.u) / (nr.u - nl.u);
  const PixelPoint on_edge{anchor_px_, nl.v + t * (nr.v - nl.v)};
  anchor_bev_x_ = apply_homography(h_, on_edge).x;
}

BevCalibration::BevCalibration(const std::array<PixelPoint, 4>& image_points, double width_ft,
                               double length_ft)
    : BevCalibration(image_points, width_ft, length_ft,
                     0.5 * (image_points[0].u + image_points[1].u)) {}

BevCalibration BevCalibration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "calibration file " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    std::array<PixelPoint, 4> pts;
    const auto& ip = j.at("image_points");
    if (!ip.is_array() || ip.size() != 4) {
      raise(ErrorCode::kConfigError, "image_points must hold 4 [u, v] pairs");
    }
    for (int i = 0; i < 4; ++i) pts[i] = {ip[i].at(0).get<double>(), ip[i].at(1).get<double>()};
    const auto& rect = j.at("ground_rect");
    const double w = rect.at(0).get<double>();
    const double l = rect.at(1).get<double>();
    if (j.contains("ego_anchor_px") && !j["ego_anchor_px"].is_null()) {
      return BevCalibration(pts, w, l, j["ego_anchor_px"].get<double>());
    }
    return BevCalibration(pts, w, l);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

bool BevCalibration::contains(PixelPoint p) const {
  double scale = 1.0;
  for (const auto& q : image_points_) scale = std::max({scale, std::abs(q.u), std::abs(q.v)});
  const double tol = 1e-9 * scale * scale;
  bool any_pos = false, any_neg = false;
  for (int i = 0; i < 4; ++i) {
    const double c = cross(image_points_[i], image_points_[(i + 1) % 4], p);
    if (c > tol) any_pos = true;
    if (c < -tol) any_neg = true;
  }
  return !(any_pos && any_neg);
}

GroundPoint BevCalibration::to_ground(GroundPoint bev) const {
  return {bev.x - anchor_bev_x_, length_ - bev.y};
}

PixelPoint BevCalibration::to_pixel(GroundPoint ground) const {
  const GroundPoint bev{ground.x + anchor_bev_x_, length_ - ground.y};
  const auto p = apply_homography(h_inv_, {bev.x, bev.y});
  return {p.x, p.y};
}

ProjectedDetection project_detection(const Detection& det, const BevCalibration& cal, bool force) {
  const PixelPoint contact{0.5 * (det.bbox.x_min + det.bbox.x_max), det.bbox.y_max};
  const bool inside = cal.contains(contact);
  if (!inside && !force) {
    raise(ErrorCode::kOutOfCalibratedRegion,
          "contact point (" + std::to_string(contact.u) + ", " + std::to_string(contact.v) +
              ") of '" + det.class_label + "' lies outside the calibrated road region");
  }
  return {cal.to_ground(apply_homography(cal.homography(), contact)), !inside};
}

}  // namespace roadgraph
