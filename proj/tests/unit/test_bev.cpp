#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "roadgraph/bev.hpp"
#include "roadgraph/error.hpp"

using namespace roadgraph;

namespace {

// Independent dense solve of the 8x8 direct linear system.
Homography eigen_homography(const std::array<PixelPoint, 4>& img, const std::array<GroundPoint, 4>& g) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double u = img[i].u, v = img[i].v, x = g[i].x, y = g[i].y;
    a.row(2 * i) << u, v, 1, 0, 0, 0, -u * x, -v * x;
    a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -u * y, -v * y;
    b(2 * i) = x;
    b(2 * i + 1) = y;
  }
  const Eigen::Matrix<double, 8, 1> h = a.colPivHouseholderQr().solve(b);
  return {h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0};
}

std::pair<double, double> map(const Homography& h, double u, double v) {
  const double d = h[6] * u + h[7] * v + h[8];
  return {(h[0] * u + h[1] * v + h[2]) / d, (h[3] * u + h[4] * v + h[5]) / d};
}

}  // namespace

TEST(Homography, IdentityAndScale) {
  const std::array<PixelPoint, 4> unit{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const std::array<GroundPoint, 4> same{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const auto h = fit_homography(unit, same);
  const Homography id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h[i], id[i], 1e-12);

  const std::array<GroundPoint, 4> twice{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  const auto s = fit_homography(unit, twice);
  const Homography diag{2, 0, 0, 0, 2, 0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(s[i], diag[i], 1e-12);
}

TEST(Homography, TrapezoidMatchesDenseSolver) {
  const std::array<PixelPoint, 4> img{{{0, 100}, {640, 100}, {500, 300}, {140, 300}}};
  const std::array<GroundPoint, 4> ground{{{0, 60}, {24, 60}, {24, 0}, {0, 0}}};
  const auto h = fit_homography(img, ground);
  const auto ref = eigen_homography(img, ground);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h[i], ref[i], 1e-9 * std::max(1.0, std::fabs(ref[i])));
  for (int i = 0; i < 4; ++i) {
    const auto [x, y] = map(h, img[i].u, img[i].v);
    EXPECT_LT(std::hypot(x - ground[i].x, y - ground[i].y), 1e-9);
  }
}

TEST(Homography, InverseRoundTrip) {
  const std::array<PixelPoint, 4> img{{{0, 100}, {640, 100}, {500, 300}, {140, 300}}};
  const std::array<GroundPoint, 4> ground{{{0, 60}, {24, 60}, {24, 0}, {0, 0}}};
  const auto h = fit_homography(img, ground);
  const auto inv = invert_homography(h);
  const auto g = apply_homography(h, {320, 200});
  const auto back = apply_homography(inv, {g.x, g.y});
  EXPECT_NEAR(back.x, 320, 1e-9);
  EXPECT_NEAR(back.y, 200, 1e-9);
}

TEST(Homography, DegenerateThrows) {
  const std::array<PixelPoint, 4> line{{{0, 0}, {1, 1}, {2, 2}, {0, 1}}};
  const std::array<GroundPoint, 4> g{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  try {
    fit_homography(line, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCalibration);
  }
}

TEST(ProjectDetection, IdentityWithAnchor) {
  // Image quad equal to the BEV rectangle makes H the identity.
  const double w = 30, l = 50;
  const std::array<PixelPoint, 4> img{{{0, l}, {w, l}, {w, 0}, {0, 0}}};
  const BevCalibration cal(img, w, l, 10.0);
  Detection det{"car", {12, 3, 16, 7}, 1.0};  // bottom centre (14, 7)
  const auto p = project_detection(det, cal);
  EXPECT_FALSE(p.outside_region);
  EXPECT_NEAR(p.ground.x, 4.0, 1e-9);
  EXPECT_NEAR(p.ground.y, -7.0 + l, 1e-9);
}

TEST(ProjectDetection, NearLeftCornerAndOutside) {
  const std::array<PixelPoint, 4> img{{{140, 300}, {500, 300}, {640, 100}, {0, 100}}};
  const BevCalibration cal(img, 24, 60);
  // Bottom centre exactly on the near-left corner: BEV (0, L), i.e. ground
  // lateral -anchor and longitudinal 0.
  Detection det{"car", {130, 280, 150, 300}, 1.0};
  const auto p = project_detection(det, cal);
  EXPECT_NEAR(p.ground.x, 0.0 - cal.ego_anchor_bev_x(), 1e-9);
  EXPECT_NEAR(p.ground.y, 0.0, 1e-9);
  EXPECT_NEAR(cal.ego_anchor_bev_x(), 12.0, 1e-9);

  Detection far{"car", {2000, 2000, 2100, 2200}, 1.0};
  try {
    project_detection(far, cal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfCalibratedRegion);
  }
  EXPECT_TRUE(project_detection(far, cal, true).outside_region);
}

TEST(Calibration, GroundPixelRoundTrip) {
  const std::array<PixelPoint, 4> img{{{140, 300}, {500, 300}, {640, 100}, {0, 100}}};
  const BevCalibration cal(img, 24, 60);
  const auto px = cal.to_pixel({3.0, 20.0});
  EXPECT_TRUE(cal.contains(px));
  Detection det{"car", {px.u - 5, px.v - 10, px.u + 5, px.v}, 1.0};
  const auto g = project_detection(det, cal).ground;
  EXPECT_NEAR(g.x, 3.0, 1e-9);
  EXPECT_NEAR(g.y, 20.0, 1e-9);
}
