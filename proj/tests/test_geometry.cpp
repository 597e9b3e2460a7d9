#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "robinrec/geometry.hpp"

using namespace robinrec;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent brute-force Hausdorff: all-pairs point-to-segment scan at a
// fixed dense resolution, written without reusing the library's resampler.
double brute_force_hausdorff(const Polyline& a, const Polyline& b, int dense) {
  auto points_on = [&](const Polyline& p) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Point& u = p[i];
      const Point& v = p[(i + 1) % p.size()];
      for (int k = 0; k < dense; ++k) {
        const double s = static_cast<double>(k) / dense;
        pts.push_back({u.x + s * (v.x - u.x), u.y + s * (v.y - u.y)});
      }
    }
    return pts;
  };
  auto directed = [&](const Polyline& from, const Polyline& to) {
    double worst = 0.0;
    for (const Point& p : points_on(from)) {
      double best = 1e300;
      for (std::size_t i = 0; i < to.size(); ++i) {
        const Point& u = to[i];
        const Point& v = to[(i + 1) % to.size()];
        const Point uv = v - u;
        double s = (p - u).dot(uv) / uv.dot(uv);
        s = std::min(1.0, std::max(0.0, s));
        best = std::min(best, (p - (u + uv * s)).norm());
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST_CASE("shape catalog evaluates the documented points") {
  const auto kite = ParametricBoundary::shape(ShapeKind::Kite);
  CHECK(kite.at(0.0).x == doctest::Approx(0.855).epsilon(1e-12));
  CHECK(kite.at(0.0).y == doctest::Approx(0.0).epsilon(1e-12));

  const auto circle = ParametricBoundary::circle({0.0, 0.0}, 0.3);
  CHECK(circle.at(kPi / 2).x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(circle.at(kPi / 2).y == doctest::Approx(0.3).epsilon(1e-12));

  const auto l = lshape_vertices();
  REQUIRE(l.size() == 6);
  CHECK(l[0].x == -0.55);
  CHECK(l[3].x == 0.0);
  CHECK(l[3].y == 0.0);
  CHECK(l[5].y == 0.55);
}

TEST_CASE("catalog shapes are simple CCW curves inside the unit disk") {
  for (const ShapeKind kind :
       {ShapeKind::Kite, ShapeKind::Ribbon, ShapeKind::Peanut}) {
    for (const std::size_t n : {64u, 128u, 256u, 512u}) {
      const Polyline p = sample_boundary(ParametricBoundary::shape(kind), n);
      CHECK(p.signed_area() > 0.0);
      double rmax = 0.0;
      for (const Point& v : p.vertices()) rmax = std::max(rmax, v.norm());
      CHECK(rmax < 1.0);
    }
  }
  const Polyline l = Polyline::from_vertices(lshape_vertices());
  CHECK(l.signed_area() > 0.0);
}

TEST_CASE("polyline construction rejects invalid input") {
  CHECK_THROWS_AS(Polyline::from_vertices({{0, 0}, {1, 0}}),
                  std::invalid_argument);
  // Clockwise square.
  CHECK_THROWS_AS(Polyline::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0}}),
                  std::invalid_argument);
  // Bowtie self-intersection.
  CHECK_THROWS_AS(Polyline::from_vertices({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                  std::invalid_argument);
  // Repeated vertex names its index.
  try {
    Polyline::from_vertices({{0, 0}, {1, 0}, {1, 0}, {0, 1}});
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("resampling preserves arc length and corners") {
  const Polyline l = Polyline::from_vertices(lshape_vertices());
  const Polyline r = l.resampled(60);
  CHECK(r.size() == 60);
  CHECK(r.perimeter() == doctest::Approx(l.perimeter()).epsilon(1e-3));
  // Each original corner survives exactly.
  for (const Point& c : lshape_vertices()) {
    double best = 1e300;
    for (const Point& v : r.vertices()) best = std::min(best, (v - c).norm());
    CHECK(best < 1e-12);
  }
}

TEST_CASE("curve frame on circles") {
  const Polyline inner =
      sample_boundary(ParametricBoundary::circle({0, 0}, 0.5), 256);
  const CurveFrame fi = curve_frame(inner, BoundarySide::InnerBoundary);
  const Polyline outer =
      sample_boundary(ParametricBoundary::circle({0, 0}, 1.0), 256);
  const CurveFrame fo = curve_frame(outer, BoundarySide::OuterBoundary);

  double wsum = 0.0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    CHECK(fi.tangent[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fi.normal[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fi.tangent[i].dot(fi.normal[i])) < 1e-12);
    CHECK(fi.curvature[i] == doctest::Approx(2.0).epsilon(1e-3));
    // Inner-boundary normal points toward the inclusion center.
    const Point radial = inner[i] * (1.0 / inner[i].norm());
    CHECK(fi.normal[i].dot(radial) == doctest::Approx(-1.0).epsilon(1e-3));
    wsum += fi.arc_weight[i];
  }
  CHECK(wsum == doctest::Approx(inner.perimeter()).epsilon(1e-12));
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Point radial = outer[i] * (1.0 / outer[i].norm());
    CHECK(fo.normal[i].dot(radial) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("curve frame flags corners and stays finite there") {
  const Polyline l = Polyline::from_vertices(lshape_vertices()).resampled(48);
  const CurveFrame f = curve_frame(l, BoundarySide::InnerBoundary);
  CHECK(f.corner_indices.size() == 6);
  for (const std::size_t i : f.corner_indices) {
    CHECK(std::isfinite(f.curvature[i]));
    // Turning angle pi/2 over the adjacent arc; brute-force ratio.
    const std::size_t n = l.size();
    const double lp = (l[i] - l[(i + n - 1) % n]).norm();
    const double ln = (l[(i + 1) % n] - l[i]).norm();
    const double expected = (kPi / 2.0) / (0.5 * (lp + ln));
    CHECK(std::abs(f.curvature[i]) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("frame is rotation equivariant") {
  const Polyline kite = sample_boundary(ParametricBoundary::shape(ShapeKind::Kite), 128);
  const double c = std::cos(0.7), s = std::sin(0.7);
  std::vector<Point> rotated;
  for (const Point& p : kite.vertices()) {
    rotated.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
  }
  const Polyline kite_r = Polyline::from_vertices(rotated);
  const CurveFrame f = curve_frame(kite, BoundarySide::InnerBoundary);
  const CurveFrame fr = curve_frame(kite_r, BoundarySide::InnerBoundary);
  for (std::size_t i = 0; i < kite.size(); ++i) {
    CHECK(fr.curvature[i] == doctest::Approx(f.curvature[i]).epsilon(1e-9));
    CHECK(fr.normal[i].x ==
          doctest::Approx(c * f.normal[i].x - s * f.normal[i].y).epsilon(1e-12));
    CHECK(fr.normal[i].y ==
          doctest::Approx(s * f.normal[i].x + c * f.normal[i].y).epsilon(1e-12));
  }
}

TEST_CASE("arc derivative on the unit circle") {
  const std::size_t n = 512;
  const Polyline circ = sample_boundary(ParametricBoundary::circle({0, 0}, 1.0), n);

  std::vector<double> constant(n, 3.25);
  for (double d : arc_derivative(constant, circ)) CHECK(std::abs(d) < 1e-12);

  std::vector<double> ys(n), x2(n), ts(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = std::atan2(circ[i].y, circ[i].x);
    ys[i] = circ[i].y;
    x2[i] = circ[i].x * circ[i].x;
  }
  const auto dy = arc_derivative(ys, circ);
  const auto dx2 = arc_derivative(x2, circ);
  double err1 = 0.0, err2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err1 = std::max(err1, std::abs(dy[i] - std::cos(ts[i])));
    err2 = std::max(err2, std::abs(dx2[i] + 2.0 * std::cos(ts[i]) * std::sin(ts[i])));
  }
  CHECK(err1 < 1e-4);
  CHECK(err2 < 2e-4);

  CHECK_THROWS_AS(arc_derivative(std::vector<double>(n - 1, 0.0), circ),
                  std::invalid_argument);
}

TEST_CASE("second arc derivative converges at second order") {
  auto second_deriv_err = [](std::size_t n) {
    const Polyline circ =
        sample_boundary(ParametricBoundary::circle({0, 0}, 1.0), n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = circ[i].y;
    const auto d2 = arc_derivative(arc_derivative(ys, circ), circ);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(d2[i] + ys[i]));
    return err;
  };
  const double e1 = second_deriv_err(128);
  const double e2 = second_deriv_err(256);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("hausdorff distance") {
  const Polyline a = sample_boundary(ParametricBoundary::circle({0, 0}, 0.3), 512);
  const Polyline b = sample_boundary(ParametricBoundary::circle({0, 0}, 0.5), 512);
  CHECK(hausdorff_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(hausdorff_distance(a, b) == doctest::Approx(hausdorff_distance(b, a)));

  const Polyline kite = sample_boundary(ParametricBoundary::shape(ShapeKind::Kite), 256);
  const double lib = hausdorff_distance(a, kite);
  const double brute = brute_force_hausdorff(a, kite, 8);
  CHECK(lib == doctest::Approx(brute).epsilon(1e-3));

  // Triangle inequality on a catalog triple.
  const Polyline peanut =
      sample_boundary(ParametricBoundary::shape(ShapeKind::Peanut), 256);
  CHECK(hausdorff_distance(a, peanut) <=
        hausdorff_distance(a, kite) + hausdorff_distance(kite, peanut) + 1e-6);
}

TEST_CASE("polyline CSV round-trip") {
  const Polyline kite = sample_boundary(ParametricBoundary::shape(ShapeKind::Kite), 64);
  std::stringstream ss;
  kite.write_csv(ss);
  CHECK(ss.str().rfind("# polyline v1", 0) == 0);
  const Polyline back = Polyline::read_csv(ss);
  REQUIRE(back.size() == kite.size());
  for (std::size_t i = 0; i < kite.size(); ++i) {
    CHECK(back[i].x == kite[i].x);
    CHECK(back[i].y == kite[i].y);
  }
  std::stringstream bad("# polyline v1\n0,0\nnot,a,row\n");
  CHECK_THROWS(Polyline::read_csv(bad));
}
