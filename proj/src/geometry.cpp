#include "robinrec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace robinrec {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double Point::norm() const { return std::hypot(x, y); }

ShapeKind shape_kind_from_string(const std::string& name) {
  if (name == "circle") return ShapeKind::Circle;
  if (name == "kite") return ShapeKind::Kite;
  if (name == "ribbon") return ShapeKind::Ribbon;
  if (name == "peanut") return ShapeKind::Peanut;
  if (name == "lshape") return ShapeKind::LShape;
  throw std::invalid_argument("unknown shape kind: " + name);
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Kite: return "kite";
    case ShapeKind::Ribbon: return "ribbon";
    case ShapeKind::Peanut: return "peanut";
    case ShapeKind::LShape: return "lshape";
  }
  throw std::invalid_argument("unknown shape kind");
}

ParametricBoundary ParametricBoundary::circle(Point center, double radius) {
  return {ShapeKind::Circle, center, radius};
}

ParametricBoundary ParametricBoundary::shape(ShapeKind kind) {
  if (kind == ShapeKind::Circle)
    throw std::invalid_argument("circle needs center and radius");
  return {kind, {0.0, 0.0}, 1.0};
}

Point ParametricBoundary::at(double t) const {
  switch (kind) {
    case ShapeKind::Circle:
      return {center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
    case ShapeKind::Kite:
      return {0.195 + 0.4 * (std::cos(t) + 0.65 * std::cos(2.0 * t)),
              0.55 * std::sin(t)};
    case ShapeKind::Ribbon:
      return {0.64 * std::cos(t),
              0.48 * std::sin(t) * (1.8 + std::cos(2.0 * t))};
    case ShapeKind::Peanut: {
      const double rho = (0.6 + 0.54 * std::cos(t) + 0.06 * std::sin(2.0 * t)) /
                         (1.0 + 0.75 * std::cos(t));
      return {-0.25 + rho * std::cos(t), 0.05 + rho * std::sin(t)};
    }
    case ShapeKind::LShape:
      throw std::invalid_argument("LShape has no smooth parametrization");
  }
  throw std::invalid_argument("unknown shape kind");
}

std::vector<Point> lshape_vertices() {
  return {{-0.55, -0.55}, {0.55, -0.55}, {0.55, 0.0},
          {0.0, 0.0},     {0.0, 0.55},   {-0.55, 0.55}};
}

namespace {

bool segments_intersect(const Point& a, const Point& b, const Point& c,
                        const Point& d) {
  const auto orient = [](const Point& p, const Point& q, const Point& r) {
    return (q - p).cross(r - p);
  };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return (p - a).norm();
  double s = (p - a).dot(ab) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + ab * s)).norm();
}

}  // namespace

bool is_simple_loop(const std::vector<Point>& vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                             vertices[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

Polyline Polyline::from_vertices(std::vector<Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw std::invalid_argument("polyline needs at least 3 vertices");

  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      diam = std::max(diam, (vertices[i] - vertices[j]).norm());

  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    if ((b - a).norm() <= 1e-12 * diam)
      throw std::invalid_argument("degenerate edge at vertex " +
                                  std::to_string(i));
  }

  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    area2 += a.cross(b);
  }
  if (area2 <= 0.0)
    throw std::invalid_argument("polyline must be counterclockwise");

  // Simplicity: non-adjacent edges must not cross.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                             vertices[(j + 1) % n]))
        throw std::invalid_argument("polyline is self-intersecting (edges " +
                                    std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    }
  }

  Polyline p;
  p.verts_ = std::move(vertices);
  return p;
}

double Polyline::signed_area() const {
  double area2 = 0.0;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i)
    area2 += verts_[i].cross(verts_[(i + 1) % n]);
  return 0.5 * area2;
}

double Polyline::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < verts_.size(); ++i) p += edge_length(i);
  return p;
}

double Polyline::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < verts_.size(); ++i)
    for (std::size_t j = i + 1; j < verts_.size(); ++j)
      d = std::max(d, (verts_[i] - verts_[j]).norm());
  return d;
}

double Polyline::edge_length(std::size_t i) const {
  return (verts_[(i + 1) % verts_.size()] - verts_[i]).norm();
}

bool Polyline::contains(const Point& p) const {
  bool inside = false;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = verts_[i];
    const Point& b = verts_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

double Polyline::distance_to(const Point& p) const {
  double d = std::numeric_limits<double>::max();
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::min(d, point_segment_distance(p, verts_[i], verts_[(i + 1) % n]));
  return d;
}

namespace {

// Interior turning angle at each vertex.
double turning_angle(const Point& prev, const Point& cur, const Point& next) {
  const Point e0 = cur - prev;
  const Point e1 = next - cur;
  return std::atan2(e0.cross(e1), e0.dot(e1));
}

}  // namespace

Polyline Polyline::resampled(std::size_t n, double corner_angle) const {
  const std::size_t m = verts_.size();
  if (n < 3) throw std::invalid_argument("resample target too small");

  // Corner vertices split the curve into chains resampled independently.
  std::vector<std::size_t> corners;
  for (std::size_t i = 0; i < m; ++i) {
    const double ang = turning_angle(verts_[(i + m - 1) % m], verts_[i],
                                     verts_[(i + 1) % m]);
    if (std::abs(ang) > corner_angle) corners.push_back(i);
  }

  std::vector<Point> out;
  out.reserve(n + corners.size());

  const auto emit_chain = [&](std::size_t begin, std::size_t count,
                              std::size_t samples, bool keep_first) {
    // Walk edges begin .. begin+count-1, placing `samples` points
    // equispaced in arc length, the first at the chain start.
    std::vector<double> cum(count + 1, 0.0);
    for (std::size_t k = 0; k < count; ++k)
      cum[k + 1] = cum[k] + edge_length((begin + k) % m);
    const double total = cum[count];
    for (std::size_t s = keep_first ? 0 : 1; s < samples; ++s) {
      const double target = total * double(s) / double(samples);
      const auto it = std::upper_bound(cum.begin(), cum.end(), target);
      std::size_t k = std::min<std::size_t>(it - cum.begin() - 1, count - 1);
      const double local = (target - cum[k]) / (cum[k + 1] - cum[k]);
      const Point& a = verts_[(begin + k) % m];
      const Point& b = verts_[(begin + k + 1) % m];
      out.push_back(a + (b - a) * local);
    }
    if (keep_first) return;
  };

  if (corners.empty()) {
    emit_chain(0, m, n, true);
  } else {
    const double total = perimeter();
    const std::size_t nc = corners.size();
    std::vector<std::size_t> counts(nc), samples(nc, 1);
    std::vector<double> quota(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t begin = corners[c];
      const std::size_t end = corners[(c + 1) % nc];
      counts[c] = (end + m - begin) % m == 0 ? m : (end + m - begin) % m;
      double chain_len = 0.0;
      for (std::size_t k = 0; k < counts[c]; ++k)
        chain_len += edge_length((begin + k) % m);
      quota[c] = double(n) * chain_len / total;
      samples[c] = std::max<std::size_t>(1, static_cast<std::size_t>(quota[c]));
    }
    // Largest-remainder apportionment so the counts sum to exactly n
    // (unless the corner count alone exceeds n).
    std::size_t assigned = 0;
    for (const std::size_t s : samples) assigned += s;
    while (assigned < n) {
      std::size_t best = 0;
      double best_rem = -1.0;
      for (std::size_t c = 0; c < nc; ++c) {
        const double rem = quota[c] - double(samples[c]);
        if (rem > best_rem) {
          best_rem = rem;
          best = c;
        }
      }
      ++samples[best];
      ++assigned;
    }
    for (std::size_t c = 0; c < nc; ++c) {
      emit_chain(corners[c], counts[c], samples[c], true);
    }
  }
  return Polyline::from_vertices(std::move(out));
}

Polyline Polyline::resampled_by_spacing(double h, double corner_angle) const {
  if (h <= 0.0) throw std::invalid_argument("spacing must be positive");
  const auto n = static_cast<std::size_t>(
      std::max(8.0, std::round(perimeter() / h)));
  return resampled(n, corner_angle);
}

void Polyline::write_csv(std::ostream& out) const {
  out << "# polyline v1\n";
  char buf[80];
  for (const Point& p : verts_) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
    out << buf;
  }
}

void Polyline::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out);
}

Polyline Polyline::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# polyline v1", 0) != 0)
    throw std::runtime_error("missing '# polyline v1' header");
  std::vector<Point> verts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Point p;
    char comma = 0;
    if (!(ss >> p.x >> comma >> p.y) || comma != ',')
      throw std::runtime_error("malformed polyline row " + std::to_string(row));
    verts.push_back(p);
  }
  return Polyline::from_vertices(std::move(verts));
}

Polyline Polyline::read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

Polyline sample_boundary(const ParametricBoundary& boundary, std::size_t n) {
  if (n < 8) throw std::invalid_argument("need at least 8 samples");
  if (boundary.kind == ShapeKind::LShape) {
    Polyline hexagon = Polyline::from_vertices(lshape_vertices());
    return hexagon.resampled(n);
  }
  std::vector<Point> verts;
  verts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    verts.push_back(boundary.at(kTwoPi * double(i) / double(n)));
  return Polyline::from_vertices(std::move(verts));
}

CurveFrame curve_frame(const Polyline& curve, BoundarySide side) {
  const std::size_t n = curve.size();
  if (n < 8) throw std::invalid_argument("curve too coarse for a frame");

  CurveFrame frame;
  frame.tangent.resize(n);
  frame.normal.resize(n);
  frame.curvature.resize(n);
  frame.arc_weight.resize(n);

  const double diam = curve.diameter();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = curve[(i + n - 1) % n];
    const Point& cur = curve[i];
    const Point& next = curve[(i + 1) % n];
    const double lp = (cur - prev).norm();
    const double ln = (next - cur).norm();
    if (lp <= 1e-12 * diam || ln <= 1e-12 * diam)
      throw std::invalid_argument("degenerate edge at vertex " +
                                  std::to_string(i));

    const Point chord = next - prev;
    const Point tau = chord * (1.0 / chord.norm());
    frame.tangent[i] = tau;
    // CCW curve: (tau.y, -tau.x) points away from the enclosed region.
    Point nu{tau.y, -tau.x};
    if (side == BoundarySide::InnerBoundary) nu = nu * -1.0;
    frame.normal[i] = nu;

    const double ang = turning_angle(prev, cur, next);
    frame.curvature[i] = ang / (0.5 * (lp + ln));
    frame.arc_weight[i] = 0.5 * (lp + ln);
    if (std::abs(ang) > 0.35) frame.corner_indices.push_back(i);
  }
  return frame;
}

std::vector<double> arc_derivative(const std::vector<double>& values,
                                   const Polyline& curve) {
  const std::size_t n = curve.size();
  if (values.size() != n)
    throw std::invalid_argument("value count does not match vertex count");
  std::vector<double> deriv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lp = curve.edge_length((i + n - 1) % n);
    const double ln = curve.edge_length(i);
    const double vp = values[(i + n - 1) % n];
    const double vn = values[(i + 1) % n];
    const double vc = values[i];
    // Nonuniform central difference, second order on smooth samplings.
    deriv[i] = (vn - vc) * lp / (ln * (lp + ln)) +
               (vc - vp) * ln / (lp * (lp + ln));
  }
  return deriv;
}

namespace {

double directed_hausdorff(const Polyline& from, const Polyline& to) {
  // Densify each edge directly: the distance only needs sample points,
  // and re-validating a Polyline here would reject curves that are
  // legitimate distance arguments (e.g. a wiggly descent iterate whose
  // equispaced resampling crosses itself).
  const std::size_t n = from.size();
  constexpr std::size_t kPerEdge = 4;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = from[i];
    const Point& b = from[(i + 1) % n];
    for (std::size_t k = 0; k < kPerEdge; ++k) {
      const double s = static_cast<double>(k) / kPerEdge;
      worst = std::max(worst, to.distance_to(a + (b - a) * s));
    }
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const Polyline& a, const Polyline& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace robinrec
