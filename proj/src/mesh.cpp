#include "robinrec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace robinrec {

namespace {

double tri_area2(const Point& a, const Point& b, const Point& c) {
  return (b - a).cross(c - a);
}

// ---------------------------------------------------------------------
// Incremental Bowyer-Watson Delaunay triangulation.
// ---------------------------------------------------------------------

struct DelaunayTri {
  int v[3];     // vertex indices, CCW
  int nbr[3];   // neighbor across the edge opposite v[i]; -1 = none
  bool alive = true;
};

class Delaunay {
 public:
  explicit Delaunay(const std::vector<Point>& points) : pts_(points) {
    // Super-triangle generously enclosing everything.
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const Point& p : pts_) {
      lo_x = std::min(lo_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_x = std::max(hi_x, p.x);
      hi_y = std::max(hi_y, p.y);
    }
    const double cx = 0.5 * (lo_x + hi_x);
    const double cy = 0.5 * (lo_y + hi_y);
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
    const double r = 64.0 * span;
    n_real_ = static_cast<int>(pts_.size());
    pts_.push_back({cx - 2.0 * r, cy - r});
    pts_.push_back({cx + 2.0 * r, cy - r});
    pts_.push_back({cx, cy + 2.0 * r});
    tris_.push_back({{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});

    for (int i = 0; i < n_real_; ++i) insert(i);
  }

  /// Kept triangles over real vertices, CCW.
  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const DelaunayTri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

  const std::vector<Point>& points() const { return pts_; }

 private:
  static double incircle_det(const Point& a, const Point& b, const Point& c,
                             const Point& d) {
    const double ax = a.x - d.x, ay = a.y - d.y;
    const double bx = b.x - d.x, by = b.y - d.y;
    const double cx = c.x - d.x, cy = c.y - d.y;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
           a2 * (bx * cy - by * cx);
  }

  bool in_circumcircle(const DelaunayTri& t, const Point& p) const {
    const Point& a = pts_[t.v[0]];
    const Point& b = pts_[t.v[1]];
    const Point& c = pts_[t.v[2]];
    const double m = std::max({(a - p).norm(), (b - p).norm(), (c - p).norm()});
    const double eps = 1e-12 * m * m * m * m;
    return incircle_det(a, b, c, p) > eps;
  }

  int locate(const Point& p) const {
    int cur = hint_;
    if (cur < 0 || cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive) {
      cur = -1;
      for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
        if (tris_[i].alive) { cur = i; break; }
    }
    const int max_steps = 4 * static_cast<int>(tris_.size()) + 64;
    for (int step = 0; step < max_steps && cur >= 0; ++step) {
      const DelaunayTri& t = tris_[cur];
      int exit_edge = -1;
      double worst = -1e-14;
      for (int e = 0; e < 3; ++e) {
        const Point& a = pts_[t.v[(e + 1) % 3]];
        const Point& b = pts_[t.v[(e + 2) % 3]];
        const double o = tri_area2(a, b, p);
        if (o < worst) {
          worst = o;
          exit_edge = e;
        }
      }
      if (exit_edge < 0) return cur;
      cur = t.nbr[exit_edge];
    }
    // Walk failed (degenerate geometry); scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const DelaunayTri& t = tris_[i];
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e) {
        const Point& a = pts_[t.v[(e + 1) % 3]];
        const Point& b = pts_[t.v[(e + 2) % 3]];
        if (tri_area2(a, b, p) < -1e-14) inside = false;
      }
      if (inside) return i;
    }
    throw std::runtime_error("triangulation: point location failed");
  }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int start = locate(p);

    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity;
    std::vector<char> in_cavity(tris_.size(), 0);
    std::vector<int> stack{start};
    in_cavity[start] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[ti].nbr[e];
        if (nb < 0 || in_cavity[nb]) continue;
        if (in_circumcircle(tris_[nb], p)) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // Boundary edges of the cavity, directed CCW around the cavity.
    struct Rim {
      int a, b;      // directed edge
      int outside;   // triangle beyond the edge (-1 at hull)
    };
    std::vector<Rim> rim;
    for (const int ti : cavity) {
      const DelaunayTri& t = tris_[ti];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.nbr[e];
        if (nb >= 0 && in_cavity[nb]) continue;
        rim.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
      }
    }
    for (const int ti : cavity) tris_[ti].alive = false;

    // One new triangle per rim edge; stitch adjacency via shared vertices.
    std::unordered_map<int, int> tri_starting_at;  // rim vertex a -> new tri
    std::vector<int> created;
    created.reserve(rim.size());
    for (const Rim& r : rim) {
      DelaunayTri nt;
      nt.v[0] = pi;
      nt.v[1] = r.a;
      nt.v[2] = r.b;
      nt.nbr[0] = r.outside;  // across edge (a, b)
      nt.nbr[1] = -1;         // across edge (b, pi): tri starting at b
      nt.nbr[2] = -1;         // across edge (pi, a): tri ending at a
      const int idx = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      created.push_back(idx);
      tri_starting_at[r.a] = idx;
      if (r.outside >= 0) {
        DelaunayTri& out = tris_[r.outside];
        for (int e = 0; e < 3; ++e) {
          if (out.v[(e + 1) % 3] == r.b && out.v[(e + 2) % 3] == r.a) {
            out.nbr[e] = idx;
            break;
          }
        }
      }
    }
    for (const int idx : created) {
      DelaunayTri& t = tris_[idx];
      const auto it = tri_starting_at.find(t.v[2]);
      if (it == tri_starting_at.end())
        throw std::runtime_error("triangulation: cavity rim not closed");
      t.nbr[1] = it->second;           // neighbor across (b, pi)
      tris_[it->second].nbr[2] = idx;  // back-link across (pi, a)
    }
    hint_ = created.empty() ? hint_ : created.back();
  }

  std::vector<Point> pts_;
  std::vector<DelaunayTri> tris_;
  int n_real_ = 0;
  int hint_ = 0;
};

// splitmix64, for deterministic interior jitter.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double jitter01(std::uint64_t seed, std::int64_t ix, std::int64_t iy,
                std::uint64_t salt) {
  const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) ^
                                             mix64(static_cast<std::uint64_t>(iy) ^
                                                   salt)));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

void verify_mesh(const AnnularMesh& m) {
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    if (m.triangle_area(t) <= 0.0)
      throw std::runtime_error("mesh invariant violated: non-positive area in triangle " +
                               std::to_string(t));

  std::map<std::pair<int, int>, int> edge_count;
  const auto key = [](int a, int b) {
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  for (const auto& tri : m.triangles)
    for (int e = 0; e < 3; ++e)
      edge_count[key(tri[e], tri[(e + 1) % 3])]++;

  std::map<std::pair<int, int>, bool> is_boundary;
  for (const auto& ed : m.sigma_edges) is_boundary[key(ed[0], ed[1])] = true;
  for (const auto& ed : m.gamma_edges) is_boundary[key(ed[0], ed[1])] = true;

  for (const auto& ed : m.sigma_edges) {
    const auto it = edge_count.find(key(ed[0], ed[1]));
    if (it == edge_count.end() || it->second != 1)
      throw std::runtime_error("mesh invariant violated: Sigma edge not conforming");
  }
  for (const auto& ed : m.gamma_edges) {
    const auto it = edge_count.find(key(ed[0], ed[1]));
    if (it == edge_count.end() || it->second != 1)
      throw std::runtime_error("mesh invariant violated: Gamma edge not conforming");
  }
  for (const auto& [e, c] : edge_count) {
    if (c == 2) continue;
    if (c == 1 && is_boundary.count(e)) continue;
    throw std::runtime_error("mesh invariant violated: stray boundary edge (" +
                             std::to_string(e.first) + "," +
                             std::to_string(e.second) + ")");
  }
}

}  // namespace

Polyline AnnularMesh::sigma_polyline() const {
  std::vector<Point> v;
  v.reserve(sigma_loop.size());
  for (const int i : sigma_loop) v.push_back(nodes[i]);
  return Polyline::from_vertices(std::move(v));
}

Polyline AnnularMesh::gamma_polyline() const {
  std::vector<Point> v;
  v.reserve(gamma_loop.size());
  for (const int i : gamma_loop) v.push_back(nodes[i]);
  return Polyline::from_vertices(std::move(v));
}

double AnnularMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * tri_area2(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

double AnnularMesh::min_triangle_area() const {
  double a = std::numeric_limits<double>::max();
  for (std::size_t t = 0; t < triangles.size(); ++t)
    a = std::min(a, triangle_area(t));
  return a;
}

double AnnularMesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

AnnularMesh triangulate_annulus(const Polyline& outer, const Polyline& inner,
                                double h, std::uint64_t seed) {
  if (h <= 0.0) throw std::invalid_argument("mesh size must be positive");

  const Polyline outer_h = outer.resampled_by_spacing(h);
  const Polyline inner_h = inner.resampled_by_spacing(h);

  // The inclusion must sit strictly inside the outer curve with clearance.
  for (const Point& p : inner_h.vertices()) {
    if (!outer_h.contains(p) || outer_h.distance_to(p) < h)
      throw std::runtime_error("inclusion touches outer boundary");
  }

  const std::size_t n_out = outer_h.size();
  const std::size_t n_in = inner_h.size();

  std::vector<Point> pts;
  pts.reserve(n_out + n_in + 4096);
  for (const Point& p : outer_h.vertices()) pts.push_back(p);
  for (const Point& p : inner_h.vertices()) pts.push_back(p);

  // Structured layer: one near-equilateral apex point per boundary edge,
  // offset into the annulus. Keeps the first element row regular, which
  // the boundary flux recovery is sensitive to.
  std::vector<Point> layer;
  const auto add_layer = [&](const Polyline& curve, bool annulus_left) {
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = curve[i];
      const Point& b = curve[(i + 1) % n];
      const Point d = b - a;
      const double len = d.norm();
      const Point normal = annulus_left ? Point{-d.y / len, d.x / len}
                                        : Point{d.y / len, -d.x / len};
      const Point apex =
          (a + b) * 0.5 + normal * (len * std::numbers::sqrt3 / 2.0);
      if (!outer_h.contains(apex) || inner_h.contains(apex)) continue;
      if (outer_h.distance_to(apex) < 0.6 * h) continue;
      if (inner_h.distance_to(apex) < 0.6 * h) continue;
      bool crowded = false;
      for (const Point& q : layer) {
        if ((apex - q).norm() < 0.5 * h) {
          crowded = true;
          break;
        }
      }
      if (!crowded) layer.push_back(apex);
    }
  };
  add_layer(outer_h, true);   // annulus lies left of the CCW outer curve
  add_layer(inner_h, false);  // and right of the CCW inner curve
  for (const Point& p : layer) pts.push_back(p);

  // Interior seeds: jittered hexagonal lattice clipped to the annulus
  // with clearance from both curves and from the structured layer.
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const Point& p : outer_h.vertices()) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  }
  const double dy = h * std::numbers::sqrt3 / 2.0;
  const double clearance = 0.7 * h;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>>
      layer_grid;
  const auto cell_of = [&](const Point& p) {
    return std::pair<std::int64_t, std::int64_t>{
        static_cast<std::int64_t>(std::floor(p.x / h)),
        static_cast<std::int64_t>(std::floor(p.y / h))};
  };
  for (std::size_t i = 0; i < layer.size(); ++i) {
    layer_grid[cell_of(layer[i])].push_back(i);
  }
  const auto near_layer = [&](const Point& p, double dist) {
    const auto [cx, cy] = cell_of(p);
    for (std::int64_t gx = cx - 1; gx <= cx + 1; ++gx) {
      for (std::int64_t gy = cy - 1; gy <= cy + 1; ++gy) {
        const auto it = layer_grid.find({gx, gy});
        if (it == layer_grid.end()) continue;
        for (const std::size_t i : it->second) {
          if ((layer[i] - p).norm() < dist) return true;
        }
      }
    }
    return false;
  };
  const auto iy_lo = static_cast<std::int64_t>(std::floor(lo_y / dy)) - 1;
  const auto iy_hi = static_cast<std::int64_t>(std::ceil(hi_y / dy)) + 1;
  for (std::int64_t iy = iy_lo; iy <= iy_hi; ++iy) {
    const double y0 = dy * static_cast<double>(iy);
    const double x_shift = (iy & 1) ? 0.5 * h : 0.0;
    const auto ix_lo = static_cast<std::int64_t>(std::floor(lo_x / h)) - 1;
    const auto ix_hi = static_cast<std::int64_t>(std::ceil(hi_x / h)) + 1;
    for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
      Point p{h * static_cast<double>(ix) + x_shift, y0};
      p.x += (jitter01(seed, ix, iy, 0xa5a5) - 0.5) * 0.3 * h;
      p.y += (jitter01(seed, ix, iy, 0x5a5a) - 0.5) * 0.3 * h;
      if (!outer_h.contains(p) || inner_h.contains(p)) continue;
      if (outer_h.distance_to(p) < clearance) continue;
      if (inner_h.distance_to(p) < clearance) continue;
      if (near_layer(p, 0.75 * h)) continue;
      pts.push_back(p);
    }
  }

  Delaunay dt(pts);
  const auto all_tris = dt.real_triangles();

  AnnularMesh m;
  m.h_target = h;
  m.nodes = pts;
  for (const auto& tri : all_tris) {
    Point c = (pts[tri[0]] + pts[tri[1]] + pts[tri[2]]) * (1.0 / 3.0);
    if (!outer_h.contains(c) || inner_h.contains(c)) continue;
    auto t = tri;
    if (tri_area2(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0) std::swap(t[1], t[2]);
    m.triangles.push_back(t);
  }

  // Drop unreferenced interior seeds and remap.
  std::vector<int> remap(pts.size(), -1);
  for (std::size_t i = 0; i < n_out + n_in; ++i) remap[i] = static_cast<int>(i);
  int next = static_cast<int>(n_out + n_in);
  for (const auto& tri : m.triangles)
    for (const int v : tri)
      if (remap[v] < 0) remap[v] = next++;
  std::vector<Point> nodes(next);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (remap[i] >= 0) nodes[remap[i]] = pts[i];
  for (auto& tri : m.triangles)
    for (int& v : tri) v = remap[v];
  m.nodes = std::move(nodes);

  m.node_marker.assign(m.nodes.size(), NodeMarker::Interior);
  for (std::size_t i = 0; i < n_out; ++i) {
    m.sigma_loop.push_back(static_cast<int>(i));
    m.node_marker[i] = NodeMarker::OnSigma;
  }
  for (std::size_t i = 0; i < n_in; ++i) {
    m.gamma_loop.push_back(static_cast<int>(n_out + i));
    m.node_marker[n_out + i] = NodeMarker::OnGamma;
  }
  for (std::size_t i = 0; i < n_out; ++i)
    m.sigma_edges.push_back({static_cast<int>(i),
                             static_cast<int>((i + 1) % n_out)});
  for (std::size_t i = 0; i < n_in; ++i)
    m.gamma_edges.push_back({static_cast<int>(n_out + i),
                             static_cast<int>(n_out + (i + 1) % n_in)});

  try {
    verify_mesh(m);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("meshing failed: ") + e.what());
  }
  return m;
}

AnnularMesh deform(const AnnularMesh& m, std::span<const Point> velocity,
                   double t) {
  if (velocity.size() != m.nodes.size())
    throw std::invalid_argument("velocity size does not match node count");
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (m.node_marker[i] == NodeMarker::OnSigma &&
        velocity[i].norm() > 1e-12)
      throw std::invalid_argument("velocity must vanish on Sigma (node " +
                                  std::to_string(i) + ")");
  }
  AnnularMesh out = m;
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    out.nodes[i] = m.nodes[i] + velocity[i] * t;
  return out;
}

double min_signed_area_ratio(const AnnularMesh& m,
                             std::span<const Point> velocity, double t) {
  if (velocity.size() != m.nodes.size())
    throw std::invalid_argument("velocity size does not match node count");
  double worst = std::numeric_limits<double>::max();
  for (const auto& tri : m.triangles) {
    const Point a = m.nodes[tri[0]], b = m.nodes[tri[1]], c = m.nodes[tri[2]];
    const Point a2 = a + velocity[tri[0]] * t;
    const Point b2 = b + velocity[tri[1]] * t;
    const Point c2 = c + velocity[tri[2]] * t;
    worst = std::min(worst, tri_area2(a2, b2, c2) / tri_area2(a, b, c));
  }
  return worst;
}

void AnnularMesh::save(std::ostream& out) const {
  out << "# annmesh v1\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "h %.17g\n", h_target);
  out << buf << "nodes " << nodes.size() << "\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", nodes[i].x, nodes[i].y,
                  static_cast<int>(node_marker[i]));
    out << buf;
  }
  out << "triangles " << triangles.size() << "\n";
  for (const auto& t : triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "sigma_loop " << sigma_loop.size() << "\n";
  for (const int i : sigma_loop) out << i << "\n";
  out << "gamma_loop " << gamma_loop.size() << "\n";
  for (const int i : gamma_loop) out << i << "\n";
}

void AnnularMesh::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

AnnularMesh AnnularMesh::load(std::istream& in) {
  std::string line, word;
  if (!std::getline(in, line) || line.rfind("# annmesh v1", 0) != 0)
    throw std::runtime_error("missing '# annmesh v1' header");
  AnnularMesh m;
  std::size_t count = 0;
  in >> word >> m.h_target;
  in >> word >> count;
  m.nodes.resize(count);
  m.node_marker.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    int marker;
    in >> m.nodes[i].x >> m.nodes[i].y >> marker;
    m.node_marker[i] = static_cast<NodeMarker>(marker);
  }
  in >> word >> count;
  m.triangles.resize(count);
  for (auto& t : m.triangles) in >> t[0] >> t[1] >> t[2];
  in >> word >> count;
  m.sigma_loop.resize(count);
  for (int& i : m.sigma_loop) in >> i;
  in >> word >> count;
  m.gamma_loop.resize(count);
  for (int& i : m.gamma_loop) in >> i;
  if (!in) throw std::runtime_error("truncated mesh file");
  const std::size_t n_out = m.sigma_loop.size();
  const std::size_t n_in = m.gamma_loop.size();
  for (std::size_t i = 0; i < n_out; ++i)
    m.sigma_edges.push_back({m.sigma_loop[i], m.sigma_loop[(i + 1) % n_out]});
  for (std::size_t i = 0; i < n_in; ++i)
    m.gamma_edges.push_back({m.gamma_loop[i], m.gamma_loop[(i + 1) % n_in]});
  verify_mesh(m);
  return m;
}

AnnularMesh AnnularMesh::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

void AnnularMesh::export_vtk(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<double>>>& fields) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# vtk DataFile Version 3.0\nannulus mesh\nASCII\n"
      << "DATASET UNSTRUCTURED_GRID\nPOINTS " << nodes.size() << " double\n";
  char buf[128];
  for (const Point& p : nodes) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", p.x, p.y);
    out << buf;
  }
  out << "CELLS " << triangles.size() << " " << 4 * triangles.size() << "\n";
  for (const auto& t : triangles)
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << triangles.size() << "\n";
  for (std::size_t i = 0; i < triangles.size(); ++i) out << "5\n";
  if (!fields.empty()) {
    out << "POINT_DATA " << nodes.size() << "\n";
    for (const auto& [name, values] : fields) {
      if (values.size() != nodes.size())
        throw std::invalid_argument("field '" + name + "' has wrong size");
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (const double v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
      }
    }
  }
}

}  // namespace robinrec
