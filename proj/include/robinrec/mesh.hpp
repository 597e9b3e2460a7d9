#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "robinrec/geometry.hpp"

namespace robinrec {

enum class NodeMarker { Interior, OnSigma, OnGamma };

enum class BoundaryLoop { Sigma, Gamma };

/// Triangulation of the annulus between an outer curve (Sigma) and an
/// inner curve (Gamma). Triangles are positively oriented; boundary
/// edges are tagged per loop and the loop node orderings (CCW) are kept.
struct AnnularMesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> sigma_edges;
  std::vector<std::array<int, 2>> gamma_edges;
  std::vector<NodeMarker> node_marker;
  std::vector<int> sigma_loop;  // ordered CCW node indices on Sigma
  std::vector<int> gamma_loop;  // ordered CCW node indices on Gamma
  double h_target = 0.0;

  const std::vector<int>& loop(BoundaryLoop which) const {
    return which == BoundaryLoop::Sigma ? sigma_loop : gamma_loop;
  }

  Polyline sigma_polyline() const;
  Polyline gamma_polyline() const;

  double triangle_area(std::size_t t) const;
  double min_triangle_area() const;
  double total_area() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static AnnularMesh load(std::istream& in);
  static AnnularMesh load_file(const std::string& path);

  /// Legacy ASCII unstructured-grid export, optionally with nodal fields.
  void export_vtk(const std::string& path,
                  const std::vector<std::pair<std::string,
                                              std::vector<double>>>& fields = {}) const;
};

/// Conforming triangulation of the annulus with target edge size h.
/// Both curves are resampled to spacing close to h first; the seed
/// controls the deterministic interior point jitter.
AnnularMesh triangulate_annulus(const Polyline& outer, const Polyline& inner,
                                double h, std::uint64_t seed = 1);

/// Moves every node by t * V[node]; connectivity and tags are preserved.
/// V must vanish on Sigma nodes (to 1e-12), or the call throws.
AnnularMesh deform(const AnnularMesh& m, std::span<const Point> velocity,
                   double t);

/// min over triangles of area(after move) / area(before); <= 0 means a
/// reversed triangle.
double min_signed_area_ratio(const AnnularMesh& m,
                             std::span<const Point> velocity, double t);

}  // namespace robinrec
