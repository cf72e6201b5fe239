#ifndef SHAPETENSOR_MESH_HPP
#define SHAPETENSOR_MESH_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapetensor/geometry.hpp"

namespace shapetensor {

struct DegenerateMeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conforming triangle mesh of a simply connected polygonal domain.
// Triangles are CCW. Edge j of a triangle is the edge opposite local vertex j.
// Global edges store the endpoint pair with the lower vertex index first; the
// global edge orientation is low index -> high index and the global edge
// normal is the tangent rotated by -90 degrees.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;

  // Derived connectivity, rebuilt by finalize().
  std::vector<std::array<int, 2>> edges;              // (lo, hi) vertex ids
  std::vector<std::array<int, 3>> triangle_edges;     // global edge id per local edge
  std::vector<std::array<int, 2>> edge_triangles;     // adjacent triangles, -1 if none
  std::vector<char> edge_on_boundary;
  std::vector<char> vertex_on_boundary;

  // Cached geometry, rebuilt by finalize().
  std::vector<double> areas;                          // positive
  std::vector<std::array<Vec2, 3>> p1_grad;           // gradient of barycentric fn j

  int level = 0;                                      // uniform refinements applied
  std::vector<int> parent_triangle;                   // index in the coarser mesh, -1 at level 0

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Vec2 centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }
  double total_area() const;

  // Rebuilds edges, adjacency, boundary flags and cached geometry from
  // vertices/triangles. Throws DegenerateMeshError on non-positive triangle
  // areas.
  void finalize();
};

// Simple polygon (CCW or CW, repaired to CCW); optionally rescaled about its
// centroid so the enclosed area matches target_area.
struct PolygonSpec {
  std::vector<Vec2> boundary;
  std::optional<double> target_area;
};

PolygonSpec regular_polygon(int n, double target_area, double phase = 0.0);

// Triangulates the polygon (fan from the centroid when convex, ear clipping
// otherwise) and applies `level` uniform refinements.
Mesh generate_polygon_mesh(const PolygonSpec& spec, int level);

// Inscribed regular polygon of the disk of the given radius, fanned from the
// center, refined `level` times. Refinement midpoints stay on the chords.
Mesh generate_disk_mesh(double radius, int segments, int level);

// Red refinement: each triangle is split into 4 via edge midpoints.
Mesh refine_uniform(const Mesh& m);

// Moves every vertex by scale*displacement[v], keeping the connectivity.
// Throws DegenerateMeshError if any deformed signed area is <= q_min times
// the original area.
Mesh deform_mesh(const Mesh& m, const std::vector<Vec2>& displacement, double scale,
                 double q_min);

// True when the deformed mesh would pass the deform_mesh area check.
bool deformation_is_admissible(const Mesh& m, const std::vector<Vec2>& displacement,
                               double scale, double q_min);

double min_angle_deg(const Mesh& m);

// Boundary vertices ordered CCW along the single boundary loop.
std::vector<int> boundary_loop(const Mesh& m);

}  // namespace shapetensor

#endif
