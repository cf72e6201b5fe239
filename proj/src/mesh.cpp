#include "shapetensor/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace shapetensor {

namespace {

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) a += cross2(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly, double signed_area) {
  Vec2 c = Vec2::Zero();
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    c += (p + q) * cross2(p, q);
  }
  return c / (6.0 * signed_area);
}

bool polygon_is_convex(const std::vector<Vec2>& poly) {
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 a = poly[(i + 1) % n] - poly[i];
    const Vec2 b = poly[(i + 2) % n] - poly[(i + 1) % n];
    if (cross2(a, b) < 0.0) return false;
  }
  return true;
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  double d1 = cross2(b - a, p - a);
  double d2 = cross2(c - b, p - b);
  double d3 = cross2(a - c, p - c);
  return d1 > 0.0 && d2 > 0.0 && d3 > 0.0;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  while (idx.size() > 3) {
    int n = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < n; ++i) {
      int ip = idx[(i + n - 1) % n], ic = idx[i], in = idx[(i + 1) % n];
      const Vec2 &a = poly[ip], &b = poly[ic], &c = poly[in];
      if (cross2(b - a, c - b) <= 0.0) continue;
      bool blocked = false;
      for (int j : idx) {
        if (j == ip || j == ic || j == in) continue;
        if (point_in_triangle(poly[j], a, b, c)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        tris.push_back({ip, ic, in});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped) throw DegenerateMeshError("ear_clip: no ear found, polygon not simple");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross2(b - a, c - a);
}

}  // namespace

double Mesh::total_area() const {
  double a = 0.0;
  for (double t : areas) a += t;
  return a;
}

void Mesh::finalize() {
  const int nv = n_vertices();
  const int nt = n_triangles();

  areas.resize(nt);
  p1_grad.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles[t];
    const Vec2 &p0 = vertices[tri[0]], &p1 = vertices[tri[1]], &p2 = vertices[tri[2]];
    double sa = triangle_signed_area(p0, p1, p2);
    if (!(sa > 0.0))
      throw DegenerateMeshError("finalize: triangle " + std::to_string(t) +
                                " has non-positive area");
    areas[t] = sa;
    // grad of barycentric fn j: rot90 of the opposite edge over twice the area
    p1_grad[t][0] = rot90(p2 - p1) / (2.0 * sa);
    p1_grad[t][1] = rot90(p0 - p2) / (2.0 * sa);
    p1_grad[t][2] = rot90(p1 - p0) / (2.0 * sa);
  }

  edges.clear();
  triangle_edges.assign(nt, {-1, -1, -1});
  edge_triangles.clear();
  std::unordered_map<long long, int> edge_index;
  edge_index.reserve(3 * nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles[t];
    for (int j = 0; j < 3; ++j) {
      int a = tri[(j + 1) % 3], b = tri[(j + 2) % 3];
      int lo = std::min(a, b), hi = std::max(a, b);
      long long key = static_cast<long long>(lo) * nv + hi;
      auto it = edge_index.find(key);
      int e;
      if (it == edge_index.end()) {
        e = static_cast<int>(edges.size());
        edge_index.emplace(key, e);
        edges.push_back({lo, hi});
        edge_triangles.push_back({t, -1});
      } else {
        e = it->second;
        if (edge_triangles[e][1] != -1)
          throw DegenerateMeshError("finalize: edge shared by more than two triangles");
        edge_triangles[e][1] = t;
      }
      triangle_edges[t][j] = e;
    }
  }

  edge_on_boundary.assign(edges.size(), 0);
  vertex_on_boundary.assign(nv, 0);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edge_triangles[e][1] == -1) {
      edge_on_boundary[e] = 1;
      vertex_on_boundary[edges[e][0]] = 1;
      vertex_on_boundary[edges[e][1]] = 1;
    }
  }
}

PolygonSpec regular_polygon(int n, double target_area, double phase) {
  PolygonSpec spec;
  spec.boundary.reserve(n);
  for (int j = 0; j < n; ++j) {
    double t = phase + 2.0 * M_PI * j / n;
    spec.boundary.emplace_back(std::cos(t), std::sin(t));
  }
  spec.target_area = target_area;
  return spec;
}

Mesh generate_polygon_mesh(const PolygonSpec& spec, int level) {
  if (spec.boundary.size() < 3)
    throw std::invalid_argument("generate_polygon_mesh: need at least 3 vertices");
  std::vector<Vec2> poly = spec.boundary;
  double sa = polygon_signed_area(poly);
  if (sa == 0.0) throw DegenerateMeshError("generate_polygon_mesh: zero-area polygon");
  if (sa < 0.0) {
    std::reverse(poly.begin(), poly.end());
    sa = -sa;
  }
  Vec2 c = polygon_centroid(poly, sa);
  if (spec.target_area) {
    double s = std::sqrt(*spec.target_area / sa);
    for (auto& p : poly) p = c + s * (p - c);
    sa = *spec.target_area;
  }

  Mesh m;
  m.vertices = poly;
  if (polygon_is_convex(poly)) {
    int ci = m.n_vertices();
    m.vertices.push_back(polygon_centroid(poly, sa));
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) m.triangles.push_back({i, (i + 1) % n, ci});
  } else {
    m.triangles = ear_clip(poly);
  }
  m.parent_triangle.assign(m.triangles.size(), -1);
  m.finalize();
  for (int l = 0; l < level; ++l) m = refine_uniform(m);
  return m;
}

Mesh generate_disk_mesh(double radius, int segments, int level) {
  if (segments < 3) throw std::invalid_argument("generate_disk_mesh: need at least 3 segments");
  if (radius <= 0.0) throw std::invalid_argument("generate_disk_mesh: radius must be positive");
  Mesh m;
  for (int j = 0; j < segments; ++j) {
    double t = 2.0 * M_PI * j / segments;
    m.vertices.emplace_back(radius * std::cos(t), radius * std::sin(t));
  }
  int ci = segments;
  m.vertices.emplace_back(0.0, 0.0);
  for (int i = 0; i < segments; ++i) m.triangles.push_back({i, (i + 1) % segments, ci});
  m.parent_triangle.assign(m.triangles.size(), -1);
  m.finalize();
  for (int l = 0; l < level; ++l) m = refine_uniform(m);
  return m;
}

Mesh refine_uniform(const Mesh& m) {
  Mesh out;
  out.vertices = m.vertices;
  out.vertices.resize(m.n_vertices() + m.n_edges());
  for (int e = 0; e < m.n_edges(); ++e)
    out.vertices[m.n_vertices() + e] =
        0.5 * (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]);

  out.triangles.reserve(4 * m.n_triangles());
  out.parent_triangle.reserve(4 * m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    // midpoint opposite local vertex j
    int m0 = m.n_vertices() + m.triangle_edges[t][0];
    int m1 = m.n_vertices() + m.triangle_edges[t][1];
    int m2 = m.n_vertices() + m.triangle_edges[t][2];
    out.triangles.push_back({tri[0], m2, m1});
    out.triangles.push_back({tri[1], m0, m2});
    out.triangles.push_back({tri[2], m1, m0});
    out.triangles.push_back({m2, m0, m1});
    for (int k = 0; k < 4; ++k) out.parent_triangle.push_back(t);
  }
  out.level = m.level + 1;
  out.finalize();
  return out;
}

bool deformation_is_admissible(const Mesh& m, const std::vector<Vec2>& displacement,
                               double scale, double q_min) {
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    Vec2 a = m.vertices[tri[0]] + scale * displacement[tri[0]];
    Vec2 b = m.vertices[tri[1]] + scale * displacement[tri[1]];
    Vec2 c = m.vertices[tri[2]] + scale * displacement[tri[2]];
    if (triangle_signed_area(a, b, c) <= q_min * m.areas[t]) return false;
  }
  return true;
}

Mesh deform_mesh(const Mesh& m, const std::vector<Vec2>& displacement, double scale,
                 double q_min) {
  if (displacement.size() != m.vertices.size())
    throw std::invalid_argument("deform_mesh: displacement size mismatch");
  if (!deformation_is_admissible(m, displacement, scale, q_min))
    throw DegenerateMeshError("deform_mesh: deformation collapses an element");
  Mesh out;
  out.vertices.resize(m.vertices.size());
  for (size_t v = 0; v < m.vertices.size(); ++v)
    out.vertices[v] = m.vertices[v] + scale * displacement[v];
  out.triangles = m.triangles;
  out.level = m.level;
  out.parent_triangle = m.parent_triangle;
  out.finalize();
  return out;
}

double min_angle_deg(const Mesh& m) {
  double worst = 180.0;
  for (const auto& tri : m.triangles) {
    for (int j = 0; j < 3; ++j) {
      Vec2 u = m.vertices[tri[(j + 1) % 3]] - m.vertices[tri[j]];
      Vec2 v = m.vertices[tri[(j + 2) % 3]] - m.vertices[tri[j]];
      double ang = std::atan2(std::abs(cross2(u, v)), u.dot(v)) * 180.0 / M_PI;
      worst = std::min(worst, ang);
    }
  }
  return worst;
}

std::vector<int> boundary_loop(const Mesh& m) {
  // CCW successor of each boundary vertex, read off the owning triangle.
  std::unordered_map<int, int> next;
  for (int t = 0; t < m.n_triangles(); ++t) {
    for (int j = 0; j < 3; ++j) {
      int e = m.triangle_edges[t][j];
      if (!m.edge_on_boundary[e]) continue;
      int a = m.triangles[t][(j + 1) % 3], b = m.triangles[t][(j + 2) % 3];
      next[a] = b;
    }
  }
  if (next.empty()) return {};
  int start = next.begin()->first;
  for (const auto& kv : next) start = std::min(start, kv.first);
  std::vector<int> loop;
  int v = start;
  do {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end()) throw DegenerateMeshError("boundary_loop: open boundary");
    v = it->second;
  } while (v != start && loop.size() <= next.size());
  if (v != start) throw DegenerateMeshError("boundary_loop: boundary is not a single loop");
  return loop;
}

}  // namespace shapetensor
