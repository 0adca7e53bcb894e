#ifndef TWINLIGHT_GEOMETRY_MESH_H_
#define TWINLIGHT_GEOMETRY_MESH_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "twinlight/common/vec.h"

namespace twinlight {

using Triangle = std::array<uint32_t, 3>;

// World frame throughout: right-handed, +x east, +y north, +z up; meters.
struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool Empty() const { return (lo.array() > hi.array()).any(); }
  void Extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void Extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec3 Center() const { return 0.5 * (lo + hi); }
  Vec3 Extent() const { return hi - lo; }
  double Diagonal() const { return Empty() ? 0.0 : Extent().norm(); }
  double SurfaceArea() const {
    if (Empty()) return 0.0;
    const Vec3 e = Extent();
    return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
  }
  bool Contains(const Aabb& b, double tol = 0.0) const {
    return (b.lo.array() >= lo.array() - tol).all() &&
           (b.hi.array() <= hi.array() + tol).all();
  }
  bool Contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() &&
           (p.array() <= hi.array() + tol).all();
  }
};

// Indexed triangle mesh with per-vertex unit normal and linear-RGB diffuse
// albedo k_d in [0,1]^3.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<Vec3> albedo;
  std::vector<Triangle> triangles;

  size_t VertexCount() const { return vertices.size(); }
  size_t TriangleCount() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }

  Aabb Bounds() const;
  Aabb TriangleBounds(size_t t) const;
  Vec3 FaceNormal(size_t t) const;  // unnormalised, length = 2*area
  double Area(size_t t) const;

  // Appends `other`, offsetting its indices.
  void Append(const TriangleMesh& other);
};

// Throws PreconditionError describing the first violated invariant: finite
// coordinates, indices in range, unit normals (1e-4), albedo in [0,1].
void ValidateMesh(const TriangleMesh& mesh);

// Recomputes vertex normals as area-weighted face-normal averages; isolated
// vertices get +z.
void ComputeVertexNormals(TriangleMesh& mesh);

// Test and fixture shapes. All get uniform albedo 0.5 unless set by caller.
TriangleMesh MakeUvSphere(const Vec3& center, double radius, int slices,
                          int stacks);
// Closed axis-aligned box with outward normals (flat-shaded, 24 vertices).
TriangleMesh MakeBox(const Vec3& lo, const Vec3& hi);
// Same box with inward-facing normals/winding (for enclosure tests).
TriangleMesh MakeInvertedBox(const Vec3& lo, const Vec3& hi);
// Grid of (nx x ny) quads spanning [lo.x,hi.x] x [lo.y,hi.y] at height z,
// normal +z.
TriangleMesh MakeGridPlane(double x0, double y0, double x1, double y1, double z,
                           int nx, int ny);
// Quad with corners c, c+a, c+a+b, c+b; normal = normalize(a x b).
TriangleMesh MakeQuad(const Vec3& c, const Vec3& a, const Vec3& b);

void SetUniformAlbedo(TriangleMesh& mesh, const Vec3& albedo);

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_MESH_H_
