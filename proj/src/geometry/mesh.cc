#include "twinlight/geometry/mesh.h"

#include <cmath>
#include <numbers>
#include <string>

#include "twinlight/common/image.h"

namespace twinlight {

Aabb TriangleMesh::Bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.Extend(v);
  return box;
}

Aabb TriangleMesh::TriangleBounds(size_t t) const {
  Aabb box;
  for (uint32_t i : triangles[t]) box.Extend(vertices[i]);
  return box;
}

Vec3 TriangleMesh::FaceNormal(size_t t) const {
  const auto& tri = triangles[t];
  const Vec3& a = vertices[tri[0]];
  return (vertices[tri[1]] - a).cross(vertices[tri[2]] - a);
}

double TriangleMesh::Area(size_t t) const { return 0.5 * FaceNormal(t).norm(); }

void TriangleMesh::Append(const TriangleMesh& other) {
  const auto offset = static_cast<uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  normals.insert(normals.end(), other.normals.begin(), other.normals.end());
  albedo.insert(albedo.end(), other.albedo.begin(), other.albedo.end());
  triangles.reserve(triangles.size() + other.triangles.size());
  for (const auto& t : other.triangles) {
    triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  }
}

void ValidateMesh(const TriangleMesh& mesh) {
  const size_t n = mesh.vertices.size();
  Require(mesh.normals.size() == n && mesh.albedo.size() == n,
          "mesh attribute arrays must match vertex count");
  for (size_t i = 0; i < n; ++i) {
    Require(mesh.vertices[i].allFinite(),
            "vertex " + std::to_string(i) + " has a non-finite coordinate");
    Require(std::abs(mesh.normals[i].norm() - 1.0) <= 1e-4,
            "normal " + std::to_string(i) + " is not unit length");
    const Vec3& a = mesh.albedo[i];
    Require(a.allFinite() && (a.array() >= 0.0).all() && (a.array() <= 1.0).all(),
            "albedo " + std::to_string(i) + " outside [0,1]");
  }
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (uint32_t idx : mesh.triangles[t]) {
      Require(idx < n, "triangle " + std::to_string(t) +
                           " references out-of-range vertex " +
                           std::to_string(idx));
    }
  }
}

void ComputeVertexNormals(TriangleMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 fn = mesh.FaceNormal(t);
    for (uint32_t i : mesh.triangles[t]) mesh.normals[i] += fn;
  }
  for (auto& n : mesh.normals) {
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
}

void SetUniformAlbedo(TriangleMesh& mesh, const Vec3& albedo) {
  mesh.albedo.assign(mesh.vertices.size(), albedo);
}

TriangleMesh MakeUvSphere(const Vec3& center, double radius, int slices,
                          int stacks) {
  Require(slices >= 3 && stacks >= 2, "sphere needs slices>=3, stacks>=2");
  TriangleMesh mesh;
  const double pi = std::numbers::pi;
  mesh.vertices.push_back(center + Vec3(0, 0, radius));
  mesh.normals.push_back(Vec3::UnitZ());
  for (int i = 1; i < stacks; ++i) {
    const double theta = pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * pi * j / slices;
      const Vec3 n(std::sin(theta) * std::cos(phi),
                   std::sin(theta) * std::sin(phi), std::cos(theta));
      mesh.vertices.push_back(center + radius * n);
      mesh.normals.push_back(n);
    }
  }
  mesh.vertices.push_back(center - Vec3(0, 0, radius));
  mesh.normals.push_back(-Vec3::UnitZ());
  const auto ring = [&](int i, int j) {
    return static_cast<uint32_t>(1 + (i - 1) * slices + ((j % slices) + slices) % slices);
  };
  const auto south = static_cast<uint32_t>(mesh.vertices.size() - 1);
  for (int j = 0; j < slices; ++j) {
    mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  }
  for (int i = 1; i < stacks - 1; ++i) {
    for (int j = 0; j < slices; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < slices; ++j) {
    mesh.triangles.push_back({ring(stacks - 1, j), south, ring(stacks - 1, j + 1)});
  }
  SetUniformAlbedo(mesh, Vec3::Constant(0.5));
  return mesh;
}

TriangleMesh MakeQuad(const Vec3& c, const Vec3& a, const Vec3& b) {
  TriangleMesh mesh;
  const Vec3 n = a.cross(b).normalized();
  mesh.vertices = {c, c + a, c + a + b, c + b};
  mesh.normals.assign(4, n);
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  SetUniformAlbedo(mesh, Vec3::Constant(0.5));
  return mesh;
}

TriangleMesh MakeBox(const Vec3& lo, const Vec3& hi) {
  const Vec3 e = hi - lo;
  const Vec3 ex(e.x(), 0, 0), ey(0, e.y(), 0), ez(0, 0, e.z());
  TriangleMesh mesh;
  mesh.Append(MakeQuad(lo, ey, ex));                       // bottom, -z
  mesh.Append(MakeQuad(lo + ez, ex, ey));                  // top, +z
  mesh.Append(MakeQuad(lo, ex, ez));                       // front, -y
  mesh.Append(MakeQuad(lo + ey, ez, ex));                  // back, +y
  mesh.Append(MakeQuad(lo, ez, ey));                       // left, -x
  mesh.Append(MakeQuad(lo + ex, ey, ez));                  // right, +x
  return mesh;
}

TriangleMesh MakeInvertedBox(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh = MakeBox(lo, hi);
  for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  for (auto& n : mesh.normals) n = -n;
  return mesh;
}

TriangleMesh MakeGridPlane(double x0, double y0, double x1, double y1, double z,
                           int nx, int ny) {
  Require(nx >= 1 && ny >= 1, "grid plane needs at least one cell");
  TriangleMesh mesh;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny, z);
      mesh.normals.push_back(Vec3::UnitZ());
    }
  }
  const auto id = [&](int i, int j) { return static_cast<uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  SetUniformAlbedo(mesh, Vec3::Constant(0.5));
  return mesh;
}

}  // namespace twinlight
