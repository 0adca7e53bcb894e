#include "twinlight/geometry/decimate.h"

#include <algorithm>
#include <map>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "twinlight/common/image.h"

namespace twinlight {
namespace {

using Quadric = Eigen::Matrix4d;

Quadric PlaneQuadric(const Vec3& n, const Vec3& p, double weight) {
  Eigen::Vector4d plane(n.x(), n.y(), n.z(), -n.dot(p));
  return weight * plane * plane.transpose();
}

double QuadricError(const Quadric& q, const Vec3& x) {
  const Eigen::Vector4d h(x.x(), x.y(), x.z(), 1.0);
  return std::max(0.0, h.dot(q * h));
}

struct Candidate {
  double cost;
  uint32_t u;  // survivor
  uint32_t v;  // removed
  uint32_t stamp_u;
  uint32_t stamp_v;
  Vec3 position;

  // Min-heap order with a deterministic tie-break on vertex ids.
  bool operator>(const Candidate& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (u != o.u) return u > o.u;
    return v > o.v;
  }
};

class Collapser {
 public:
  Collapser(const TriangleMesh& mesh, const DecimateOptions& options)
      : mesh_(mesh),
        options_(options),
        quadric_(mesh.VertexCount(), Quadric::Zero()),
        vertex_tris_(mesh.VertexCount()),
        stamp_(mesh.VertexCount(), 0),
        alive_vertex_(mesh.VertexCount(), true),
        alive_tri_(mesh.TriangleCount(), true),
        live_tris_(mesh.TriangleCount()) {
    for (uint32_t t = 0; t < mesh_.TriangleCount(); ++t) {
      for (uint32_t i : mesh_.triangles[t]) vertex_tris_[i].push_back(t);
      const Vec3 fn = mesh_.FaceNormal(t);
      const double len = fn.norm();
      if (len <= 0.0) continue;  // zero-area faces contribute no plane
      const Quadric q = PlaneQuadric(fn / len, mesh_.vertices[mesh_.triangles[t][0]], 0.5 * len);
      for (uint32_t i : mesh_.triangles[t]) quadric_[i] += q;
    }
    AddBoundaryConstraints();
  }

  void Run(size_t target) {
    std::map<std::pair<uint32_t, uint32_t>, bool> seen;
    for (uint32_t t = 0; t < mesh_.TriangleCount(); ++t) {
      const auto& tri = mesh_.triangles[t];
      for (int e = 0; e < 3; ++e) {
        uint32_t a = tri[e], b = tri[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        if (a == b || !seen.emplace(std::make_pair(a, b), true).second) continue;
        Push(a, b);
      }
    }
    while (live_tris_ > target && !heap_.empty()) {
      const Candidate c = heap_.top();
      heap_.pop();
      if (!alive_vertex_[c.u] || !alive_vertex_[c.v]) continue;
      if (stamp_[c.u] != c.stamp_u || stamp_[c.v] != c.stamp_v) continue;
      if (!CanCollapse(c.u, c.v, c.position)) continue;
      Collapse(c);
    }
  }

  TriangleMesh Compact() const {
    TriangleMesh out;
    std::vector<uint32_t> remap(mesh_.VertexCount(), UINT32_MAX);
    for (uint32_t t = 0; t < mesh_.TriangleCount(); ++t) {
      if (!alive_tri_[t]) continue;
      Triangle tri = mesh_.triangles[t];
      for (auto& i : tri) {
        if (remap[i] == UINT32_MAX) {
          remap[i] = static_cast<uint32_t>(out.vertices.size());
          out.vertices.push_back(mesh_.vertices[i]);
          out.normals.push_back(mesh_.normals[i]);
          out.albedo.push_back(mesh_.albedo[i]);
        }
        i = remap[i];
      }
      out.triangles.push_back(tri);
    }
    return out;
  }

 private:
  void AddBoundaryConstraints() {
    std::map<std::pair<uint32_t, uint32_t>, std::vector<uint32_t>> edge_faces;
    for (uint32_t t = 0; t < mesh_.TriangleCount(); ++t) {
      const auto& tri = mesh_.triangles[t];
      for (int e = 0; e < 3; ++e) {
        const uint32_t a = tri[e], b = tri[(e + 1) % 3];
        edge_faces[{std::min(a, b), std::max(a, b)}].push_back(t);
      }
    }
    for (const auto& [edge, faces] : edge_faces) {
      if (faces.size() != 1) continue;
      const Vec3& pa = mesh_.vertices[edge.first];
      const Vec3& pb = mesh_.vertices[edge.second];
      const Vec3 fn = mesh_.FaceNormal(faces[0]);
      const Vec3 dir = pb - pa;
      Vec3 n = dir.cross(fn);
      const double len = n.norm();
      if (len <= 0.0) continue;
      const Quadric q = PlaneQuadric(n / len, pa, options_.boundary_weight * dir.squaredNorm());
      quadric_[edge.first] += q;
      quadric_[edge.second] += q;
    }
  }

  void Push(uint32_t a, uint32_t b) {
    const Quadric q = quadric_[a] + quadric_[b];
    const Vec3& pa = mesh_.vertices[a];
    const Vec3& pb = mesh_.vertices[b];
    const double ea = QuadricError(q, pa);
    const double eb = QuadricError(q, pb);
    Vec3 best = ea <= eb ? pa : pb;
    double cost = std::min(ea, eb);

    const Eigen::Matrix3d m = q.topLeftCorner<3, 3>();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    lu.setThreshold(1e-8);
    if (lu.isInvertible()) {
      const Vec3 x = lu.solve(-q.topRightCorner<3, 1>());
      const double reach = 2.0 * (pa - pb).norm();
      if (x.allFinite() && (x - 0.5 * (pa + pb)).norm() <= reach) {
        const double ex = QuadricError(q, x);
        if (ex < cost) {
          cost = ex;
          best = x;
        }
      }
    }
    // The endpoint nearer the placement survives and keeps its attributes.
    uint32_t u = a, v = b;
    if ((best - pb).squaredNorm() < (best - pa).squaredNorm()) std::swap(u, v);
    heap_.push({cost, u, v, stamp_[u], stamp_[v], best});
  }

  std::vector<uint32_t> LiveTris(uint32_t v) {
    auto& list = vertex_tris_[v];
    list.erase(std::remove_if(list.begin(), list.end(),
                              [&](uint32_t t) { return !alive_tri_[t]; }),
               list.end());
    return list;
  }

  std::vector<uint32_t> Neighbours(uint32_t v) {
    std::vector<uint32_t> out;
    for (uint32_t t : LiveTris(v)) {
      for (uint32_t i : mesh_.triangles[t]) {
        if (i != v) out.push_back(i);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool IsBoundaryEdge(uint32_t a, uint32_t b) {
    int shared = 0;
    for (uint32_t t : LiveTris(a)) {
      const auto& tri = mesh_.triangles[t];
      if (tri[0] == b || tri[1] == b || tri[2] == b) ++shared;
    }
    return shared == 1;
  }

  bool IsBoundaryVertex(uint32_t v) {
    for (uint32_t w : Neighbours(v)) {
      if (IsBoundaryEdge(v, w)) return true;
    }
    return false;
  }

  bool CanCollapse(uint32_t u, uint32_t v, const Vec3& x) {
    // Link condition: common neighbours must be exactly the apexes of the
    // faces sharing the edge.
    const auto nu = Neighbours(u);
    const auto nv = Neighbours(v);
    std::vector<uint32_t> common;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(),
                          std::back_inserter(common));
    std::vector<uint32_t> apexes;
    for (uint32_t t : LiveTris(u)) {
      const auto& tri = mesh_.triangles[t];
      if (tri[0] != v && tri[1] != v && tri[2] != v) continue;
      for (uint32_t i : tri) {
        if (i != u && i != v) apexes.push_back(i);
      }
    }
    std::sort(apexes.begin(), apexes.end());
    apexes.erase(std::unique(apexes.begin(), apexes.end()), apexes.end());
    if (apexes.empty() || common != apexes) return false;

    if (!IsBoundaryEdge(u, v) && IsBoundaryVertex(u) && IsBoundaryVertex(v)) return false;

    for (uint32_t moved : {u, v}) {
      for (uint32_t t : LiveTris(moved)) {
        const auto& tri = mesh_.triangles[t];
        const bool has_u = tri[0] == u || tri[1] == u || tri[2] == u;
        const bool has_v = tri[0] == v || tri[1] == v || tri[2] == v;
        if (has_u && has_v) continue;  // removed by the collapse
        Vec3 p[3];
        for (int k = 0; k < 3; ++k) {
          p[k] = (tri[k] == u || tri[k] == v) ? x : mesh_.vertices[tri[k]];
        }
        const Vec3 before = mesh_.FaceNormal(t);
        const Vec3 after = (p[1] - p[0]).cross(p[2] - p[0]);
        if (before.squaredNorm() > 0.0 && before.dot(after) <= 0.0) return false;
      }
    }
    return true;
  }

  void Collapse(const Candidate& c) {
    const uint32_t u = c.u, v = c.v;
    for (uint32_t t : LiveTris(v)) {
      auto& tri = mesh_.triangles[t];
      if (tri[0] == u || tri[1] == u || tri[2] == u) {
        alive_tri_[t] = false;
        --live_tris_;
        continue;
      }
      for (auto& i : tri) {
        if (i == v) i = u;
      }
      vertex_tris_[u].push_back(t);
    }
    vertex_tris_[v].clear();
    alive_vertex_[v] = false;
    mesh_.vertices[u] = c.position;
    quadric_[u] += quadric_[v];
    ++stamp_[u];
    for (uint32_t w : Neighbours(u)) {
      Push(std::min(u, w), std::max(u, w));
    }
  }

  TriangleMesh mesh_;
  DecimateOptions options_;
  std::vector<Quadric> quadric_;
  std::vector<std::vector<uint32_t>> vertex_tris_;
  std::vector<uint32_t> stamp_;
  std::vector<bool> alive_vertex_;
  std::vector<bool> alive_tri_;
  size_t live_tris_;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> heap_;
};

}  // namespace

TriangleMesh Decimate(const TriangleMesh& mesh, size_t target_triangles,
                      const DecimateOptions& options) {
  Require(target_triangles >= 4, "decimation target must be >= 4 triangles");
  ValidateMesh(mesh);
  if (mesh.TriangleCount() <= target_triangles) return mesh;
  Collapser collapser(mesh, options);
  collapser.Run(target_triangles);
  return collapser.Compact();
}

}  // namespace twinlight
