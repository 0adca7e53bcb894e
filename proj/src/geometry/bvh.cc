#include "twinlight/geometry/bvh.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "twinlight/common/image.h"

namespace twinlight {
namespace {

constexpr int kBins = 32;
constexpr uint32_t kMaxLeafSize = 4;
constexpr uint32_t kForceSplitSize = 16;
constexpr int kMaxSahDepth = 64;
constexpr double kTraversalCost = 1.0;
constexpr double kIntersectCost = 1.0;

struct BuildItem {
  Aabb bounds;
  Vec3 centroid;
};

class Builder {
 public:
  explicit Builder(const TriangleMesh& mesh) {
    items_.resize(mesh.TriangleCount());
    for (size_t t = 0; t < items_.size(); ++t) {
      items_[t].bounds = mesh.TriangleBounds(t);
      items_[t].centroid = items_[t].bounds.Center();
    }
  }

  void Run(std::vector<BvhNode>& nodes, std::vector<uint32_t>& prims) {
    prims.resize(items_.size());
    for (size_t i = 0; i < prims.size(); ++i) prims[i] = static_cast<uint32_t>(i);
    if (prims.empty()) return;
    nodes.reserve(2 * prims.size());
    nodes.push_back({});
    Split(nodes, prims, 0, 0, static_cast<uint32_t>(prims.size()), 0);
  }

 private:
  void Split(std::vector<BvhNode>& nodes, std::vector<uint32_t>& prims,
             size_t node_index, uint32_t first, uint32_t count, int depth) {
    Aabb bounds, centroid_bounds;
    for (uint32_t i = first; i < first + count; ++i) {
      bounds.Extend(items_[prims[i]].bounds);
      centroid_bounds.Extend(items_[prims[i]].centroid);
    }
    nodes[node_index].bounds = bounds;

    auto make_leaf = [&] {
      nodes[node_index].first = first;
      nodes[node_index].count = count;
    };
    if (count <= kMaxLeafSize) return make_leaf();

    int best_axis = -1;
    int best_bin = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    const Vec3 cext = centroid_bounds.Extent();
    for (int axis = 0; axis < 3; ++axis) {
      if (!(cext[axis] > 0.0)) continue;
      std::array<Aabb, kBins> bin_bounds;
      std::array<uint32_t, kBins> bin_count{};
      const double scale = kBins / cext[axis];
      for (uint32_t i = first; i < first + count; ++i) {
        const int b = BinOf(items_[prims[i]].centroid[axis], centroid_bounds.lo[axis], scale);
        bin_bounds[b].Extend(items_[prims[i]].bounds);
        ++bin_count[b];
      }
      std::array<double, kBins> right_area{};
      std::array<uint32_t, kBins> right_count{};
      Aabb acc;
      uint32_t n = 0;
      for (int b = kBins - 1; b > 0; --b) {
        acc.Extend(bin_bounds[b]);
        n += bin_count[b];
        right_area[b] = acc.SurfaceArea();
        right_count[b] = n;
      }
      acc = Aabb();
      n = 0;
      for (int b = 0; b < kBins - 1; ++b) {
        acc.Extend(bin_bounds[b]);
        n += bin_count[b];
        if (n == 0 || right_count[b + 1] == 0) continue;
        const double cost = acc.SurfaceArea() * n + right_area[b + 1] * right_count[b + 1];
        if (cost < best_cost) {
          best_cost = cost;
          best_axis = axis;
          best_bin = b;
        }
      }
    }

    const double parent_area = bounds.SurfaceArea();
    const double leaf_cost = kIntersectCost * count;
    const double split_cost =
        parent_area > 0.0 ? kTraversalCost + kIntersectCost * best_cost / parent_area
                          : std::numeric_limits<double>::infinity();

    uint32_t mid = 0;
    if (depth >= kMaxSahDepth) {
      // Keeps traversal stacks bounded on pathological inputs.
      mid = first + count / 2;
    } else if (best_axis >= 0 && (split_cost < leaf_cost || count > kForceSplitSize)) {
      const double scale = kBins / cext[best_axis];
      const double lo = centroid_bounds.lo[best_axis];
      auto it = std::stable_partition(
          prims.begin() + first, prims.begin() + first + count, [&](uint32_t p) {
            return BinOf(items_[p].centroid[best_axis], lo, scale) <= best_bin;
          });
      mid = static_cast<uint32_t>(it - prims.begin());
    } else if (count > kForceSplitSize) {
      // All centroids coincide: split the index range in half.
      mid = first + count / 2;
    } else {
      return make_leaf();
    }

    const auto left = static_cast<uint32_t>(nodes.size());
    nodes.push_back({});
    nodes.push_back({});
    nodes[node_index].first = left;
    nodes[node_index].count = 0;
    Split(nodes, prims, left, first, mid - first, depth + 1);
    Split(nodes, prims, left + 1, mid, first + count - mid, depth + 1);
  }

  static int BinOf(double c, double lo, double scale) {
    const int b = static_cast<int>((c - lo) * scale);
    return std::clamp(b, 0, kBins - 1);
  }

  std::vector<BuildItem> items_;
};

// Slab test; NaN slab distances (origin on a slab plane with a zero
// direction component) are ignored by argument order of min/max.
bool HitsBox(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
             double t_min, double t_max, double& t_entry) {
  double t0 = t_min;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double near = (box.lo[a] - origin[a]) * inv_dir[a];
    double far = (box.hi[a] - origin[a]) * inv_dir[a];
    if (near > far) std::swap(near, far);
    far *= 1.0 + 1e-9;
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return false;
  }
  t_entry = t0;
  return true;
}

template <bool kAnyHit>
bool Traverse(const Bvh& bvh, const TriangleMesh& mesh, const Ray& ray, Hit* best) {
  if (bvh.empty()) return false;
  const Vec3 inv(1.0 / ray.direction.x(), 1.0 / ray.direction.y(),
                 1.0 / ray.direction.z());
  const auto& nodes = bvh.nodes();
  const auto& prims = bvh.primitives();
  double best_t = std::numeric_limits<double>::infinity();
  uint32_t best_tri = std::numeric_limits<uint32_t>::max();
  double best_b1 = 0.0, best_b2 = 0.0;
  bool found = false;

  uint32_t stack[192];
  int sp = 0;
  double entry = 0.0;
  if (!HitsBox(nodes[0].bounds, ray.origin, inv, ray.t_min, ray.t_max, entry)) return false;
  stack[sp++] = 0;
  while (sp > 0) {
    const BvhNode& node = nodes[stack[--sp]];
    if (node.IsLeaf()) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        double t, b1, b2;
        const uint32_t tri = prims[i];
        if (!IntersectTriangle(mesh, tri, ray, t, b1, b2)) continue;
        if constexpr (kAnyHit) return true;
        if (t < best_t || (t == best_t && tri < best_tri)) {
          best_t = t;
          best_tri = tri;
          best_b1 = b1;
          best_b2 = b2;
          found = true;
        }
      }
      continue;
    }
    const double limit = found ? best_t : ray.t_max;
    double e0 = 0.0, e1 = 0.0;
    const bool h0 = HitsBox(nodes[node.first].bounds, ray.origin, inv, ray.t_min, limit, e0);
    const bool h1 = HitsBox(nodes[node.first + 1].bounds, ray.origin, inv, ray.t_min, limit, e1);
    if (h0 && h1) {
      // Push the farther child first so the nearer one is visited next.
      if (e0 <= e1) {
        stack[sp++] = node.first + 1;
        stack[sp++] = node.first;
      } else {
        stack[sp++] = node.first;
        stack[sp++] = node.first + 1;
      }
    } else if (h0) {
      stack[sp++] = node.first;
    } else if (h1) {
      stack[sp++] = node.first + 1;
    }
  }
  if (found && best != nullptr) {
    best->t = best_t;
    best->triangle = best_tri;
    best->b1 = best_b1;
    best->b2 = best_b2;
  }
  return found;
}

}  // namespace

void ValidateRay(const Ray& ray) {
  Require(ray.origin.allFinite(), "ray origin must be finite");
  Require(std::abs(ray.direction.norm() - 1.0) <= 1e-6,
          "ray direction must be unit length");
  Require(ray.t_min < ray.t_max, "ray requires t_min < t_max");
}

Bvh Bvh::Build(const TriangleMesh& mesh) {
  Bvh bvh;
  Builder(mesh).Run(bvh.nodes_, bvh.primitives_);
  return bvh;
}

bool IntersectTriangle(const TriangleMesh& mesh, uint32_t tri, const Ray& ray,
                       double& t, double& b1, double& b2) {
  const auto& idx = mesh.triangles[tri];
  const Vec3& p0 = mesh.vertices[idx[0]];
  const Vec3 e1 = mesh.vertices[idx[1]] - p0;
  const Vec3 e2 = mesh.vertices[idx[2]] - p0;
  const Vec3 pvec = ray.direction.cross(e2);
  const double det = e1.dot(pvec);
  if (det == 0.0 || !std::isfinite(det)) return false;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = ray.origin - p0;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qvec = tvec.cross(e1);
  const double v = ray.direction.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return false;
  const double tt = e2.dot(qvec) * inv_det;
  if (!(tt >= ray.t_min && tt <= ray.t_max)) return false;
  t = tt;
  b1 = u;
  b2 = v;
  return true;
}

void FinishHit(const TriangleMesh& mesh, const Ray& ray, Hit& hit) {
  const auto& idx = mesh.triangles[hit.triangle];
  const double b0 = 1.0 - hit.b1 - hit.b2;
  hit.position = ray.origin + hit.t * ray.direction;
  Vec3 n = b0 * mesh.normals[idx[0]] + hit.b1 * mesh.normals[idx[1]] +
           hit.b2 * mesh.normals[idx[2]];
  const double len = n.norm();
  if (len > 1e-12) {
    hit.normal = n / len;
  } else {
    const Vec3 fn = mesh.FaceNormal(hit.triangle);
    hit.normal = fn.norm() > 0.0 ? Vec3(fn.normalized()) : Vec3::UnitZ();
  }
  hit.albedo = b0 * mesh.albedo[idx[0]] + hit.b1 * mesh.albedo[idx[1]] +
               hit.b2 * mesh.albedo[idx[2]];
}

std::optional<Hit> Intersect(const Bvh& bvh, const TriangleMesh& mesh,
                             const Ray& ray) {
  Hit hit;
  if (!Traverse<false>(bvh, mesh, ray, &hit)) return std::nullopt;
  FinishHit(mesh, ray, hit);
  return hit;
}

bool Occluded(const Bvh& bvh, const TriangleMesh& mesh, const Ray& ray) {
  return Traverse<true>(bvh, mesh, ray, nullptr);
}

std::optional<Hit> IntersectBruteForce(const TriangleMesh& mesh, const Ray& ray) {
  Hit best;
  bool found = false;
  for (uint32_t tri = 0; tri < mesh.TriangleCount(); ++tri) {
    double t, b1, b2;
    if (!IntersectTriangle(mesh, tri, ray, t, b1, b2)) continue;
    if (!found || t < best.t) {
      best.t = t;
      best.triangle = tri;
      best.b1 = b1;
      best.b2 = b2;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  FinishHit(mesh, ray, best);
  return best;
}

}  // namespace twinlight
