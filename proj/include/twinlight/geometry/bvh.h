#ifndef TWINLIGHT_GEOMETRY_BVH_H_
#define TWINLIGHT_GEOMETRY_BVH_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "twinlight/geometry/mesh.h"

namespace twinlight {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length within 1e-6
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
};

// Throws PreconditionError unless the direction is unit and t_min < t_max.
void ValidateRay(const Ray& ray);

struct Hit {
  double t = 0.0;
  uint32_t triangle = 0;
  // Barycentric weights of vertices 1 and 2; vertex 0 gets 1 - b1 - b2.
  double b1 = 0.0;
  double b2 = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // interpolated vertex normal, unit
  Vec3 albedo = Vec3::Zero();   // interpolated k_d
};

struct BvhNode {
  Aabb bounds;
  // Leaf: primitives [first, first + count) of Bvh::primitives().
  // Interior: count == 0, children at `first` and `first + 1`.
  uint32_t first = 0;
  uint32_t count = 0;
  bool IsLeaf() const { return count > 0; }
};

// Bounding-volume hierarchy over a mesh's triangles, built with a binned
// surface-area heuristic (32 bins per axis). The build is single-threaded and
// fully deterministic. The Bvh does not own the mesh; the same mesh must be
// passed to every query.
class Bvh {
 public:
  Bvh() = default;
  static Bvh Build(const TriangleMesh& mesh);

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<uint32_t>& primitives() const { return primitives_; }
  bool empty() const { return primitives_.empty(); }

 private:
  std::vector<BvhNode> nodes_;
  std::vector<uint32_t> primitives_;
};

// Nearest hit with t in [t_min, t_max]. Equal-t ties resolve to the lowest
// triangle index, so the result never depends on tree layout.
std::optional<Hit> Intersect(const Bvh& bvh, const TriangleMesh& mesh,
                             const Ray& ray);

// True iff Intersect would return a hit; stops at the first one found.
bool Occluded(const Bvh& bvh, const TriangleMesh& mesh, const Ray& ray);

// Reference all-triangle scan used as a test oracle and for tiny meshes.
std::optional<Hit> IntersectBruteForce(const TriangleMesh& mesh, const Ray& ray);

// Ray-triangle test (Moller-Trumbore). Returns t and barycentrics on success.
bool IntersectTriangle(const TriangleMesh& mesh, uint32_t tri, const Ray& ray,
                       double& t, double& b1, double& b2);

// Fills position/normal/albedo of a hit from its barycentrics.
void FinishHit(const TriangleMesh& mesh, const Ray& ray, Hit& hit);

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_BVH_H_
