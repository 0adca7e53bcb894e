#ifndef TWINLIGHT_GEOMETRY_SDF_GRID_H_
#define TWINLIGHT_GEOMETRY_SDF_GRID_H_

#include <array>
#include <functional>
#include <vector>

#include "twinlight/geometry/mesh.h"

namespace twinlight {

// Signed distance samples on a regular lattice of nodes spanning `bounds`.
// resolution[a] is the node count along axis a (>= 2); node (i,j,k) sits at
// bounds.lo + (i*h.x, j*h.y, k*h.z) with h = extent / (resolution - 1).
// Negative is inside. A node value of exactly 0 counts as inside.
class SdfGrid {
 public:
  SdfGrid() = default;
  SdfGrid(const Aabb& bounds, std::array<int, 3> resolution, double fill = 0.0);

  // Samples `fn` at every node.
  static SdfGrid FromFunction(const Aabb& bounds, std::array<int, 3> resolution,
                              const std::function<double(const Vec3&)>& fn);

  const Aabb& bounds() const { return bounds_; }
  const std::array<int, 3>& resolution() const { return resolution_; }
  const Vec3& spacing() const { return spacing_; }
  size_t NodeCount() const { return values_.size(); }

  size_t Index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * resolution_[1] + j) * resolution_[0] + i;
  }
  double& at(int i, int j, int k) { return values_[Index(i, j, k)]; }
  double at(int i, int j, int k) const { return values_[Index(i, j, k)]; }
  Vec3 NodePosition(int i, int j, int k) const {
    return bounds_.lo + Vec3(i * spacing_.x(), j * spacing_.y(), k * spacing_.z());
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Trilinear interpolation; defined on the closed bounds (points outside are
  // clamped onto the boundary).
  double Sample(const Vec3& p) const;

  // The 8 corner node indices and trilinear weights for p (clamped).
  struct Stencil {
    std::array<size_t, 8> nodes;
    std::array<double, 8> weights;
  };
  Stencil TrilinearStencil(const Vec3& p) const;

  // Analytic gradient of the trilinear interpolant at p.
  Vec3 SampleGradient(const Vec3& p) const;

  // Central-difference gradient at a node; one-sided at the boundary.
  Vec3 NodeGradient(int i, int j, int k) const;

 private:
  Aabb bounds_;
  std::array<int, 3> resolution_{2, 2, 2};
  Vec3 spacing_ = Vec3::Ones();
  std::vector<double> values_;
};

// Throws PreconditionError if resolution < 2 on any axis, bounds are
// degenerate, or any value is non-finite.
void ValidateSdfGrid(const SdfGrid& grid);

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_SDF_GRID_H_
