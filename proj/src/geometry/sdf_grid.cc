#include "twinlight/geometry/sdf_grid.h"

#include <algorithm>
#include <cmath>

#include "twinlight/common/image.h"

namespace twinlight {

SdfGrid::SdfGrid(const Aabb& bounds, std::array<int, 3> resolution, double fill)
    : bounds_(bounds), resolution_(resolution) {
  Require(resolution[0] >= 2 && resolution[1] >= 2 && resolution[2] >= 2,
          "SDF grid resolution must be >= 2 per axis");
  Require(!bounds.Empty() && (bounds.Extent().array() > 0.0).all(),
          "SDF grid bounds must have positive extent");
  for (int a = 0; a < 3; ++a) spacing_[a] = bounds.Extent()[a] / (resolution[a] - 1);
  values_.assign(static_cast<size_t>(resolution[0]) * resolution[1] * resolution[2], fill);
}

SdfGrid SdfGrid::FromFunction(const Aabb& bounds, std::array<int, 3> resolution,
                              const std::function<double(const Vec3&)>& fn) {
  SdfGrid grid(bounds, resolution);
  for (int k = 0; k < resolution[2]; ++k) {
    for (int j = 0; j < resolution[1]; ++j) {
      for (int i = 0; i < resolution[0]; ++i) {
        grid.at(i, j, k) = fn(grid.NodePosition(i, j, k));
      }
    }
  }
  return grid;
}

SdfGrid::Stencil SdfGrid::TrilinearStencil(const Vec3& p) const {
  int cell[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double g = std::clamp((p[a] - bounds_.lo[a]) / spacing_[a], 0.0,
                                static_cast<double>(resolution_[a] - 1));
    int c = static_cast<int>(std::floor(g));
    c = std::min(c, resolution_[a] - 2);
    cell[a] = c;
    frac[a] = g - c;
  }
  Stencil s;
  int n = 0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        s.nodes[n] = Index(cell[0] + dx, cell[1] + dy, cell[2] + dz);
        s.weights[n] = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                       (dz ? frac[2] : 1.0 - frac[2]);
        ++n;
      }
    }
  }
  return s;
}

double SdfGrid::Sample(const Vec3& p) const {
  const Stencil s = TrilinearStencil(p);
  double v = 0.0;
  for (int n = 0; n < 8; ++n) v += s.weights[n] * values_[s.nodes[n]];
  return v;
}

Vec3 SdfGrid::SampleGradient(const Vec3& p) const {
  int cell[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const double g = std::clamp((p[a] - bounds_.lo[a]) / spacing_[a], 0.0,
                                static_cast<double>(resolution_[a] - 1));
    int c = std::min(static_cast<int>(std::floor(g)), resolution_[a] - 2);
    cell[a] = c;
    f[a] = g - c;
  }
  double v[2][2][2];
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        v[dx][dy][dz] = at(cell[0] + dx, cell[1] + dy, cell[2] + dz);
  auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
  Vec3 grad;
  // d/dx: difference of the x-faces, bilinear in (y, z).
  grad.x() = lerp(lerp(v[1][0][0] - v[0][0][0], v[1][1][0] - v[0][1][0], f[1]),
                  lerp(v[1][0][1] - v[0][0][1], v[1][1][1] - v[0][1][1], f[1]), f[2]) /
             spacing_.x();
  grad.y() = lerp(lerp(v[0][1][0] - v[0][0][0], v[1][1][0] - v[1][0][0], f[0]),
                  lerp(v[0][1][1] - v[0][0][1], v[1][1][1] - v[1][0][1], f[0]), f[2]) /
             spacing_.y();
  grad.z() = lerp(lerp(v[0][0][1] - v[0][0][0], v[1][0][1] - v[1][0][0], f[0]),
                  lerp(v[0][1][1] - v[0][1][0], v[1][1][1] - v[1][1][0], f[0]), f[1]) /
             spacing_.z();
  return grad;
}

Vec3 SdfGrid::NodeGradient(int i, int j, int k) const {
  const int idx[3] = {i, j, k};
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    int lo[3] = {i, j, k};
    int hi[3] = {i, j, k};
    double span = 2.0;
    if (idx[a] == 0) {
      hi[a] += 1;
      span = 1.0;
    } else if (idx[a] == resolution_[a] - 1) {
      lo[a] -= 1;
      span = 1.0;
    } else {
      lo[a] -= 1;
      hi[a] += 1;
    }
    g[a] = (at(hi[0], hi[1], hi[2]) - at(lo[0], lo[1], lo[2])) / (span * spacing_[a]);
  }
  return g;
}

void ValidateSdfGrid(const SdfGrid& grid) {
  const auto& r = grid.resolution();
  Require(r[0] >= 2 && r[1] >= 2 && r[2] >= 2,
          "SDF grid resolution must be >= 2 per axis");
  Require(grid.NodeCount() == static_cast<size_t>(r[0]) * r[1] * r[2],
          "SDF grid value count does not match resolution");
  for (double v : grid.values()) Require(std::isfinite(v), "SDF grid value is not finite");
}

}  // namespace twinlight
