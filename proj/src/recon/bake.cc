#include "twinlight/recon/bake.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "twinlight/common/parallel.h"

namespace twinlight {
namespace {

// Visibility rays stop this fraction short of the vertex so the vertex's own
// triangles do not occlude it.
constexpr double kVisibilityEpsilon = 1e-4;

}  // namespace

void SampleBilinear(const Image& image, double u, double v, float* out) {
  const double x = std::clamp(u - 0.5, 0.0, static_cast<double>(image.width - 1));
  const double y = std::clamp(v - 0.5, 0.0, static_cast<double>(image.height - 1));
  const int x0 = std::min(static_cast<int>(x), std::max(0, image.width - 2));
  const int y0 = std::min(static_cast<int>(y), std::max(0, image.height - 2));
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0, fy = y - y0;
  for (int c = 0; c < image.channels; ++c) {
    const double top = (1 - fx) * image.at(x0, y0, c) + fx * image.at(x1, y0, c);
    const double bottom = (1 - fx) * image.at(x0, y1, c) + fx * image.at(x1, y1, c);
    out[c] = static_cast<float>((1 - fy) * top + fy * bottom);
  }
}

BakeResult BakeVertexAlbedo(const TriangleMesh& mesh, const std::vector<Image>& images,
                            const std::vector<CameraModel>& cameras, const Bvh& bvh) {
  Require(images.size() == cameras.size(), "bake needs one image per camera");
  Require(!mesh.empty(), "bake needs a non-empty mesh");
  for (size_t i = 0; i < cameras.size(); ++i) {
    ValidateCamera(cameras[i]);
    Require(images[i].width == cameras[i].width && images[i].height == cameras[i].height &&
                images[i].channels == 3,
            "bake image " + std::to_string(i) + " must be RGB at its camera's size");
  }
  BakeResult result;
  result.mesh = mesh;
  result.unseen.assign(mesh.VertexCount(), false);
  std::vector<char> unseen(mesh.VertexCount(), 0);
  ParallelFor(0, static_cast<int>(mesh.VertexCount()), [&](int v) {
    const Vec3& p = mesh.vertices[v];
    std::array<std::vector<float>, 3> samples;
    for (size_t c = 0; c < cameras.size(); ++c) {
      const CameraModel& cam = cameras[c];
      const auto proj = cam.Project(p);
      if (!proj || proj->u < 0 || proj->v < 0 || proj->u >= cam.width || proj->v >= cam.height) {
        continue;
      }
      const Vec3 to = p - cam.Center();
      const double dist = to.norm();
      if (!(dist > 0.0)) continue;
      Ray ray;
      ray.origin = cam.Center();
      ray.direction = to / dist;
      ray.t_min = 0.0;
      ray.t_max = dist * (1.0 - kVisibilityEpsilon);
      if (Occluded(bvh, mesh, ray)) continue;
      float rgb[3];
      SampleBilinear(images[c], proj->u, proj->v, rgb);
      for (int k = 0; k < 3; ++k) samples[k].push_back(rgb[k]);
    }
    if (samples[0].empty()) {
      result.mesh.albedo[v] = Vec3::Constant(0.5);
      unseen[v] = 1;
      return;
    }
    // Sorted before summing so the mean does not depend on camera order.
    for (int k = 0; k < 3; ++k) {
      auto& s = samples[k];
      std::sort(s.begin(), s.end());
      double sum = 0.0;
      for (float x : s) sum += x;
      result.mesh.albedo[v][k] = std::clamp(sum / static_cast<double>(s.size()), 0.0, 1.0);
    }
  });
  for (size_t v = 0; v < unseen.size(); ++v) result.unseen[v] = unseen[v] != 0;
  return result;
}

}  // namespace twinlight
