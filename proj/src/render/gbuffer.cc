#include "twinlight/render/gbuffer.h"

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/parallel.h"

namespace twinlight {
namespace {

constexpr double kOffsetScale = 1e-4;
constexpr float kSkyOnDisk = -1.0f;

}  // namespace

Vec3 GBuffer::Position(int x, int y) const {
  return {buffer.at(x, y, kGbPosX), buffer.at(x, y, kGbPosY), buffer.at(x, y, kGbPosZ)};
}

Vec3 GBuffer::Normal(int x, int y) const {
  return {buffer.at(x, y, kGbNormalX), buffer.at(x, y, kGbNormalY), buffer.at(x, y, kGbNormalZ)};
}

Vec3 GBuffer::Albedo(int x, int y) const {
  return {albedo.at(x, y, 0), albedo.at(x, y, 1), albedo.at(x, y, 2)};
}

double SceneDiameter(const TriangleMesh& mesh) { return mesh.Bounds().Diagonal(); }

GBuffer ComputeGBuffer(const TriangleMesh& mesh, const Bvh& bvh, const CameraModel& camera) {
  ValidateCamera(camera);
  GBuffer g;
  g.camera = camera;
  g.buffer = Image(camera.width, camera.height, kGbChannels);
  g.albedo = Image(camera.width, camera.height, 3);
  ParallelFor(0, camera.height, [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      auto px = g.buffer.Pixel(x, y);
      px[kGbAo] = 1.0f;
      const auto hit = Intersect(bvh, mesh, camera.PixelRay(x, y));
      if (!hit) {
        px[kGbDepth] = GBuffer::kSkyDepth;
        continue;
      }
      for (int a = 0; a < 3; ++a) {
        px[kGbPosX + a] = static_cast<float>(hit->position[a]);
        px[kGbNormalX + a] = static_cast<float>(hit->normal[a]);
        g.albedo.at(x, y, a) = static_cast<float>(hit->albedo[a]);
      }
      px[kGbDepth] = static_cast<float>(hit->t);
    }
  });
  return g;
}

void ComputeAmbientOcclusion(GBuffer& g, const TriangleMesh& mesh, const Bvh& bvh,
                             const SamplerConfig& sampler) {
  ValidateSamplerConfig(sampler);
  const double diameter = SceneDiameter(mesh);
  const int w = g.buffer.width, h = g.buffer.height;
  ParallelFor(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (g.IsSky(x, y)) {
        g.buffer.at(x, y, kGbAo) = 1.0f;
        continue;
      }
      if (!(diameter > 0.0)) continue;
      const Vec3 n = g.Normal(x, y).normalized();
      const Vec3 origin = g.Position(x, y) + kOffsetScale * diameter * n;
      PixelSampler ps(sampler, kDomainAmbientOcclusion, static_cast<uint64_t>(y) * w + x);
      int open = 0;
      for (int j = 0; j < sampler.spp; ++j) {
        double u[4];
        ps.Next(u);
        Ray ray;
        ray.origin = origin;
        ray.direction = CosineHemisphere(n, u[0], u[1]);
        ray.t_max = diameter;
        if (!Occluded(bvh, mesh, ray)) ++open;
      }
      g.buffer.at(x, y, kGbAo) = static_cast<float>(static_cast<double>(open) / sampler.spp);
    }
  });
}

void WriteGBuffer(const std::string& path, const GBuffer& g) {
  Require(g.buffer.channels == kGbChannels, "G-buffer must have 8 channels");
  Image disk = g.buffer;
  for (int y = 0; y < disk.height; ++y)
    for (int x = 0; x < disk.width; ++x)
      if (g.IsSky(x, y)) disk.at(x, y, kGbDepth) = kSkyOnDisk;
  WriteFloatBuffer(path, disk);
}

GBuffer ReadGBuffer(const std::string& path) {
  GBuffer g;
  g.buffer = ReadFloatBuffer(path);
  if (g.buffer.channels != kGbChannels) {
    throw IoError(path + ": G-buffer must have 8 channels, got " + std::to_string(g.buffer.channels));
  }
  for (int y = 0; y < g.buffer.height; ++y)
    for (int x = 0; x < g.buffer.width; ++x) {
      float& d = g.buffer.at(x, y, kGbDepth);
      if (d == kSkyOnDisk) {
        d = GBuffer::kSkyDepth;
      } else if (!(d > 0.0f)) {
        throw IoError(path + ": G-buffer depth must be > 0 or -1 for sky");
      }
    }
  return g;
}

}  // namespace twinlight
