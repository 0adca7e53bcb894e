#include "twinlight/render/shading.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/parallel.h"

namespace twinlight {
namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;
constexpr double kOffsetScale = 1e-4;

// Accumulates the shadowed and unshadowed estimators from one sample set.
void ShadePixels(const TriangleMesh& mesh, const Bvh& bvh, const GBuffer& g, const EnvMap& env,
                 bool trace_shadows, const SamplerConfig& sampler, Image* shadowed,
                 Image* unshadowed) {
  ValidateSamplerConfig(sampler);
  ValidateEnvMap(env);
  Require(g.albedo.SameSize(g.buffer) && g.albedo.channels == 3, "G-buffer lacks albedo");
  const EnvDistribution dist(env);
  double alpha = 1.0;
  if (sampler.strategy != SamplingStrategy::kCosine && !dist.empty()) alpha = dist.cosine_fraction();
  const double offset = kOffsetScale * SceneDiameter(mesh);
  const int w = g.buffer.width, h = g.buffer.height;
  ParallelFor(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (g.IsSky(x, y)) {
        const Vec3 e = SampleEnv(env, g.camera.Direction(x + 0.5, y + 0.5));
        for (int k = 0; k < 3; ++k) {
          if (shadowed) shadowed->at(x, y, k) = static_cast<float>(e[k]);
          if (unshadowed) unshadowed->at(x, y, k) = static_cast<float>(e[k]);
        }
        continue;
      }
      const Vec3 n = g.Normal(x, y).normalized();
      const Vec3 origin = g.Position(x, y) + offset * n;
      PixelSampler ps(sampler, kDomainShading, static_cast<uint64_t>(y) * w + x);
      Vec3 sum_vis = Vec3::Zero(), sum_all = Vec3::Zero();
      for (int j = 0; j < sampler.spp; ++j) {
        double u[4];
        ps.Next(u);
        Vec3 dir;
        Vec3 weight;  // E(w) cos / (pi pdf)
        if (alpha >= 1.0) {
          dir = CosineHemisphere(n, u[0], u[1]);
          weight = EnvRadiance(env, dir);
        } else {
          dir = u[2] < alpha ? CosineHemisphere(n, u[0], u[1]) : dist.Sample(u[0], u[1], u[3]);
          const double cosine = n.dot(dir);
          if (cosine <= 0.0) continue;  // contributes zero but still counts in N
          const double pdf = alpha * cosine * kInvPi + (1.0 - alpha) * dist.Pdf(dir);
          weight = EnvRadiance(env, dir) * (cosine * kInvPi / pdf);
        }
        sum_all += weight;
        if (trace_shadows) {
          Ray ray;
          ray.origin = origin;
          ray.direction = dir;
          if (Occluded(bvh, mesh, ray)) continue;
        }
        sum_vis += weight;
      }
      const Vec3 kd = g.Albedo(x, y);
      for (int k = 0; k < 3; ++k) {
        if (shadowed) shadowed->at(x, y, k) = static_cast<float>(kd[k] * (sum_vis[k] / sampler.spp));
        if (unshadowed) unshadowed->at(x, y, k) = static_cast<float>(kd[k] * (sum_all[k] / sampler.spp));
      }
    }
  });
}

}  // namespace

Image Shade(const TriangleMesh& mesh, const Bvh& bvh, const GBuffer& gbuffer, const EnvMap& env,
            bool with_shadows, const SamplerConfig& sampler) {
  Image out(gbuffer.buffer.width, gbuffer.buffer.height, 3);
  ShadePixels(mesh, bvh, gbuffer, env, with_shadows, sampler, &out, nullptr);
  return out;
}

ShadowMaps ComputeShadowMaps(const TriangleMesh& mesh, const Bvh& bvh, const GBuffer& gbuffer,
                             const EnvMap& env, const SamplerConfig& sampler) {
  const int w = gbuffer.buffer.width, h = gbuffer.buffer.height;
  ShadowMaps maps{Image(w, h, 3), Image(w, h, 3), Image(w, h, 3, 1.0f)};
  ShadePixels(mesh, bvh, gbuffer, env, true, sampler, &maps.shadowed, &maps.unshadowed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (gbuffer.IsSky(x, y)) continue;
      for (int k = 0; k < 3; ++k) {
        const double s = maps.shadowed.at(x, y, k), u = maps.unshadowed.at(x, y, k);
        maps.ratio.at(x, y, k) = static_cast<float>(s / std::max(u, kShadowEpsilon));
      }
    }
  return maps;
}

void WriteShadowMaps(const std::string& path, const ShadowMaps& maps) {
  const int w = maps.ratio.width, h = maps.ratio.height;
  Require(maps.shadowed.SameShape(maps.ratio) && maps.unshadowed.SameShape(maps.ratio) &&
              maps.ratio.channels == 3,
          "shadow maps must be three RGB images of one size");
  Image out(w, h, 9);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < 3; ++k) {
        out.at(x, y, k) = maps.shadowed.at(x, y, k);
        out.at(x, y, 3 + k) = maps.unshadowed.at(x, y, k);
        out.at(x, y, 6 + k) = maps.ratio.at(x, y, k);
      }
  WriteFloatBuffer(path, out);
}

ShadowMaps ReadShadowMaps(const std::string& path) {
  const Image in = ReadFloatBuffer(path);
  if (in.channels != 9) {
    throw IoError(path + ": shadow maps need 9 channels, got " + std::to_string(in.channels));
  }
  return {in.Channels(0, 3), in.Channels(3, 3), in.Channels(6, 3)};
}

}  // namespace twinlight
