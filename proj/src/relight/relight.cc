#include "twinlight/relight/relight.h"

#include <algorithm>
#include <cmath>

#include "twinlight/common/parallel.h"

namespace twinlight {
namespace {

void RequireRgb(const Image& img, const Image& like, const char* what) {
  Require(img.channels == 3 && img.SameSize(like), std::string(what) + " must be RGB and match the source size");
}

}  // namespace

void ValidateRelightInput(const RelightInput& in) {
  Require(in.source.channels == 3 && in.source.PixelCount() > 0, "relight source must be a non-empty RGB image");
  Require(in.gbuffer.buffer.channels == kGbChannels && in.gbuffer.buffer.SameSize(in.source),
          "G-buffer must have 8 channels and match the source size");
  Require(in.gbuffer.camera.width == in.source.width && in.gbuffer.camera.height == in.source.height,
          "G-buffer camera must match the source size");
  for (const ShadowMaps* m : {&in.source_maps, &in.target_maps}) {
    RequireRgb(m->shadowed, in.source, "shadowed render");
    RequireRgb(m->unshadowed, in.source, "unshadowed render");
    RequireRgb(m->ratio, in.source, "shadow ratio");
  }
  ValidateEnvMap(in.env_source);
  ValidateEnvMap(in.env_target);
}

Image Relight(const RelightInput& in) {
  ValidateRelightInput(in);
  const GBuffer& g = in.gbuffer;
  const int w = in.source.width, h = in.source.height;
  Image out(w, h, 3);
  ParallelFor(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (g.IsSky(x, y)) {
        const Vec3 e = SampleEnv(in.env_target, g.camera.Direction(x + 0.5, y + 0.5));
        for (int k = 0; k < 3; ++k) out.at(x, y, k) = static_cast<float>(e[k]);
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        const double us = in.source_maps.unshadowed.at(x, y, k), ut = in.target_maps.unshadowed.at(x, y, k);
        const double ss = in.source_maps.ratio.at(x, y, k), st = in.target_maps.ratio.at(x, y, k);
        const double gain = (ut + kRelightEpsilon) / (us + kRelightEpsilon) *
                            ((st + kRelightEpsilon) / (ss + kRelightEpsilon));
        out.at(x, y, k) = static_cast<float>(std::max(0.0, in.source.at(x, y, k) * gain));
      }
    }
  });
  return out;
}

}  // namespace twinlight
