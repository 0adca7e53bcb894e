#ifndef TWINLIGHT_RENDER_SHADING_H_
#define TWINLIGHT_RENDER_SHADING_H_

#include <string>

#include "twinlight/common/image.h"
#include "twinlight/envlight/env_map.h"
#include "twinlight/render/gbuffer.h"
#include "twinlight/render/sampler.h"

namespace twinlight {

inline constexpr double kShadowEpsilon = 1e-6;

// Shadowed render, unshadowed render and their per-channel ratio
// S = shadowed / max(unshadowed, 1e-6), all linear RGB. Equal renders give
// S = 1 exactly.
struct ShadowMaps {
  Image shadowed;
  Image unshadowed;
  Image ratio;
};

// Lambertian image-based lighting of the G-buffer hits under `env`. Sky
// pixels show the dome along the view ray. Without shadows every visibility
// term is 1; the direction samples are the same either way.
Image Shade(const TriangleMesh& mesh, const Bvh& bvh, const GBuffer& gbuffer, const EnvMap& env,
            bool with_shadows, const SamplerConfig& sampler);

// Both renders from one shared sample set, so 0 <= S <= 1 exactly. Sky
// pixels have S = 1.
ShadowMaps ComputeShadowMaps(const TriangleMesh& mesh, const Bvh& bvh, const GBuffer& gbuffer,
                             const EnvMap& env, const SamplerConfig& sampler);

// 9 channels: shadowed RGB, unshadowed RGB, ratio RGB.
void WriteShadowMaps(const std::string& path, const ShadowMaps& maps);
ShadowMaps ReadShadowMaps(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_RENDER_SHADING_H_
