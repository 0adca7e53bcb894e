#ifndef TWINLIGHT_RELIGHT_RELIGHT_H_
#define TWINLIGHT_RELIGHT_RELIGHT_H_

#include "twinlight/common/image.h"
#include "twinlight/envlight/env_map.h"
#include "twinlight/render/gbuffer.h"
#include "twinlight/render/shading.h"

namespace twinlight {

// Gain regulariser; smaller than the shadow-ratio epsilon so scaling the
// target dome scales surface pixels to within 1e-5 relative.
inline constexpr double kRelightEpsilon = 1e-9;

struct RelightInput {
  Image source;  // linear RGB
  GBuffer gbuffer;
  ShadowMaps source_maps;
  ShadowMaps target_maps;
  EnvMap env_source;
  EnvMap env_target;
};

// Throws PreconditionError on mismatched raster sizes or channel counts.
void ValidateRelightInput(const RelightInput& input);

// Ratio compositor. Surface pixels:
//   gain = (u_tgt + e) / (u_src + e) * (S_tgt + e) / (S_src + e)
//   out  = max(source * gain, 0)
// with u the unshadowed render, S the shadow ratio and e = kRelightEpsilon,
// per channel.
// Sky pixels take the target dome along the camera ray, sampled as the
// renderer does.
Image Relight(const RelightInput& input);

struct LossWeights {
  double lambda_lpips = 1.0;  // slot kept; the perceptual term is not computed
  double lambda_edge = 400.0;
};

void ValidateLossWeights(const LossWeights& weights);

struct RelightLosses {
  double color = 0.0;
  double edge = 0.0;
  double lpips = 0.0;  // always 0
  double total = 0.0;
};

// color: mean over pixels of |pred - target|_2 (RGB).
// edge: mean over pixels of the L2 norm of the 6-vector of per-channel
// horizontal and vertical 3x3 Sobel responses of (pred - target); borders
// replicate the edge pixel.
// total = color + lambda_edge * edge.
RelightLosses ComputeRelightLosses(const Image& pred, const Image& target,
                                   const LossWeights& weights = {});

}  // namespace twinlight

#endif  // TWINLIGHT_RELIGHT_RELIGHT_H_
