#ifndef TWINLIGHT_ENVLIGHT_SKY_H_
#define TWINLIGHT_ENVLIGHT_SKY_H_

#include <array>

#include "twinlight/envlight/env_map.h"

namespace twinlight {

inline constexpr int kSkyLatentDim = 64;
inline constexpr double kSunKappa = 2000.0;

// Parametric sky: base gradient from the latent plus a sun lobe.
struct SkyParams {
  std::array<double, kSkyLatentDim> z{};  // latent; only z[0..7] are read
  double f_int = 0.0;                     // sun peak radiance (luminance units)
  Vec3 f_dir = Vec3::UnitZ();             // unit, toward the sun
};

void ValidateSkyParams(const SkyParams& params);

// Fixed affine latent mapping (every other component is ignored):
//   zenith  = (0.20, 0.35, 0.80) + 0.1 * z[0..2]
//   horizon = (0.60, 0.70, 0.85) + 0.1 * z[3..5]
//   k       = max(0.1, 3 + 0.5 * z[6])     horizon-to-zenith falloff
//   ground  = max(0, 0.15 + 0.05 * z[7])   grey radiance below the horizon
// Colours are clamped at 0.
struct SkyBase {
  Vec3 zenith;
  Vec3 horizon;
  double falloff;
  double ground;
};
SkyBase DecodeSkyBase(const SkyParams& params);

// Blend weight of the zenith colour at elevation cosine cz >= 0:
// (1 - exp(-k cz)) / (1 - exp(-k)); 0 at the horizon, 1 at the zenith.
double SkyGradientWeight(double cz, double falloff);

// Base radiance for a direction (no sun).
Vec3 SkyBaseRadiance(const SkyBase& base, const Vec3& direction);

// radiance(w) = base(w) + f_int * exp(kappa * (w . f_dir - 1)), the lobe
// being a von Mises-Fisher density rescaled to peak 1, added on all three
// channels. Evaluated at texel centres of an H x 2H map.
EnvMap DecodeSky(const SkyParams& params, int height = 256, double kappa = kSunKappa);

struct SkyLosses {
  double angular = 0.0;  // degrees between sun directions
  double peak = 0.0;     // |log(1 + f_int_pred) - log(1 + f_int_target)|
  double recon = 0.0;    // mean over texel channels of squared log1p difference
};

SkyLosses ComputeSkyLosses(const EnvMap& pred_env, const SkyParams& pred,
                           const EnvMap& target_env, const SkyParams& target);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_SKY_H_
