#ifndef TWINLIGHT_CLI_ESTIMATE_SKY_H_
#define TWINLIGHT_CLI_ESTIMATE_SKY_H_

#include <optional>
#include <string>

#include "twinlight/envlight/sky.h"
#include "twinlight/envlight/solar.h"
#include "twinlight/panorama/panorama.h"

namespace twinlight {

struct SkyEstimateOptions {
  std::optional<GeoTime> geo;  // sun direction from the solar position when set
  double exposure = 1.0;       // of the LDR panorama
  int dome_height = 0;         // 0: the panorama height
  double sun_exclusion_deg = 10.0;
};

struct SkyEstimate {
  SkyParams params;
  EnvMap dome;
  EnvMap filled_hdr;   // hole-filled panorama lifted to linear radiance
  double fit_rms = 0;  // RMS residual of the base-gradient fit
};

// Fills the LDR panorama, inverts the tone curve, then fits the sky: sun
// direction from `geo` or the centroid of the near-peak region, sun
// intensity from the excess over the fitted base at that direction, base
// colours and falloff by weighted least squares over upper-hemisphere texels
// away from the sun, ground level from the mean below the horizon.
// Throws PreconditionError on a panorama with no observed texel.
SkyEstimate EstimateSky(const Panorama& ldr, const SkyEstimateOptions& options = {});

// Luminance x solid-angle weighted mean direction of texels within 2% of the
// peak luminance. A clipped sun is a plateau, so its brightest texel alone
// is biased toward the first row scanned.
Vec3 SunCentroid(const EnvMap& env);

// Least-squares base gradient, ignoring texels within `exclusion_deg` of
// `sun` and, when `known` is non-empty, texels not flagged there.
SkyBase FitSkyBase(const EnvMap& env, const Vec3& sun, double exclusion_deg,
                   const std::vector<char>& known, double* rms = nullptr);

// Latent vector reproducing `base` under the fixed affine decoder.
SkyParams ParamsFromBase(const SkyBase& base);

// [lighting] section text accepted by the scene reader.
std::string FormatSkyParams(const SkyParams& params, int height);

}  // namespace twinlight

#endif  // TWINLIGHT_CLI_ESTIMATE_SKY_H_
