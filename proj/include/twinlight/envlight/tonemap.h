#ifndef TWINLIGHT_ENVLIGHT_TONEMAP_H_
#define TWINLIGHT_ENVLIGHT_TONEMAP_H_

#include "twinlight/common/image.h"

namespace twinlight {

inline constexpr double kDisplayGamma = 2.2;

// ldr = clamp((exposure * hdr)^(1/2.2), 0, 1), per value; negative input
// maps to 0.
Image TonemapLdr(const Image& hdr, double exposure = 1.0);

// hdr = ldr^2.2 / exposure; inverts TonemapLdr wherever it did not clip.
Image InverseTonemap(const Image& ldr, double exposure = 1.0);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_TONEMAP_H_
