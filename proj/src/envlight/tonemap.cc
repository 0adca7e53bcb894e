#include "twinlight/envlight/tonemap.h"

#include <algorithm>
#include <cmath>

namespace twinlight {

Image TonemapLdr(const Image& hdr, double exposure) {
  Require(exposure > 0.0 && std::isfinite(exposure), "exposure must be > 0");
  Image out = hdr;
  for (float& v : out.data) {
    const double x = exposure * std::max(0.0f, v);
    v = static_cast<float>(std::clamp(std::pow(x, 1.0 / kDisplayGamma), 0.0, 1.0));
  }
  return out;
}

Image InverseTonemap(const Image& ldr, double exposure) {
  Require(exposure > 0.0 && std::isfinite(exposure), "exposure must be > 0");
  Image out = ldr;
  for (float& v : out.data) {
    v = static_cast<float>(std::pow(std::clamp(static_cast<double>(v), 0.0, 1.0), kDisplayGamma) /
                           exposure);
  }
  return out;
}

}  // namespace twinlight
