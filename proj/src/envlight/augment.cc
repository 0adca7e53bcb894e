#include "twinlight/envlight/augment.h"

#include <cmath>
#include <numbers>

#include "twinlight/common/rng.h"

namespace twinlight {

AugmentParams DrawAugmentParams(uint64_t seed, int width) {
  Require(width >= 1, "augment needs a non-empty map");
  CounterRng rng(seed, kDomainAugment, 0);
  AugmentParams p;
  p.scale = std::exp(std::log(0.5) + rng.Uniform() * std::log(4.0));
  p.shift = static_cast<int>(rng.Uniform() * width);
  p.flip = rng.Uniform() < 0.5;
  return p;
}

EnvMap ApplyAugment(const EnvMap& env, const AugmentParams& params) {
  ValidateEnvMap(env);
  Require(params.scale > 0.0 && std::isfinite(params.scale), "augment scale must be > 0");
  EnvMap out = env;
  if (params.scale != 1.0) {
    for (float& v : out.radiance.data) v = static_cast<float>(v * params.scale);
  }
  if (params.shift % env.width() != 0) {
    out = RotateEnv(out, 2.0 * std::numbers::pi * params.shift / env.width());
  }
  if (params.flip) out = FlipEnv(out);
  return out;
}

EnvMap HdrAugment(const EnvMap& env, uint64_t seed) {
  return ApplyAugment(env, DrawAugmentParams(seed, env.width()));
}

}  // namespace twinlight
