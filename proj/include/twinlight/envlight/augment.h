#ifndef TWINLIGHT_ENVLIGHT_AUGMENT_H_
#define TWINLIGHT_ENVLIGHT_AUGMENT_H_

#include <cstdint>

#include "twinlight/envlight/env_map.h"

namespace twinlight {

struct AugmentParams {
  double scale = 1.0;  // exposure multiplier
  int shift = 0;       // yaw in whole columns, [0, W)
  bool flip = false;   // horizontal mirror
};

// Log-uniform scale in [0.5, 2], uniform column shift, flip with p = 0.5;
// drawn from the augmentation RNG stream of `seed`.
AugmentParams DrawAugmentParams(uint64_t seed, int width);

// Scale, then rotate by `shift` columns, then mirror.
EnvMap ApplyAugment(const EnvMap& env, const AugmentParams& params);

EnvMap HdrAugment(const EnvMap& env, uint64_t seed);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_AUGMENT_H_
