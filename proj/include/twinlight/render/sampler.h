#ifndef TWINLIGHT_RENDER_SAMPLER_H_
#define TWINLIGHT_RENDER_SAMPLER_H_

#include <cstdint>
#include <vector>

#include "twinlight/common/rng.h"
#include "twinlight/common/vec.h"
#include "twinlight/envlight/env_map.h"

namespace twinlight {

enum class SamplingStrategy {
  // Mixture when the dome is far from uniform, plain cosine otherwise.
  kAuto,
  kCosine,
  // Cosine-hemisphere and env-texel importance sampling combined with the
  // balance heuristic.
  kMixture,
};

struct SamplerConfig {
  int spp = 64;
  uint64_t seed = 0;
  // Stratification grid for the two direction variates; 0 picks
  // floor(sqrt(spp)) per axis. Samples past the grid are unstratified.
  int strata_x = 0;
  int strata_y = 0;
  SamplingStrategy strategy = SamplingStrategy::kAuto;
};

// spp >= 1, strata >= 0.
void ValidateSamplerConfig(const SamplerConfig& config);

// Orthonormal basis with `n` as the third axis.
void BuildFrame(const Vec3& n, Vec3& t, Vec3& b);

// Cosine-weighted direction about unit `n` from two uniforms.
Vec3 CosineHemisphere(const Vec3& n, double u1, double u2);

// Per-pixel variate stream keyed by (seed, domain, pixel); sample j is a
// pure function of those and j.
class PixelSampler {
 public:
  PixelSampler(const SamplerConfig& config, uint64_t domain, uint64_t pixel);
  // u[0], u[1]: stratified pair; u[2], u[3]: independent uniforms.
  void Next(double u[4]);

 private:
  CounterRng rng_;
  int sx_;
  int sy_;
  int index_ = 0;
};

// Piecewise-constant env lookup (nearest texel), used as E(w) when shading.
Vec3 EnvRadiance(const EnvMap& env, const Vec3& direction);

// Texel importance distribution proportional to luminance times solid angle.
// Directions are uniform in solid angle within the chosen texel.
class EnvDistribution {
 public:
  explicit EnvDistribution(const EnvMap& env);

  bool empty() const { return total_ <= 0.0; }
  Vec3 Sample(double u1, double u2, double u3) const;
  double Pdf(const Vec3& direction) const;

  // Fraction of samples drawn from the cosine lobe under kAuto: the uniform
  // share of the dome's energy, clamped to [0.25, 1].
  double cosine_fraction() const { return cosine_fraction_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> cdf_;  // inclusive prefix sums
  std::vector<double> weight_;
  double total_ = 0.0;
  double cosine_fraction_ = 1.0;
};

}  // namespace twinlight

#endif  // TWINLIGHT_RENDER_SAMPLER_H_
