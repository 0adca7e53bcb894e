#include "twinlight/envlight/sky.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "twinlight/common/parallel.h"
#include "twinlight/common/reduce.h"

namespace twinlight {

void ValidateSkyParams(const SkyParams& params) {
  for (double v : params.z) Require(std::isfinite(v), "sky latent must be finite");
  Require(std::isfinite(params.f_int) && params.f_int >= 0.0, "f_int must be finite and >= 0");
  Require(params.f_dir.allFinite() && std::abs(params.f_dir.norm() - 1.0) <= 1e-6,
          "f_dir must be a unit vector");
}

SkyBase DecodeSkyBase(const SkyParams& p) {
  SkyBase b;
  b.zenith = (Vec3(0.20, 0.35, 0.80) + 0.1 * Vec3(p.z[0], p.z[1], p.z[2])).cwiseMax(0.0);
  b.horizon = (Vec3(0.60, 0.70, 0.85) + 0.1 * Vec3(p.z[3], p.z[4], p.z[5])).cwiseMax(0.0);
  b.falloff = std::max(0.1, 3.0 + 0.5 * p.z[6]);
  b.ground = std::max(0.0, 0.15 + 0.05 * p.z[7]);
  return b;
}

double SkyGradientWeight(double cz, double falloff) {
  return -std::expm1(-falloff * cz) / -std::expm1(-falloff);
}

Vec3 SkyBaseRadiance(const SkyBase& base, const Vec3& d) {
  if (d.z() < 0.0) return Vec3::Constant(base.ground);
  const double g = SkyGradientWeight(d.z(), base.falloff);
  return base.horizon + g * (base.zenith - base.horizon);
}

EnvMap DecodeSky(const SkyParams& params, int height, double kappa) {
  ValidateSkyParams(params);
  Require(height >= 1, "sky map height must be >= 1");
  Require(kappa > 0.0, "sun concentration must be > 0");
  const SkyBase base = DecodeSkyBase(params);
  EnvMap env(height);
  const int w = env.width();
  ParallelFor(0, height, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d = TexelDir(x, y, w, height);
      const double sun = params.f_int * std::exp(kappa * (d.dot(params.f_dir) - 1.0));
      const Vec3 rad = SkyBaseRadiance(base, d) + Vec3::Constant(sun);
      for (int c = 0; c < 3; ++c) env.at(x, y, c) = static_cast<float>(rad[c]);
    }
  });
  return env;
}

SkyLosses ComputeSkyLosses(const EnvMap& pred_env, const SkyParams& pred,
                           const EnvMap& target_env, const SkyParams& target) {
  Require(pred_env.radiance.SameShape(target_env.radiance),
          "sky losses need maps of the same resolution");
  SkyLosses out;
  const double cosang = std::clamp(pred.f_dir.dot(target.f_dir), -1.0, 1.0);
  out.angular = std::acos(cosang) * (180.0 / std::numbers::pi);
  out.peak = std::abs(std::log1p(pred.f_int) - std::log1p(target.f_int));
  const auto& a = pred_env.radiance.data;
  const auto& b = target_env.radiance.data;
  std::vector<double> sq(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = std::log1p(static_cast<double>(a[i])) - std::log1p(static_cast<double>(b[i]));
    sq[i] = d * d;
  }
  out.recon = a.empty() ? 0.0 : PairwiseSum(sq) / static_cast<double>(a.size());
  return out;
}

}  // namespace twinlight
