#include "twinlight/cli/estimate_sky.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "twinlight/common/kv_text.h"
#include "twinlight/envlight/tonemap.h"

namespace twinlight {
namespace {

constexpr double kPeakFraction = 0.98;
constexpr double kMinFalloff = 0.1;
constexpr double kMaxFalloff = 20.0;

struct Fit {
  SkyBase base;
  double sse = 0.0;
};

struct SkyTexel {
  double cz;
  double weight;
  Vec3 value;
};

// Closed-form colours for a fixed falloff.
Fit FitColours(const std::vector<SkyTexel>& texels, double k) {
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Matrix<double, 2, 3> atb = Eigen::Matrix<double, 2, 3>::Zero();
  for (const SkyTexel& t : texels) {
    const double g = SkyGradientWeight(t.cz, k);
    const Eigen::Vector2d a(1.0 - g, g);
    ata += t.weight * a * a.transpose();
    atb += t.weight * a * t.value.transpose();
  }
  const Eigen::Matrix<double, 2, 3> x = ata.ldlt().solve(atb);
  Fit f;
  f.base.horizon = x.row(0).transpose();
  f.base.zenith = x.row(1).transpose();
  f.base.falloff = k;
  for (const SkyTexel& t : texels) {
    const double g = SkyGradientWeight(t.cz, k);
    const Vec3 r = f.base.horizon + g * (f.base.zenith - f.base.horizon) - t.value;
    f.sse += t.weight * r.squaredNorm();
  }
  return f;
}

}  // namespace

Vec3 SunCentroid(const EnvMap& env) {
  ValidateEnvMap(env);
  const int w = env.width(), h = env.height();
  double peak = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) peak = std::max(peak, Luminance(env.Texel(x, y)));
  Require(peak > 0.0, "dome is black; no sun to locate");
  Vec3 sum = Vec3::Zero();
  for (int y = 0; y < h; ++y) {
    const double omega = TexelSolidAngle(y, w, h);
    for (int x = 0; x < w; ++x) {
      const double l = Luminance(env.Texel(x, y));
      if (l >= kPeakFraction * peak) sum += l * omega * TexelDir(x, y, w, h);
    }
  }
  if (!(sum.norm() > 0.0)) return ExtractSun(env).direction;
  return sum.normalized();
}

SkyBase FitSkyBase(const EnvMap& env, const Vec3& sun, double exclusion_deg,
                   const std::vector<char>& known, double* rms) {
  ValidateEnvMap(env);
  const int w = env.width(), h = env.height();
  Require(known.empty() || known.size() == static_cast<size_t>(w) * h, "mask size differs from the dome");
  const double cos_excl = std::cos(exclusion_deg * std::numbers::pi / 180.0);
  std::vector<SkyTexel> sky;
  double ground_sum = 0.0, ground_w = 0.0, total_w = 0.0;
  for (int y = 0; y < h; ++y) {
    const double omega = TexelSolidAngle(y, w, h);
    for (int x = 0; x < w; ++x) {
      if (!known.empty() && !known[static_cast<size_t>(y) * w + x]) continue;
      const Vec3 d = TexelDir(x, y, w, h);
      if (d.dot(sun) > cos_excl) continue;
      const Vec3 v = env.Texel(x, y);
      if (d.z() < 0.0) {
        ground_sum += omega * v.mean();
        ground_w += omega;
      } else {
        sky.push_back({d.z(), omega, v});
        total_w += omega;
      }
    }
  }
  Require(sky.size() >= 2, "too few sky texels to fit the gradient");
  // Coarse log-spaced scan, then golden-section refinement.
  const int steps = 48;
  double best_k = kMinFalloff, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double k = kMinFalloff * std::pow(kMaxFalloff / kMinFalloff, static_cast<double>(i) / steps);
    const double sse = FitColours(sky, k).sse;
    if (sse < best) best = sse, best_k = k;
  }
  const double ratio = std::pow(kMaxFalloff / kMinFalloff, 1.0 / steps);
  double a = std::max(kMinFalloff, best_k / ratio), b = std::min(kMaxFalloff, best_k * ratio);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (FitColours(sky, c).sse < FitColours(sky, d).sse) {
      b = d;
    } else {
      a = c;
    }
  }
  Fit f = FitColours(sky, 0.5 * (a + b));
  if (FitColours(sky, best_k).sse < f.sse) f = FitColours(sky, best_k);
  f.base.zenith = f.base.zenith.cwiseMax(0.0);
  f.base.horizon = f.base.horizon.cwiseMax(0.0);
  f.base.ground = ground_w > 0.0 ? std::max(0.0, ground_sum / ground_w) : DecodeSkyBase({}).ground;
  if (rms) *rms = std::sqrt(f.sse / (3.0 * total_w));
  return f.base;
}

SkyParams ParamsFromBase(const SkyBase& base) {
  const SkyBase ref = DecodeSkyBase({});
  SkyParams p;
  for (int c = 0; c < 3; ++c) {
    p.z[c] = (base.zenith[c] - ref.zenith[c]) / 0.1;
    p.z[3 + c] = (base.horizon[c] - ref.horizon[c]) / 0.1;
  }
  p.z[6] = (base.falloff - 3.0) / 0.5;
  p.z[7] = (base.ground - 0.15) / 0.05;
  return p;
}

SkyEstimate EstimateSky(const Panorama& ldr, const SkyEstimateOptions& options) {
  Require(options.exposure > 0.0, "exposure must be > 0");
  Require(options.dome_height >= 0, "dome height must be >= 0");
  SkyEstimate out;
  out.filled_hdr = EnvMap(InverseTonemap(FillHoles(ldr), options.exposure));
  const EnvMap& hdr = out.filled_hdr;
  const Vec3 sun = options.geo ? SolarDirection(*options.geo) : SunCentroid(hdr);
  std::vector<char> known(ldr.count.size());
  for (size_t i = 0; i < known.size(); ++i) known[i] = ldr.count[i] > 0;
  const SkyBase base = FitSkyBase(hdr, sun, options.sun_exclusion_deg, known, &out.fit_rms);
  out.params = ParamsFromBase(base);
  out.params.f_dir = sun;
  out.params.f_int = std::max(0.0, Luminance(SampleEnv(hdr, sun)) - Luminance(SkyBaseRadiance(base, sun)));
  out.dome = DecodeSky(out.params, options.dome_height > 0 ? options.dome_height : hdr.height());
  return out;
}

std::string FormatSkyParams(const SkyParams& params, int height) {
  std::vector<double> z(params.z.begin(), params.z.begin() + 8);
  std::string out = "[lighting]\n";
  out += "sky = " + FormatDoubles(z) + "\n";
  out += "sun_intensity = " + FormatDouble(params.f_int) + "\n";
  out += "sun_direction = " + FormatDoubles({params.f_dir.x(), params.f_dir.y(), params.f_dir.z()}) + "\n";
  out += "height = " + std::to_string(height) + "\n";
  return out;
}

}  // namespace twinlight
