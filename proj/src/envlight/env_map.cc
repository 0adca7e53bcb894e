#include "twinlight/envlight/env_map.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "twinlight/common/reduce.h"

namespace twinlight {
namespace {

constexpr double kPi = std::numbers::pi;

int Wrap(int x, int w) {
  const int r = x % w;
  return r < 0 ? r + w : r;
}

}  // namespace

void ValidateEnvMap(const EnvMap& env) {
  Require(env.radiance.channels == 3, "env map must have 3 channels");
  Require(env.height() >= 1 && env.width() == 2 * env.height(),
          "env map must be W = 2H with H >= 1");
  for (float v : env.radiance.data) {
    Require(std::isfinite(v) && v >= 0.0f, "env map values must be finite and >= 0");
  }
}

PixelCoord DirToPixel(const Vec3& d, int width, int height) {
  const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
  double phi = std::atan2(d.y(), d.x());
  if (phi == -kPi) phi = kPi;
  return {(phi / (2.0 * kPi) + 0.5) * width, theta / kPi * height};
}

Vec3 PixelToDir(double u, double v, int width, int height) {
  const double theta = v / height * kPi;
  const double phi = (u / width - 0.5) * 2.0 * kPi;
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double TexelSolidAngle(int y, int width, int height) {
  const double t0 = kPi * y / height;
  const double t1 = kPi * (y + 1) / height;
  return 2.0 * kPi / width * (std::cos(t0) - std::cos(t1));
}

Vec3 SampleEnv(const EnvMap& env, const Vec3& direction) {
  const int w = env.width(), h = env.height();
  const PixelCoord p = DirToPixel(direction, w, h);
  const double fx = p.u - 0.5;
  const double fy = std::clamp(p.v - 0.5, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = std::min(static_cast<int>(std::floor(fy)), std::max(h - 2, 0));
  const double tx = fx - x0;
  const double ty = h > 1 ? fy - y0 : 0.0;
  const int y1 = std::min(y0 + 1, h - 1);
  const int xa = Wrap(x0, w), xb = Wrap(x0 + 1, w);
  return (1 - ty) * ((1 - tx) * env.Texel(xa, y0) + tx * env.Texel(xb, y0)) +
         ty * ((1 - tx) * env.Texel(xa, y1) + tx * env.Texel(xb, y1));
}

EnvMap RotateEnv(const EnvMap& env, double yaw) {
  const int w = env.width(), h = env.height();
  double shift = std::fmod(yaw / (2.0 * kPi) * w, static_cast<double>(w));
  if (shift < 0) shift += w;
  const double nearest = std::round(shift);
  EnvMap out(h);
  if (std::abs(shift - nearest) < 1e-6) {
    const int s = static_cast<int>(nearest) % w;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = env.at(Wrap(x - s, w), y, c);
      }
    }
    return out;
  }
  const int whole = static_cast<int>(std::floor(shift));
  const double frac = shift - whole;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = static_cast<float>((1.0 - frac) * env.at(Wrap(x - whole, w), y, c) +
                                             frac * env.at(Wrap(x - whole - 1, w), y, c));
      }
    }
  }
  return out;
}

EnvMap FlipEnv(const EnvMap& env) {
  const int w = env.width(), h = env.height();
  EnvMap out(h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = env.at(w - 1 - x, y, c);
    }
  }
  return out;
}

SunEstimate ExtractSun(const EnvMap& env) {
  Require(env.width() > 0 && env.height() > 0, "extract_sun needs a non-empty env map");
  SunEstimate best;
  double best_lum = -1.0;
  for (int y = 0; y < env.height(); ++y) {
    for (int x = 0; x < env.width(); ++x) {
      const double lum = Luminance(env.Texel(x, y));
      if (lum > best_lum) {
        best_lum = lum;
        best.x = x;
        best.y = y;
      }
    }
  }
  best.intensity = best_lum;
  best.direction = TexelDir(best.x, best.y, env.width(), env.height());
  return best;
}

Vec3 EnvEnergy(const EnvMap& env) {
  Vec3 out;
  std::vector<double> terms(env.radiance.PixelCount());
  for (int c = 0; c < 3; ++c) {
    size_t i = 0;
    for (int y = 0; y < env.height(); ++y) {
      const double omega = TexelSolidAngle(y, env.width(), env.height());
      for (int x = 0; x < env.width(); ++x) terms[i++] = omega * env.at(x, y, c);
    }
    out[c] = PairwiseSum(terms);
  }
  return out;
}

}  // namespace twinlight
